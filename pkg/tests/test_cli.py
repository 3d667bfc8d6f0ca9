import json

import pytest

from biascool.cli import main
from biascool.config import DEFAULT_CONFIG

from conftest import CHI_DEFAULT, NBAR_COLD, OMEGA0_DEFAULT, TEFF_FINAL

# one ramp and a coarse grid keep the CLI tests quick
FAST_LINES = {
    "t_final = 0.5, 1.0, 2.0": "t_final = 1.0",
    "sample_count = 201": "sample_count = 41",
}


def fast_config(tmp_path, **replacements):
    text = DEFAULT_CONFIG
    for old, new in {**FAST_LINES, **replacements}.items():
        assert old in text, old
        text = text.replace(old, new)
    path = tmp_path / "run.cfg"
    path.write_text(text, encoding="utf-8")
    return path


def read_csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:] if not line.startswith("#")]
    return header, rows


def column(path, name):
    header, rows = read_csv(path)
    idx = header.index(name)
    return [row[idx] for row in rows]


class TestParams:
    def test_prints_protocol_numbers(self, capsys, tmp_path):
        assert main(["params", "--config", str(fast_config(tmp_path))]) == 0
        out = capsys.readouterr().out
        assert "1.25113e+07" in out
        assert "3109.44" in out
        assert "0.472024" in out
        assert "59.4738" in out

    def test_default_config_used_when_omitted(self, capsys):
        assert main(["params"]) == 0
        assert "3537.13" in capsys.readouterr().out

    def test_zero_drive_device(self, capsys, tmp_path):
        cfg = fast_config(tmp_path, **{"voltage_amplitude = 7.00 V": "voltage_amplitude = 0 V"})
        assert main(["params", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "coupling eta                = 0" in out
        # occupations at omega_m and omega_0 coincide
        assert out.count("3109.44") == 2


class TestDesign:
    def test_series_files_and_boundaries(self, tmp_path):
        out = tmp_path / "out"
        cfg = fast_config(tmp_path)
        assert main(["design", "--config", str(cfg), "--out", str(out)]) == 0
        f_values = column(out / "f_t_tf1.csv", "value")
        assert f_values[0] == "1"
        assert abs(float(f_values[-1])) < 1e-9
        omega = [float(v) for v in column(out / "omega_eff_t_tf1.csv", "value")]
        assert omega[0] == pytest.approx(OMEGA0_DEFAULT, rel=1e-9)
        assert omega[-1] == pytest.approx(1.0, rel=1e-9)
        b = [float(v) for v in column(out / "b_t_tf1.csv", "value")]
        assert b[0] == 1.0
        assert b[-1] == pytest.approx(CHI_DEFAULT, rel=1e-12)
        assert b[len(b) // 2] == pytest.approx((CHI_DEFAULT + 1.0) / 2.0, rel=1e-10)

    def test_sample_override(self, tmp_path):
        out = tmp_path / "out"
        cfg = fast_config(tmp_path)
        assert main(["design", "--config", str(cfg), "--out", str(out), "--samples", "11"]) == 0
        _, rows = read_csv(out / "f_t_tf1.csv")
        assert len(rows) == 11

    def test_json_format(self, tmp_path):
        out = tmp_path / "out"
        cfg = fast_config(tmp_path, **{"format = csv": "format = json"})
        assert main(["design", "--config", str(cfg), "--out", str(out)]) == 0
        payload = json.loads((out / "f_t_tf1.json").read_text(encoding="utf-8"))
        assert payload["columns"] == ["t_omega_m", "value"]
        assert payload["rows"][0][1] == "1"

    def test_precision_knob_limits_significant_digits(self, tmp_path):
        out = tmp_path / "out"
        cfg = fast_config(tmp_path, **{"precision = 12": "precision = 6"})
        assert main(["design", "--config", str(cfg), "--out", str(out)]) == 0
        omega = column(out / "omega_eff_t_tf1.csv", "value")
        assert omega[0] == "3537.13"
        digits = max(len(v.split("e")[0].replace(".", "").lstrip("-0")) for v in omega)
        assert digits <= 6


@pytest.fixture(scope="module")
def sim_dir(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("sim")
    out = tmp / "out"
    cfg = fast_config(tmp)
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    return out


class TestSimulate:
    def test_effective_temperature_endpoints(self, sim_dir):
        t_eff = [float(v) for v in column(sim_dir / "t_eff_t_tf1.csv", "value")]
        assert t_eff[0] == pytest.approx(0.02, rel=1e-9)
        assert t_eff[-1] == pytest.approx(TEFF_FINAL, rel=1e-6)

    def test_occupation_endpoint_preserved(self, sim_dir):
        n_bare = [float(v) for v in column(sim_dir / "n_bar_t_tf1.csv", "n_bar_ref_omega_m")]
        assert abs(n_bare[-1] - NBAR_COLD) < 1e-3

    def test_purity_column_constant(self, sim_dir):
        purity = [float(v) for v in column(sim_dir / "moments_t_tf1.csv", "purity")]
        spread = (max(purity) - min(purity)) / purity[0]
        assert spread < 1e-8


class TestSweep:
    def test_schema_and_exact_match_with_simulate(self, tmp_path):
        out = tmp_path / "out"
        cfg = fast_config(tmp_path)
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        header, rows = read_csv(out / "sweep.csv")
        assert header == [
            "epsilon",
            "t_final",
            "n_bar_final",
            "t_eff_final_K",
            "state_omega_final",
            "ermakov_b_final",
            "status",
            "target_t_eff_K",
            "target_state_omega",
        ]
        assert all(row[6] == "ok" for row in rows)
        by_eps = {row[0]: row for row in rows}
        # the unperturbed sweep cell and the simulated series share the
        # same marching, so the formatted occupations match exactly
        n_bare_series = column(out / "n_bar_t_tf1.csv", "n_bar_ref_omega_m")
        assert by_eps["0"][2] == n_bare_series[-1]
        assert float(by_eps["0"][3]) == pytest.approx(TEFF_FINAL, rel=1e-9)
        # target columns populated on the study points
        assert by_eps["0.1"][7] == "7e-06" and by_eps["0.1"][8] == "1.23"
        assert by_eps["-0.1"][7] == "5e-06" and by_eps["-0.1"][8] == "0.84"

    def test_ground_state_reached_under_error(self, tmp_path):
        out = tmp_path / "out"
        cfg = fast_config(tmp_path)
        assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        _, rows = read_csv(out / "sweep.csv")
        for row in rows:
            if abs(float(row[0])) == 0.1:
                assert float(row[2]) < 1.0


class TestReproduce:
    def test_manifest_deterministic_and_checks_pass(self, tmp_path):
        out = tmp_path / "out"
        cfg = fast_config(tmp_path)
        assert main(["reproduce", "--config", str(cfg), "--out", str(out)]) == 0
        manifest_path = out / "manifest.json"
        first = manifest_path.read_bytes()
        manifest = json.loads(first)
        assert manifest["all_passed"] is True
        # one ramp: 3 design + 3 simulate files, plus sweep and report
        assert len(manifest["files"]) == 8
        assert all(len(digest) == 64 for digest in manifest["files"].values())
        names = {entry["name"] for entry in manifest["checks"]}
        assert {"eta", "n_bar_hot", "n_bar_cold", "t_eff_final_tf1", "occupation_drift_tf1"} <= names

        assert main(["reproduce", "--config", str(cfg), "--out", str(out)]) == 0
        assert manifest_path.read_bytes() == first

    def test_default_config_full_bundle(self, tmp_path):
        # all three ramps: 3 design + 3 simulate file sets, sweep, report
        out = tmp_path / "out"
        assert main(["reproduce", "--out", str(out), "--samples", "41"]) == 0
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        files = set(manifest["files"])
        for label in ("tf0.5", "tf1", "tf2"):
            for stem in ("f_t", "omega_eff_t", "b_t", "n_bar_t", "t_eff_t", "moments_t"):
                assert f"{stem}_{label}.csv" in files
        assert "sweep.csv" in files and "report.json" in files
        assert len(files) == 20
        assert manifest["all_passed"] is True

    def test_failing_target_exits_3(self, tmp_path, capsys):
        out = tmp_path / "out"
        cfg = fast_config(tmp_path, **{"voltage_amplitude = 7.00 V": "voltage_amplitude = 5 V"})
        assert main(["reproduce", "--config", str(cfg), "--out", str(out)]) == 3
        assert "FAIL" in capsys.readouterr().out
        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["all_passed"] is False


class TestExitCodes:
    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["params", "--config", str(tmp_path / "absent.cfg")]) == 1
        assert "config error" in capsys.readouterr().err

    def test_malformed_config(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("mass = 40 stone\n", encoding="utf-8")
        assert main(["params", "--config", str(path)]) == 1
        err = capsys.readouterr().err
        assert "mass" in err and "bad.cfg:1" in err

    def test_design_without_drive_authority(self, tmp_path, capsys):
        cfg = fast_config(tmp_path, **{"voltage_amplitude = 7.00 V": "voltage_amplitude = 0 V"})
        assert main(["design", "--config", str(cfg)]) == 1
        assert "eta" in capsys.readouterr().err

    def test_tolerance_override_validated(self, tmp_path, capsys):
        cfg = fast_config(tmp_path)
        assert main(["design", "--config", str(cfg), "--tol", "0.5"]) == 1
        assert "tolerance" in capsys.readouterr().err
