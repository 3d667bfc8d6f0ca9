"""Command-line front end.

Subcommands::

    biascool params    [--config F]                 analysis only, no dynamics
    biascool design    [--config F] [--out D] ...   ramp time series per t_final
    biascool simulate  [--config F] [--out D] ...   propagated state time series
    biascool sweep     [--config F] [--out D] ...   drive-error sweep table
    biascool reproduce [--config F] [--out D] ...   everything + manifest + checks

Exit codes: 0 success, 1 configuration error, 2 numeric/integration
failure, 3 hard reproduction check failed.  All outputs are pure
functions of the configuration; two runs write byte-identical files.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__, thermometry
from .config import ConfigError, RunConfig, load_config
from .design import (
    DesignError,
    b_polynomial,
    control_function,
    make_trajectory,
    validate_trajectory,
)
from .dynamics import (
    GaussianState,
    IntegrationError,
    propagate_transfer,
    thermal_state,
    transfer_series,
)
from .outputs import (
    check_entry,
    checks_all_passed,
    format_float,
    hash_manifest,
    table_suffix,
    tf_label,
    write_json,
    write_table,
)
from .physical import ParameterError
from .robustness import REFERENCE_TARGETS, SweepOptions, SweepResult, run_sweep

# Hard-check targets and tolerances for the reproduction run.
CHECK_ETA = (1.25e7, 0.01, "rel")
CHECK_NBAR_HOT = (3.11e3, 0.02, "rel")
CHECK_NBAR_HOT_ROUNDED = (3.1e3, 50.0, "abs")
CHECK_NBAR_COLD = (0.47, 0.01, "abs")
CHECK_TEFF_FINAL = (6e-6, 0.15, "rel")
CHECK_OCCUPATION_DRIFT = (0.0, 1e-3, "abs")
CHECK_SWEEP_GROUND = (1.0, 0.0, "upper")


@dataclass
class CoolingReport:
    """Everything the protocol predicts or measures for one configuration."""

    t_final: tuple[float, ...]
    sample_count: int
    tolerance: float
    eta: float
    chi: float
    omega0_over_omega_m: float
    n_bar_hot: float  # occupation at the bare frequency, bath temperature
    n_bar_cold: float  # occupation once the drive has boosted the frequency
    t_eff_start: float  # K; trivially the bath temperature (consistency echo)
    t_eff_final_predicted: float  # K; from n_bar_cold referenced to omega_m
    validation: dict[str, dict] = field(default_factory=dict)
    # filled by simulation:
    n_bar_final: dict[str, float] = field(default_factory=dict)
    t_eff_final: dict[str, float] = field(default_factory=dict)

    def render(self) -> str:
        lines = [
            f"coupling eta                = {self.eta:.6g}",
            f"scale-factor endpoint chi   = {self.chi:.6g}",
            f"omega_0 / omega_m           = {self.omega0_over_omega_m:.6g}",
            f"occupation at omega_m       = {self.n_bar_hot:.6g}",
            f"occupation at omega_0       = {self.n_bar_cold:.6g}",
            f"T_eff at ramp start         = {self.t_eff_start:.6g} K",
            f"T_eff at ramp end (predict) = {self.t_eff_final_predicted:.6g} K",
        ]
        for label, report in self.validation.items():
            windows = report["negative_omega_sq_windows"]
            lines.append(
                f"ramp {label}: max|f| interior = {report['max_abs_f_interior']:.6g}, "
                f"boundary residuals = ({report['boundary_residual_start']:.2e}, "
                f"{report['boundary_residual_end']:.2e}), "
                f"imaginary-frequency windows = {len(windows)}"
            )
        for label in self.n_bar_final:
            lines.append(
                f"ramp {label}: simulated final occupation = {self.n_bar_final[label]:.6g}, "
                f"T_eff = {self.t_eff_final[label]:.6g} K"
            )
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return asdict(self)


def build_report(cfg: RunConfig) -> CoolingReport:
    """Analysis-only part of the report (closed forms, no propagation)."""
    params = cfg.physical
    eta = params.eta
    omega0_sq = 1.0 + eta
    if omega0_sq <= 0.0:
        raise ConfigError(
            f"eta = {eta:.6g} <= -1: the full drive inverts the potential, no thermal start state"
        )
    n_bar_hot = thermometry.thermal_occupation(params.bare_frequency, params.bath_temperature)
    n_bar_cold = thermometry.thermal_occupation(
        math.sqrt(omega0_sq) * params.bare_frequency, params.bath_temperature
    )
    report = CoolingReport(
        t_final=cfg.protocol.t_final,
        sample_count=cfg.protocol.sample_count,
        tolerance=cfg.protocol.tolerance,
        eta=eta,
        chi=omega0_sq**0.25,
        omega0_over_omega_m=math.sqrt(omega0_sq),
        n_bar_hot=n_bar_hot,
        n_bar_cold=n_bar_cold,
        t_eff_start=thermometry.effective_temperature(
            math.sqrt(omega0_sq) * params.bare_frequency, n_bar_cold
        ),
        t_eff_final_predicted=thermometry.effective_temperature(params.bare_frequency, n_bar_cold),
    )
    if eta != 0.0:
        for t_final in cfg.protocol.t_final:
            traj = make_trajectory(params, t_final)
            val = validate_trajectory(traj, max(cfg.protocol.sample_count, 1001))
            report.validation[tf_label(t_final)] = asdict(val)
    return report


def _out_dir(cfg: RunConfig) -> Path:
    return Path(cfg.output.directory)


def cmd_params(cfg: RunConfig) -> int:
    print(build_report(cfg).render())
    return 0


def _design_files(cfg: RunConfig, out_dir: Path) -> list[Path]:
    output = cfg.output
    suffix = table_suffix(output.format)
    written: list[Path] = []
    for t_final in cfg.protocol.t_final:
        traj = make_trajectory(cfg.physical, t_final)
        label = tf_label(t_final)
        t = np.linspace(0.0, t_final, cfg.protocol.sample_count)
        f = np.asarray(control_function(traj, t))
        w = 1.0 + traj.eta * f
        omega_eff = np.sign(w) * np.sqrt(np.abs(w))
        b, _, _ = b_polynomial(t / t_final, traj.spec.chi)
        for name, series in (("f_t", f), ("omega_eff_t", omega_eff), ("b_t", np.asarray(b))):
            path = out_dir / f"{name}_{label}{suffix}"
            write_table(
                path,
                ("t_omega_m", "value"),
                zip(t.tolist(), series.tolist()),
                output.precision,
                output.format,
            )
            written.append(path)
    return written


def cmd_design(cfg: RunConfig) -> int:
    for path in _design_files(cfg, _out_dir(cfg)):
        print(path)
    return 0


def _simulate_rows(
    cfg: RunConfig, t_final: float
) -> tuple[list[tuple], GaussianState | None, IntegrationError | None]:
    """Per-sample (ThermometryRecord, state, occupation at the bare frequency).

    On integration failure the rows computed so far are returned together
    with the error so callers can write partial output.
    """
    params = cfg.physical
    traj = make_trajectory(params, t_final)
    state0 = thermal_state(params, traj.spec.omega0_sq, params.bath_temperature)
    times = np.linspace(0.0, t_final, cfg.protocol.sample_count).tolist()
    failure: IntegrationError | None = None
    try:
        states, _ = transfer_series(traj, state0, times, tol=cfg.protocol.tolerance)
    except IntegrationError as exc:
        failure = exc
        states = [state0]
        for t_prev, t_next in zip(times, times[1:]):  # slow path, diagnostics only
            try:
                state, _ = propagate_transfer(
                    traj, states[-1], t_prev, t_next, tol=cfg.protocol.tolerance
                )
            except IntegrationError:
                break
            states.append(state)

    rows = []
    for state in states:
        # the reference is the instantaneous nominal drive frequency; in an
        # inverted-potential window no occupation/temperature is defined
        w_ref = traj.omega_eff_sq(state.time)
        if w_ref > 0.0:
            n_inst = thermometry.occupation_from_state(state, w_ref)
            t_eff = thermometry.effective_temperature(
                math.sqrt(w_ref) * params.bare_frequency, n_inst
            )
        else:
            n_inst = math.nan
            t_eff = math.nan
        record = thermometry.ThermometryRecord(
            time=state.time,
            ref_omega_sq=w_ref,
            n_bar=n_inst,
            t_eff=t_eff,
            state_omega_sq=thermometry.state_frequency(state),
        )
        rows.append((record, state, thermometry.occupation_from_state(state, 1.0)))
    return rows, states[-1] if not failure else None, failure


def _simulate_files(
    cfg: RunConfig, out_dir: Path
) -> tuple[list[Path], dict[str, GaussianState], IntegrationError | None]:
    output = cfg.output
    suffix = table_suffix(output.format)
    written: list[Path] = []
    finals: dict[str, GaussianState] = {}
    first_failure: IntegrationError | None = None
    for t_final in cfg.protocol.t_final:
        label = tf_label(t_final)
        rows, final, failure = _simulate_rows(cfg, t_final)
        if failure is not None and first_failure is None:
            first_failure = failure
        if final is not None:
            finals[label] = final

        def emit(name: str, header: tuple[str, ...], table_rows: list[tuple]) -> None:
            path = out_dir / f"{name}_{label}{suffix}"
            write_table(path, header, table_rows, output.precision, output.format)
            if failure is not None and output.format == "csv":
                with path.open("a", encoding="utf-8") as handle:
                    handle.write(f"# integration_error: {failure}\n")
            written.append(path)

        emit(
            "n_bar_t",
            ("t_omega_m", "n_bar_ref_omega_eff", "n_bar_ref_omega_m"),
            [(rec.time, rec.n_bar, n_bare) for rec, _, n_bare in rows],
        )
        emit(
            "t_eff_t",
            ("t_omega_m", "value"),
            [(rec.time, rec.t_eff) for rec, _, _ in rows],
        )
        emit(
            "moments_t",
            ("t_omega_m", "xx", "pp", "xp", "purity"),
            [(s.time, s.xx, s.pp, s.xp, s.purity_invariant) for _, s, _ in rows],
        )
    return written, finals, first_failure


def cmd_simulate(cfg: RunConfig) -> int:
    written, _, failure = _simulate_files(cfg, _out_dir(cfg))
    for path in written:
        print(path)
    if failure is not None:
        print(f"error: {failure}", file=sys.stderr)
        return 2
    return 0


_SWEEP_HEADER = (
    "epsilon",
    "t_final",
    "n_bar_final",
    "t_eff_final_K",
    "state_omega_final",
    "ermakov_b_final",
    "status",
    "target_t_eff_K",
    "target_state_omega",
)


def _sweep_row(result: SweepResult) -> tuple:
    target = next(
        (v for eps, v in REFERENCE_TARGETS.items() if math.isclose(result.epsilon, eps, abs_tol=1e-12)),
        None,
    )
    return (
        result.epsilon,
        result.t_final,
        result.n_bar_final,
        result.t_eff_final,
        result.state_omega_final,
        result.ermakov_b_final,
        result.status.replace(",", ";"),
        target[0] if target else None,
        target[1] if target else None,
    )


def _sweep_file(cfg: RunConfig, out_dir: Path) -> tuple[Path, list[SweepResult]]:
    results = run_sweep(
        cfg.physical,
        cfg.protocol.t_final,
        cfg.sweep.epsilon,
        SweepOptions(tolerance=cfg.protocol.tolerance, initial_state=cfg.sweep.initial_state),
    )
    path = out_dir / f"sweep{table_suffix(cfg.output.format)}"
    write_table(
        path,
        _SWEEP_HEADER,
        [_sweep_row(r) for r in results],
        cfg.output.precision,
        cfg.output.format,
    )
    return path, results


def cmd_sweep(cfg: RunConfig) -> int:
    path, results = _sweep_file(cfg, _out_dir(cfg))
    print(path)
    failed = [r for r in results if r.failed]
    for r in failed:
        print(f"error: eps={r.epsilon} t_final={r.t_final}: {r.status}", file=sys.stderr)
    return 2 if failed else 0


def _reproduce_checks(
    report: CoolingReport, results: list[SweepResult]
) -> list[dict]:
    checks = [
        check_entry("eta", report.eta, *CHECK_ETA),
        check_entry("n_bar_hot", report.n_bar_hot, *CHECK_NBAR_HOT),
        check_entry("n_bar_hot_rounded", report.n_bar_hot, *CHECK_NBAR_HOT_ROUNDED),
        check_entry("n_bar_cold", report.n_bar_cold, *CHECK_NBAR_COLD),
    ]
    for label in sorted(report.n_bar_final):
        checks.append(
            check_entry(f"t_eff_final_{label}", report.t_eff_final[label], *CHECK_TEFF_FINAL)
        )
        drift = report.n_bar_final[label] - report.n_bar_cold
        checks.append(check_entry(f"occupation_drift_{label}", drift, *CHECK_OCCUPATION_DRIFT))
    for result in results:
        if abs(abs(result.epsilon) - 0.1) <= 1e-12 and not result.failed:
            checks.append(
                check_entry(
                    f"sweep_ground_state_eps{format_float(result.epsilon, 6)}_{tf_label(result.t_final)}",
                    result.n_bar_final,
                    *CHECK_SWEEP_GROUND,
                )
            )
    return checks


def cmd_reproduce(cfg: RunConfig) -> int:
    out_dir = _out_dir(cfg)
    report = build_report(cfg)

    written = _design_files(cfg, out_dir)
    sim_written, finals, failure = _simulate_files(cfg, out_dir)
    written.extend(sim_written)
    if failure is not None:
        print(f"error: {failure}", file=sys.stderr)
        return 2
    for label, state in finals.items():
        n_final = thermometry.occupation_from_state(state, 1.0)
        report.n_bar_final[label] = n_final
        report.t_eff_final[label] = thermometry.effective_temperature(
            cfg.physical.bare_frequency, n_final
        )

    sweep_path, results = _sweep_file(cfg, out_dir)
    written.append(sweep_path)

    report_path = out_dir / "report.json"
    write_json(report_path, report.as_dict())
    written.append(report_path)

    checks = _reproduce_checks(report, results)
    manifest = {
        "tool": {"name": "biascool", "version": __version__},
        "config": {
            "physical": cfg.physical.as_dict(),
            "protocol": asdict(cfg.protocol),
            "sweep": asdict(cfg.sweep),
            "output": asdict(cfg.output),
        },
        "files": hash_manifest(out_dir, written),
        "checks": checks,
        "all_passed": checks_all_passed(checks),
    }
    manifest_path = out_dir / "manifest.json"
    write_json(manifest_path, manifest)

    for entry in checks:
        status = "pass" if entry["passed"] else "FAIL"
        print(
            f"{status}  {entry['name']}: value={format_float(entry['value'], 9)} "
            f"target={format_float(entry['target'], 9)} ({entry['kind']} {entry['tolerance']:g})"
        )
    print(manifest_path)
    if not manifest["all_passed"]:
        return 3
    sweep_failures = [r for r in results if r.failed]
    if sweep_failures:
        for r in sweep_failures:
            print(f"error: eps={r.epsilon} t_final={r.t_final}: {r.status}", file=sys.stderr)
        return 2
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="biascool",
        description="Design and verify occupation-preserving bias-voltage cooling ramps.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("params", "Print coupling, boundary frequencies and occupations (no dynamics)."),
        ("design", "Write drive/frequency/scale-factor time series per ramp time."),
        ("simulate", "Propagate the thermal state and write diagnostics time series."),
        ("sweep", "Run the drive-error sweep and write the results table."),
        ("reproduce", "Run design + simulate + sweep, write manifest, check targets."),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="FILE", default=None, help="config file (default: built-in)")
        p.add_argument("--out", metavar="DIR", default=None, help="override output directory")
        p.add_argument("--tol", metavar="X", type=float, default=None, help="override integrator tolerance")
        p.add_argument("--samples", metavar="N", type=int, default=None, help="override sample count")
    return parser


_COMMANDS = {
    "params": cmd_params,
    "design": cmd_design,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg = replace(cfg, output=replace(cfg.output, directory=args.out))
        if args.tol is not None:
            cfg = replace(cfg, protocol=replace(cfg.protocol, tolerance=args.tol))
        if args.samples is not None:
            cfg = replace(cfg, protocol=replace(cfg.protocol, sample_count=args.samples))
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](cfg)
    except (ConfigError, ParameterError, DesignError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except IntegrationError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
