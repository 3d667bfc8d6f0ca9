"""Deterministic CSV/JSON emission and the reproduction manifest.

All numeric formatting funnels through :func:`format_float` with the
configured significant-digit count, files end with a newline and use LF
endings, and JSON is sorted -- two runs of the same config produce
byte-identical files, which the manifest check relies on.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence


def format_float(value: float, precision: int) -> str:
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return f"{value:.{precision}g}"


def format_row(row: Sequence, precision: int) -> list[str]:
    out = []
    for cell in row:
        if isinstance(cell, float):
            out.append(format_float(cell, precision))
        else:
            out.append("" if cell is None else str(cell))
    return out


def write_table(
    path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence],
    precision: int,
    fmt: str = "csv",
) -> None:
    """Write a table as CSV (default) or as a columnar JSON document."""
    path.parent.mkdir(parents=True, exist_ok=True)
    formatted = [format_row(row, precision) for row in rows]
    if fmt == "csv":
        lines = [",".join(header)]
        lines.extend(",".join(cells) for cells in formatted)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    elif fmt == "json":
        payload = {"columns": list(header), "rows": formatted}
        write_json(path, payload)
    else:
        raise ValueError(f"unknown table format {fmt!r}")


def write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def hash_manifest(out_dir: Path, files: Iterable[Path]) -> dict[str, str]:
    """Relative path -> SHA-256 content hash, sorted by path."""
    entries = {}
    for path in files:
        entries[path.relative_to(out_dir).as_posix()] = sha256_file(path)
    return dict(sorted(entries.items()))


def table_suffix(fmt: str) -> str:
    return ".csv" if fmt == "csv" else ".json"


def tf_label(t_final: float) -> str:
    """Stable filename tag for a ramp time (e.g. 0.5 -> 'tf0.5')."""
    return "tf" + format_float(t_final, 12)


def check_entry(name: str, value: float, target: float, tolerance: float, kind: str) -> dict:
    """One hard-check record.

    kind 'rel'/'abs': |value - target| within tolerance (relative or
    absolute); kind 'upper': value strictly below target (tolerance
    ignored, kept for a uniform record shape).
    """
    if kind == "rel":
        passed = abs(value - target) <= tolerance * abs(target)
    elif kind == "abs":
        passed = abs(value - target) <= tolerance
    elif kind == "upper":
        passed = value < target
    else:
        raise ValueError(f"unknown check kind {kind!r}")
    return {
        "name": name,
        "value": value,
        "target": target,
        "tolerance": tolerance,
        "kind": kind,
        "passed": bool(passed),
    }


def checks_all_passed(checks: Sequence[Mapping]) -> bool:
    return all(entry["passed"] for entry in checks)
