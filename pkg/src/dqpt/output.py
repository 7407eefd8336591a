"""Deterministic CSV/JSON artifact writers.

CSV files are comma separated with a header row and LF line endings.  Floats
are written as shortest round-trip decimals (full double precision), +inf as
the literal ``inf``.  JSON artifacts use sorted keys and a fixed layout so
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .critical import CriticalReport, DeviationSample
from .loschmidt import RateCurve
from .sweep import BatchItem, DiagramGrid


def format_float(x: float) -> str:
    """Shortest decimal that round-trips to the exact double; inf literals."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        raise ValueError("refusing to serialize NaN")
    return np.format_float_positional(x, unique=True, trim="0")


def write_rate_csv(path: Path, curve: RateCurve) -> None:
    lines = ["t,g"]
    for t, g in zip(curve.times, curve.g):
        lines.append(f"{format_float(float(t))},{format_float(float(g))}")
    _write_text(path, "\n".join(lines) + "\n")


def write_diagram_csv(path: Path, grid: DiagramGrid) -> None:
    lines = ["x,y,exists"]
    for i, x in enumerate(grid.x_values):
        for j, y in enumerate(grid.y_values):
            lines.append(f"{format_float(float(x))},{format_float(float(y))},"
                         f"{int(grid.cells[i, j])}")
    _write_text(path, "\n".join(lines) + "\n")


def write_deviation_csv(path: Path, samples: Sequence[DeviationSample]) -> None:
    lines = ["epsilon,g_i"]
    for s in samples:
        lines.append(f"{format_float(s.epsilon)},{format_float(s.g_i)}")
    _write_text(path, "\n".join(lines) + "\n")


def write_json(path: Path, payload: Mapping) -> None:
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2)
    _write_text(path, text + "\n")


def report_payload(report: CriticalReport) -> dict:
    """JSON-ready view of a critical report."""
    return {
        "branches": [
            {
                "k_c": b.k_c,
                "cos_k_c": b.cos_k_c,
                "omega1": b.omega1,
                "parallel_02": b.parallel_02,
                "h0_gapless": b.h0_gapless,
                "h1_gapless": b.h1_gapless,
                "ortho_01": b.ortho_01,
                "ordinary_times": list(b.ordinary_times),
                "tau_star": list(b.tau_star),
            }
            for b in report.branches
        ],
        "orthogonality_12": report.orthogonality_12,
        "parallel_02": report.parallel_02,
        "metamorphic_possible": report.metamorphic_possible,
        "tau": report.tau,
        "tau_match": None if report.tau_match is None else {
            "branch": report.tau_match.branch,
            "n": report.tau_match.n,
            "tau_star": report.tau_match.tau_star,
            "rel_error": report.tau_match.rel_error,
        },
    }


def write_batch(outdir: Path, items: Iterable[BatchItem]) -> Path:
    """One CSV per successful batch item plus a manifest describing all items."""
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = []
    for item in items:
        entry: dict = {"index": item.index, "override": dict(item.override)}
        if item.curve is not None:
            name = f"rate_{item.index:03d}.csv"
            write_rate_csv(outdir / name, item.curve)
            entry["file"] = name
            entry["status"] = "ok"
        else:
            entry["status"] = "error"
            entry["error"] = item.error
        manifest.append(entry)
    manifest_path = outdir / "manifest.json"
    write_json(manifest_path, {"items": manifest})
    return manifest_path


def _jsonable(value):
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        x = float(value)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            raise ValueError("refusing to serialize NaN")
        return x
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def _write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
