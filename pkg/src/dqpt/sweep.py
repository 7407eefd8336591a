"""Parameter-space scans: existence phase diagrams and batched rate curves.

The diagrams store exact closed-form existence predicates per cell, not
rasterized root scans, so refining the grid never flips a cell.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .critical import kitaev_critical_cos
from .loschmidt import RateCurve, rate_function
from .model import QuenchSchedule, dispersion_from_mapping, momentum_grid
from .thermal import Temperature, thermal_bloch

#: Default per-axis resolution of the existence diagrams.
DIAGRAM_RESOLUTION = 201


@dataclass(frozen=True, eq=False)
class DiagramGrid:
    """Boolean existence map over a 2-d parameter grid."""

    x_label: str
    x_values: np.ndarray
    y_label: str
    y_values: np.ndarray
    cells: np.ndarray  # bool, shape (len(x_values), len(y_values))

    def __post_init__(self) -> None:
        x = np.asarray(self.x_values, dtype=float)
        y = np.asarray(self.y_values, dtype=float)
        cells = np.asarray(self.cells, dtype=bool)
        if np.any(np.diff(x) <= 0) or np.any(np.diff(y) <= 0):
            raise ValueError("axis values must be strictly increasing")
        if cells.shape != (x.size, y.size):
            raise ValueError("cells shape must match the axes")
        object.__setattr__(self, "x_values", x)
        object.__setattr__(self, "y_values", y)
        object.__setattr__(self, "cells", cells)


def ssh_phase_diagram(r1_values, r2_values) -> DiagramGrid:
    """Existence of a critical momentum for SSH stage ratios r_i = j_i1 / j_i2.

    The cell is true iff (r1 - 1) * (r2 - 1) <= 0, i.e. iff the two stages
    have different bulk-band topology (the boundary counts as existing).
    """
    r1 = np.asarray(r1_values, dtype=float)
    r2 = np.asarray(r2_values, dtype=float)
    if np.any(r1 <= 0) or np.any(r2 <= 0):
        raise ValueError("hopping ratios must be positive")
    cells = np.outer(r1 - 1.0, r2 - 1.0) <= 0.0
    return DiagramGrid("j11/j12", r1, "j21/j22", r2, cells)


def kitaev_phase_diagram(m1: float, c1: float, m2_values, c2_values) -> DiagramGrid:
    """Existence of a critical momentum over the (c2, m2) plane at fixed stage 1."""
    m2 = np.asarray(m2_values, dtype=float)
    c2 = np.asarray(c2_values, dtype=float)
    if not (np.all(np.isfinite(m2)) and np.all(np.isfinite(c2))):
        raise ValueError("axis ranges must be finite")
    cells = np.empty((c2.size, m2.size), dtype=bool)
    for i, c2v in enumerate(c2):
        for j, m2v in enumerate(m2):
            cells[i, j] = len(kitaev_critical_cos(m1, c1, float(m2v), float(c2v))) > 0
    return DiagramGrid("c2", c2, "m2", m2, cells)


@dataclass(frozen=True, eq=False)
class BatchItem:
    """Outcome of one override in a batch run: a curve or an error message."""

    index: int
    override: Mapping
    curve: RateCurve | None
    error: str | None


def batch_rate_curves(base: QuenchSchedule, temp: Temperature, n_modes: int,
                      times, overrides: Sequence[Mapping],
                      threads: int = 1) -> list[BatchItem]:
    """Evaluate one rate curve per override of the base schedule.

    An override is a mapping with any of the keys ``tau`` (positive float)
    and ``h0`` / ``h1`` / ``h2`` (model parameter mappings).  Invalid
    overrides yield an error entry; the batch continues.  Output order is the
    override order regardless of the worker count.
    """
    grid = momentum_grid(n_modes)
    base_field = thermal_bloch(base.h0, temp, grid)

    def run(idx_override: tuple[int, Mapping]) -> BatchItem:
        idx, override = idx_override
        try:
            schedule = _apply_override(base, override)
            if schedule.h0 is base.h0:
                field = base_field
            else:
                field = thermal_bloch(schedule.h0, temp, grid)
            curve = rate_function(schedule, field, times)
            return BatchItem(idx, override, curve, None)
        except (KeyError, TypeError, ValueError) as exc:
            return BatchItem(idx, override, None, str(exc))

    jobs = list(enumerate(overrides))
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run, jobs))
    return [run(job) for job in jobs]


def _apply_override(base: QuenchSchedule, override: Mapping) -> QuenchSchedule:
    if not isinstance(override, Mapping):
        raise TypeError(f"override must be a mapping, got {type(override).__name__}")
    unknown = set(override) - {"tau", "h0", "h1", "h2"}
    if unknown:
        raise KeyError(f"unknown override keys: {sorted(unknown)}")
    h0, h1, h2 = base.h0, base.h1, base.h2
    if "h0" in override:
        h0 = dispersion_from_mapping(override["h0"])
    if "h1" in override:
        h1 = dispersion_from_mapping(override["h1"])
    if "h2" in override:
        h2 = dispersion_from_mapping(override["h2"])
    tau = base.tau
    if "tau" in override:
        tau = override["tau"]
        if isinstance(tau, bool) or not isinstance(tau, (int, float)):
            raise TypeError(f"override tau must be a number, got {tau!r}")
        tau = float(tau)
    return QuenchSchedule(h0, h1, h2, tau)
