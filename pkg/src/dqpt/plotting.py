"""Figure rendering for the report path (PNG files next to the CSV output).

matplotlib is imported lazily with the Agg backend so headless runs and
figure-free subcommands stay fast.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import numpy as np

from .critical import DeviationSample
from .loschmidt import RateCurve
from .sweep import DiagramGrid


def _pyplot():
    import matplotlib
    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt
    return plt


def save_rate_figure(path: Path, curve: RateCurve, kinks: Sequence[float] = ()) -> None:
    """Rate function vs time; the second quench is a vertical line and any
    metamorphic (diverging) region is shaded."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    finite = np.isfinite(curve.g)
    ax.plot(curve.times[finite], curve.g[finite], lw=1.2, color="tab:blue")
    if curve.times[0] <= curve.tau <= curve.times[-1]:
        ax.axvline(curve.tau, color="tab:red", lw=1.0, label=r"$\tau$")
    if np.any(~finite):
        t_inf = curve.times[~finite]
        ax.axvspan(float(t_inf.min()), float(curve.times[-1]), color="0.85",
                   label="divergent")
    for k in kinks:
        ax.axvline(k, color="tab:orange", lw=0.8, ls=":")
    ax.set_xlabel(r"$t$")
    ax.set_ylabel(r"$g(t)$")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_diagram_figure(path: Path, grid: DiagramGrid) -> None:
    """Existence region as a filled map over the parameter plane."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    ax.pcolormesh(grid.x_values, grid.y_values, grid.cells.T.astype(float),
                  shading="nearest", cmap="Blues", vmin=0.0, vmax=1.4)
    ax.set_xlabel(grid.x_label)
    ax.set_ylabel(grid.y_label)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_deviation_figure(path: Path, samples: Sequence[DeviationSample]) -> None:
    """Singular rate contribution vs duration offset on a log |eps| axis."""
    plt = _pyplot()
    eps = np.array([abs(s.epsilon) for s in samples])
    gi = np.array([s.g_i for s in samples])
    finite = np.isfinite(gi) & (eps > 0)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogx(eps[finite], gi[finite], marker=".", ls="-", lw=0.9, ms=4,
                color="tab:blue")
    ax.set_xlabel(r"$|\epsilon|$")
    ax.set_ylabel(r"$g_i$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
