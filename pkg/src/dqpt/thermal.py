"""Thermal initial state of the pre-quench Hamiltonian as a Bloch-vector field.

The equilibrium density matrix of a two-band mode factorizes per momentum as
rho_k = (1 + nvec_k . sigma) / 2 with nvec_k = -tanh(beta * Delta0(k) / 2) * nhat0(k).
Only the vector field is stored here; explicit 2x2 matrices live in the
oracle module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import BlochDispersion, BlochSample, eval_dispersion


@dataclass(frozen=True)
class Temperature:
    """Inverse temperature beta = 1/T with k_B = 1.

    beta = math.inf encodes T = 0 exactly, so the ground-state limit is taken
    symbolically instead of through a saturating tanh.
    """

    beta: float

    def __post_init__(self) -> None:
        if math.isnan(self.beta) or self.beta < 0:
            raise ValueError(f"inverse temperature must be >= 0, got beta={self.beta}")

    @classmethod
    def from_beta(cls, beta: float) -> "Temperature":
        return cls(float(beta))

    @classmethod
    def from_temperature(cls, t: float) -> "Temperature":
        """T = 0 maps to beta = +inf; negative temperatures are rejected."""
        if math.isnan(t) or t < 0:
            raise ValueError(f"temperature must be >= 0, got T={t}")
        return cls(math.inf if t == 0 else 1.0 / float(t))

    @property
    def is_zero_temperature(self) -> bool:
        return math.isinf(self.beta)


@dataclass(frozen=True, eq=False)
class ThermalBlochField:
    """Initial-state Bloch vectors nvec_k sampled on a momentum grid."""

    grid: np.ndarray  # (n,)
    nvec: np.ndarray  # (n, 3)

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        nvec = np.asarray(self.nvec, dtype=float)
        if nvec.shape != (grid.size, 3):
            raise ValueError("nvec must have shape (len(grid), 3)")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "nvec", nvec)


def bloch_vector(sample: BlochSample, temp: Temperature) -> tuple[float, float, float]:
    """Thermal Bloch vector of a single mode: -tanh(beta*Delta/2) * nhat.

    Degenerate modes carry a vanishing vector at every temperature, including
    beta = +inf where the two levels are equally occupied.
    """
    if sample.degenerate:
        return (0.0, 0.0, 0.0)
    if temp.is_zero_temperature:
        weight = 1.0
    else:
        weight = math.tanh(0.5 * temp.beta * sample.delta)
    nx, ny, nz = sample.nhat
    return (-weight * nx, -weight * ny, -weight * nz)


def thermal_bloch(h0: BlochDispersion, temp: Temperature, grid) -> ThermalBlochField:
    """Sample the thermal Bloch field of h0 on a momentum grid."""
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("momentum grid must be nonempty")
    nvec = np.empty((grid.size, 3))
    for i, k in enumerate(grid):
        nvec[i] = bloch_vector(eval_dispersion(h0, float(k)), temp)
    return ThermalBlochField(grid, nvec)
