"""Bloch-vector form of 1D two-band lattice models.

Every supported model reduces, in momentum space, to a 2x2 Hamiltonian

    H(k) = E(k) * 1 + (Delta(k) / 2) * nhat(k) . sigma

with Delta(k) >= 0 the band gap and nhat(k) a unit vector.  This module
provides the alternating-hopping chain (SSH), the p-wave superconducting
chain (Kitaev), and a generic tabulated dispersion sampled on a momentum
grid, all evaluated over the first Brillouin zone [-pi, pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

#: Gap below which the two bands are treated as degenerate (model energy units).
GAP_TOL = 1e-12

#: Placeholder direction at degenerate momenta.  The thermal Bloch vector
#: vanishes there, so this arbitrary choice never propagates into amplitudes.
DEGENERATE_NHAT = (1.0, 0.0, 0.0)


class OffGridError(LookupError):
    """Raised when a tabulated dispersion is queried off its momentum grid."""


@dataclass(frozen=True)
class BlochSample:
    """Per-momentum data of a two-band Hamiltonian.

    Attributes:
        e: energy offset E(k); contributes only a global phase downstream.
        delta: band gap Delta(k), nonnegative.
        nhat: unit direction in Pauli space, unit-norm unless degenerate.
        degenerate: True iff delta < GAP_TOL; nhat is then a placeholder.
    """

    e: float
    delta: float
    nhat: tuple[float, float, float]
    degenerate: bool


@dataclass(frozen=True)
class SshParams:
    """Alternating hopping amplitudes of the SSH chain, both positive."""

    j1: float
    j2: float

    def __post_init__(self) -> None:
        if not (self.j1 > 0 and self.j2 > 0):
            raise ValueError(f"SSH hoppings must be positive, got j1={self.j1}, j2={self.j2}")


@dataclass(frozen=True)
class KitaevParams:
    """Kitaev chain in reduced form: gap scale M > 0 plus the dimensionless
    chemical potential m = mu / (2M) and hopping c = J / M."""

    big_m: float
    m: float
    c: float

    def __post_init__(self) -> None:
        if not self.big_m > 0:
            raise ValueError(f"Kitaev gap scale must be positive, got M={self.big_m}")


@dataclass(frozen=True, eq=False)
class BlochTable:
    """Dispersion tabulated on one Brillouin zone, momenta strictly increasing."""

    momenta: np.ndarray  # (n,)
    e: np.ndarray        # (n,)
    delta: np.ndarray    # (n,)
    nhat: np.ndarray     # (n, 3)

    def __post_init__(self) -> None:
        momenta = np.asarray(self.momenta, dtype=float)
        n = momenta.size
        if n == 0:
            raise ValueError("tabulated dispersion needs at least one momentum")
        if np.any(momenta < -math.pi) or np.any(momenta >= math.pi):
            raise ValueError("tabulated momenta must lie in [-pi, pi)")
        if np.any(np.diff(momenta) <= 0):
            raise ValueError("tabulated momenta must be strictly increasing")
        e = np.asarray(self.e, dtype=float)
        delta = np.asarray(self.delta, dtype=float)
        nhat = np.asarray(self.nhat, dtype=float)
        if e.shape != (n,) or delta.shape != (n,) or nhat.shape != (n, 3):
            raise ValueError("tabulated arrays must share the momentum grid length")
        if np.any(delta < 0):
            raise ValueError("tabulated gaps must be nonnegative")
        object.__setattr__(self, "momenta", momenta)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "nhat", nhat)

    def lookup_index(self, k: float) -> int:
        """Nearest-grid index for momentum k, no interpolation.

        Distances are periodic over the 2*pi zone.  Raises OffGridError when
        the nearest sample is farther than half the typical grid spacing.
        """
        momenta = self.momenta
        if momenta.size == 1:
            idx = 0
            dist = _periodic_distance(k, float(momenta[0]))
            spacing = 2.0 * math.pi
        else:
            pos = int(np.searchsorted(momenta, k))
            candidates = {(pos - 1) % momenta.size, pos % momenta.size}
            idx, dist = min(
                ((i, _periodic_distance(k, float(momenta[i]))) for i in candidates),
                key=lambda item: item[1],
            )
            gaps = np.diff(momenta)
            wrap_gap = float(momenta[0]) + 2.0 * math.pi - float(momenta[-1])
            spacing = float(np.median(np.append(gaps, wrap_gap)))
        if dist > 0.5 * spacing * (1.0 + 1e-9):
            raise OffGridError(
                f"momentum {k!r} is {dist:.3e} away from the nearest tabulated point "
                f"(allowed {0.5 * spacing:.3e})"
            )
        return idx


DispersionParams = Union[SshParams, KitaevParams, BlochTable]


@dataclass(frozen=True)
class BlochDispersion:
    """Tagged union over the supported model parameterizations."""

    kind: str  # "ssh" | "kitaev" | "tabulated"
    params: DispersionParams

    def __post_init__(self) -> None:
        expected = {"ssh": SshParams, "kitaev": KitaevParams, "tabulated": BlochTable}
        if self.kind not in expected:
            raise ValueError(f"unknown dispersion kind {self.kind!r}")
        if not isinstance(self.params, expected[self.kind]):
            raise TypeError(f"params {type(self.params).__name__} do not match kind {self.kind!r}")

    @classmethod
    def ssh(cls, j1: float, j2: float) -> "BlochDispersion":
        return cls("ssh", SshParams(j1, j2))

    @classmethod
    def kitaev(cls, big_m: float, m: float, c: float) -> "BlochDispersion":
        return cls("kitaev", KitaevParams(big_m, m, c))

    @classmethod
    def tabulated(cls, momenta, e, delta, nhat) -> "BlochDispersion":
        return cls("tabulated", BlochTable(momenta, e, delta, nhat))


@dataclass(frozen=True)
class QuenchSchedule:
    """Double-quench protocol: evolve under h1 for a duration tau, then h2.

    h0 defines the pre-quench equilibrium state.
    """

    h0: BlochDispersion
    h1: BlochDispersion
    h2: BlochDispersion
    tau: float

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise ValueError(f"inter-quench duration must be positive, got tau={self.tau}")


def ssh_bloch(p: SshParams, k: float) -> BlochSample:
    """SSH dispersion at momentum k.

    Delta(k) = 2*sqrt(j1^2 + j2^2 + 2*j1*j2*cos k) and the Bloch direction
    lies in the xy-plane: nhat = (2/Delta) * (-j1 - j2*cos k, j2*sin k, 0).
    """
    cos_k = math.cos(k)
    delta = 2.0 * math.sqrt(max(p.j1 * p.j1 + p.j2 * p.j2 + 2.0 * p.j1 * p.j2 * cos_k, 0.0))
    if delta < GAP_TOL:
        return BlochSample(0.0, delta, DEGENERATE_NHAT, True)
    scale = 2.0 / delta
    nhat = (scale * (-p.j1 - p.j2 * cos_k), scale * (p.j2 * math.sin(k)), 0.0)
    return BlochSample(0.0, delta, nhat, False)


def kitaev_bloch(p: KitaevParams, k: float) -> BlochSample:
    """Kitaev dispersion at momentum k.

    Delta(k) = 2*M*sqrt((c*cos k - m)^2 + sin^2 k) with the Bloch direction
    in the yz-plane: nhat = (2M/Delta) * (0, -sin k, -m + c*cos k).
    """
    cos_k = math.cos(k)
    sin_k = math.sin(k)
    z = p.c * cos_k - p.m
    delta = 2.0 * p.big_m * math.sqrt(z * z + sin_k * sin_k)
    if delta < GAP_TOL:
        return BlochSample(0.0, delta, DEGENERATE_NHAT, True)
    scale = 2.0 * p.big_m / delta
    nhat = (0.0, -scale * sin_k, scale * z)
    return BlochSample(0.0, delta, nhat, False)


def eval_dispersion(d: BlochDispersion, k: float) -> BlochSample:
    """Evaluate a dispersion of any kind at momentum k in [-pi, pi)."""
    if d.kind == "ssh":
        return ssh_bloch(d.params, k)
    if d.kind == "kitaev":
        return kitaev_bloch(d.params, k)
    table: BlochTable = d.params
    i = table.lookup_index(k)
    delta = float(table.delta[i])
    if delta < GAP_TOL:
        return BlochSample(float(table.e[i]), delta, DEGENERATE_NHAT, True)
    nh = table.nhat[i]
    return BlochSample(float(table.e[i]), delta, (float(nh[0]), float(nh[1]), float(nh[2])), False)


def momentum_grid(n: int) -> np.ndarray:
    """Uniform Brillouin-zone grid k_j = -pi + 2*pi*j/n, j = 0..n-1."""
    if n < 1:
        raise ValueError(f"grid size must be >= 1, got {n}")
    return -math.pi + 2.0 * math.pi * np.arange(n) / n


def table_from_dispersion(d: BlochDispersion, momenta) -> BlochDispersion:
    """Sample a dispersion on a grid and wrap the result as a tabulated model."""
    momenta = np.asarray(momenta, dtype=float)
    samples = [eval_dispersion(d, float(k)) for k in momenta]
    return BlochDispersion.tabulated(
        momenta,
        np.array([s.e for s in samples]),
        np.array([s.delta for s in samples]),
        np.array([s.nhat for s in samples]),
    )


def winding_number(d: BlochDispersion, n_k: int = 4096) -> int:
    """Signed winding of (nhat_x, nhat_y) around the origin over one zone.

    Only meaningful for gapped planar dispersions (such as SSH); raises if a
    degenerate momentum is encountered on the sampling grid.
    """
    ks = momentum_grid(n_k)
    w = np.empty(n_k, dtype=complex)
    for i, k in enumerate(ks):
        s = eval_dispersion(d, float(k))
        if s.degenerate:
            raise ValueError(f"winding undefined: gap closes near k={k:.6f}")
        w[i] = complex(s.nhat[0], s.nhat[1])
    ratios = np.roll(w, -1) / w
    total = float(np.sum(np.angle(ratios)))
    return round(total / (2.0 * math.pi))


def dispersion_from_mapping(m: Mapping, default_kind: str | None = None) -> BlochDispersion:
    """Build a dispersion from a plain mapping (the CLI config entry format).

    Structural problems raise KeyError/TypeError; parameter-constraint
    violations (e.g. nonpositive hoppings) raise ValueError.
    """
    if not isinstance(m, Mapping):
        raise TypeError(f"expected a mapping for a Hamiltonian entry, got {type(m).__name__}")
    kind = m.get("model", default_kind)
    if kind is None:
        raise KeyError("Hamiltonian entry needs a 'model' key (ssh | kitaev | tabulated)")
    if kind == "ssh":
        return BlochDispersion.ssh(_as_real(m, "j1"), _as_real(m, "j2"))
    if kind == "kitaev":
        return BlochDispersion.kitaev(_as_real(m, "M"), _as_real(m, "m"), _as_real(m, "c"))
    if kind == "tabulated":
        momenta = _as_seq(m, "momenta")
        n = len(momenta)
        e = _as_seq(m, "e") if "e" in m else [0.0] * n
        return BlochDispersion.tabulated(momenta, e, _as_seq(m, "delta"), _as_seq(m, "nhat"))
    raise KeyError(f"unknown model kind {kind!r}")


def _as_real(m: Mapping, key: str) -> float:
    if key not in m:
        raise KeyError(f"missing model parameter {key!r}")
    value = m[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TypeError(f"model parameter {key!r} must be a number, got {value!r}")
    return float(value)


def _as_seq(m: Mapping, key: str) -> Sequence:
    if key not in m:
        raise KeyError(f"missing tabulated field {key!r}")
    value = m[key]
    if not isinstance(value, (list, tuple, np.ndarray)):
        raise TypeError(f"tabulated field {key!r} must be a sequence")
    return value


def _periodic_distance(a: float, b: float) -> float:
    d = abs(a - b) % (2.0 * math.pi)
    return min(d, 2.0 * math.pi - d)
