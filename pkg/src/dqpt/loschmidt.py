"""Loschmidt amplitudes and the rate function for double-quench protocols.

Per momentum the amplitude is the trace of the initial density matrix times
the evolution operator.  With nvec the thermal Bloch vector, n1/n2 the
post-quench directions, and omega = Delta/2 the half-gap frequencies
(hbar = 1), the Pauli algebra closes to

    stage 1 (t < tau):   G_k = cos(w1 t) - i sin(w1 t) (nvec . n1)
    stage 2 (t >= tau):  G_k = a1 a2 - b1 b2 (n1 . n2)
                               - i [a1 b2 (nvec . n2) + a2 b1 (nvec . n1)
                                    - b1 b2 nvec . (n1 x n2)]

with a1 = cos(w1 tau), b1 = sin(w1 tau), a2 = cos(w2 (t - tau)),
b2 = sin(w2 (t - tau)).  Band offsets E(k) only contribute unit-modulus
phases, which are dropped; G_k(0) = 1 in this convention.

The full amplitude is the product over modes, accumulated in log space.  The
rate function is g(t) = -(2/N) * sum_k ln|G_k(t)| and is +inf whenever some
mode's amplitude vanishes, which is the fingerprint of a metamorphic
transition persisting for all t > tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import QuenchSchedule, eval_dispersion
from .thermal import ThermalBlochField

#: Per-mode amplitude modulus below which the factor counts as an exact zero.
ZERO_TOL = 1e-14

#: Default second-difference threshold multiplier for kink detection.
KINK_THRESHOLD = 60.0

#: Grid steps around the second-quench time excluded from kink detection
#: (the quench itself always imprints a slope discontinuity).
KINK_TAU_GUARD_STEPS = 5


@dataclass(frozen=True)
class StageFrequencies:
    """Half-gap precession frequencies omega = Delta/2 of the two stages."""

    omega1: float
    omega2: float

    def __post_init__(self) -> None:
        if self.omega1 < 0 or self.omega2 < 0:
            raise ValueError("stage frequencies must be nonnegative")


@dataclass(frozen=True, eq=False)
class RateCurve:
    """Rate function sampled on a time grid; +inf marks metamorphic samples."""

    times: np.ndarray
    g: np.ndarray
    tau: float
    n_modes: int

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if times.ndim != 1 or g.shape != times.shape:
            raise ValueError("times and g must be 1-d arrays of equal length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.n_modes < 1:
            raise ValueError("n_modes must be positive")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "g", g)


def amplitude_stage1_k(nvec, omega1: float, n1hat, t: float) -> complex:
    """Single-mode amplitude during the first stage (0 <= t < tau)."""
    s1 = _dot3(nvec, n1hat)
    wt = omega1 * t
    return complex(math.cos(wt), -math.sin(wt) * s1)


def amplitude_stage2_k(nvec, omega1: float, n1hat, tau: float,
                       omega2: float, n2hat, t: float) -> complex:
    """Single-mode amplitude after the second quench (t >= tau)."""
    a1 = math.cos(omega1 * tau)
    b1 = math.sin(omega1 * tau)
    dt = omega2 * (t - tau)
    a2 = math.cos(dt)
    b2 = math.sin(dt)
    d12 = _dot3(n1hat, n2hat)
    s1 = _dot3(nvec, n1hat)
    s2 = _dot3(nvec, n2hat)
    trip = _dot3(nvec, _cross3(n1hat, n2hat))
    re = a1 * a2 - b1 * b2 * d12
    im = -(a1 * b2 * s2 + a2 * b1 * s1) + b1 * b2 * trip
    return complex(re, im)


def amplitude_full(schedule: QuenchSchedule, field: ThermalBlochField,
                   t: float) -> tuple[float, float]:
    """Log-modulus and phase of the full amplitude at time t.

    Returns (sum_k ln|G_k(t)|, sum_k arg G_k(t)), both accumulated in
    ascending mode order; the log-modulus is -inf iff some mode's amplitude
    vanishes (modulus below ZERO_TOL).  Band-offset phases are excluded.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got t={t}")
    terms = _mode_terms(schedule, field)
    re, im = _stage_components(terms, schedule.tau, t)
    m2 = re * re + im * im
    phase = math.fsum(np.arctan2(im, re).tolist())
    if float(m2.min()) < ZERO_TOL * ZERO_TOL:
        return -math.inf, phase
    return 0.5 * math.fsum(np.log(m2).tolist()), phase


def rate_function(schedule: QuenchSchedule, field: ThermalBlochField,
                  times) -> RateCurve:
    """Rate function g(t) = -(2/N) sum_k ln|G_k(t)| over a time grid.

    The per-mode factors are precomputed once (they depend on time only
    through cos/sin of the stage frequencies), so the sweep over the time
    grid is a vectorized kernel over all modes.  Summation uses compensated
    (exact) accumulation, making repeated evaluations bit-identical.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a nonempty 1-d array")
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    if times.size > 1 and np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")

    terms = _mode_terms(schedule, field)
    n = field.grid.size
    zero2 = ZERO_TOL * ZERO_TOL
    g = np.empty(times.size)
    for j, t in enumerate(times):
        re, im = _stage_components(terms, schedule.tau, float(t))
        m2 = re * re + im * im
        if float(m2.min()) < zero2:
            g[j] = math.inf
        else:
            g[j] = -(1.0 / n) * math.fsum(np.log(m2).tolist())
    return RateCurve(times, g, schedule.tau, n)


def detect_kinks(curve: RateCurve, threshold: float = KINK_THRESHOLD,
                 tau_guard_steps: int = KINK_TAU_GUARD_STEPS) -> np.ndarray:
    """Locate sharp nonanalytic points of a rate curve on a uniform time grid.

    A sample is flagged when the discrete second difference of g exceeds
    ``threshold`` times a robust scale (the median absolute second difference
    of the regular part of the curve).  Samples adjacent to +inf entries are
    excluded, as are samples within ``tau_guard_steps`` grid steps of the
    second quench, whose slope discontinuity is not a transition.  Flagged
    runs are merged and each run is reported by its strongest sample.
    """
    times = curve.times
    if times.size < 3:
        return np.empty(0)
    dt = np.diff(times)
    dt_mean = float(dt.mean())
    if float(np.abs(dt - dt_mean).max()) > 1e-9 * dt_mean:
        raise ValueError("kink detection requires a uniform time grid")

    g = curve.g
    finite = np.isfinite(g)
    interior = finite[1:-1] & finite[:-2] & finite[2:]
    gg = np.where(finite, g, 0.0)
    d2 = np.where(interior, np.abs(gg[:-2] - 2.0 * gg[1:-1] + gg[2:]), 0.0)
    valid = interior.copy()
    guard = tau_guard_steps * dt_mean
    valid &= np.abs(times[1:-1] - curve.tau) > guard

    if not np.any(valid):
        return np.empty(0)
    scale = float(np.median(d2[valid]))
    floor = 1e-12 * max(1.0, float(np.abs(g[finite]).max(initial=0.0)))
    cut = threshold * max(scale, floor)
    flagged = np.flatnonzero(valid & (d2 > cut))
    if flagged.size == 0:
        return np.empty(0)

    # Merge runs of nearby flagged samples into one event each.
    kinks = []
    start = 0
    for i in range(1, flagged.size + 1):
        if i == flagged.size or flagged[i] - flagged[i - 1] > 2:
            run = flagged[start:i]
            best = run[np.argmax(d2[run])]
            kinks.append(times[best + 1])
            start = i
    return np.asarray(kinks)


@dataclass(eq=False)
class _ModeTerms:
    # Time-independent per-mode inputs to the two stage formulas.
    omega1: np.ndarray
    omega2: np.ndarray
    s1: np.ndarray     # nvec . n1
    s2: np.ndarray     # nvec . n2
    d12: np.ndarray    # n1 . n2
    trip: np.ndarray   # nvec . (n1 x n2)
    a1: np.ndarray     # cos(omega1 * tau)
    b1: np.ndarray     # sin(omega1 * tau)


def _mode_terms(schedule: QuenchSchedule, field: ThermalBlochField) -> _ModeTerms:
    n = field.grid.size
    omega1 = np.empty(n)
    omega2 = np.empty(n)
    s1 = np.empty(n)
    s2 = np.empty(n)
    d12 = np.empty(n)
    trip = np.empty(n)
    for i, k in enumerate(field.grid):
        x1 = eval_dispersion(schedule.h1, float(k))
        x2 = eval_dispersion(schedule.h2, float(k))
        nv = field.nvec[i]
        n1 = x1.nhat
        n2 = x2.nhat
        omega1[i] = 0.5 * x1.delta
        omega2[i] = 0.5 * x2.delta
        s1[i] = _dot3(nv, n1)
        s2[i] = _dot3(nv, n2)
        d12[i] = _dot3(n1, n2)
        trip[i] = _dot3(nv, _cross3(n1, n2))
    a1 = np.cos(omega1 * schedule.tau)
    b1 = np.sin(omega1 * schedule.tau)
    return _ModeTerms(omega1, omega2, s1, s2, d12, trip, a1, b1)


def _stage_components(terms: _ModeTerms, tau: float, t: float) -> tuple[np.ndarray, np.ndarray]:
    if t < tau:
        wt = terms.omega1 * t
        re = np.cos(wt)
        im = -np.sin(wt) * terms.s1
        return re, im
    dt = terms.omega2 * (t - tau)
    a2 = np.cos(dt)
    b2 = np.sin(dt)
    b1b2 = terms.b1 * b2
    re = terms.a1 * a2 - b1b2 * terms.d12
    im = -(terms.a1 * b2 * terms.s2 + a2 * terms.b1 * terms.s1) + b1b2 * terms.trip
    return re, im


def _dot3(a, b) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross3(a, b) -> tuple[float, float, float]:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )
