"""Critical momenta, transition times, and metamorphic-condition checks.

Ordinary transitions of the first stage happen at t*_n = (n*pi + pi/2) / w1(k_c)
where the initial Bloch vector is orthogonal to the stage-1 direction.  The
metamorphic mechanism needs a momentum where the two post-quench directions
are orthogonal (n1 . n2 = 0) while the initial vector is parallel to n2; if
the inter-quench duration hits tau* = (n*pi + pi/2) / w1(k_c), the amplitude
vanishes identically for every later time.

For SSH and Kitaev schedules the orthogonality momenta have closed forms in
cos k; a generic scan-and-bisect root finder covers tabulated or mixed
schedules and doubles as an independent cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import (
    BlochDispersion,
    KitaevParams,
    QuenchSchedule,
    SshParams,
    eval_dispersion,
)
from .thermal import Temperature

#: Per-mode amplitude modulus treated as an exact zero (shared with loschmidt).
from .loschmidt import ZERO_TOL

#: |f| threshold accepting a tangential (non-sign-changing) zero of n1 . n2.
TANGENT_TOL = 1e-9

#: Default parallelism tolerance for |n0 x n2| at a critical momentum.
PARALLEL_TOL = 1e-9

#: Default relative tolerance for recognizing tau as one of the tau*_n.
TAU_MATCH_TOL = 1e-9

#: Relative tau mismatch below which the CLI warns about a near-miss.
TAU_NEAR_MISS = 0.05

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DeviationSample:
    """Singular rate-function contribution at duration offset epsilon."""

    epsilon: float
    g_i: float


@dataclass(frozen=True)
class CriticalBranch:
    """One critical momentum (canonical representative k_c in [0, pi]).

    Mirrors at -k_c carry identical data by parity.  ``ordinary_times`` and
    ``tau_star`` are empty when the stage-1 gap closes at k_c.
    """

    k_c: float
    cos_k_c: float
    omega1: float
    parallel_02: bool
    h0_gapless: bool
    h1_gapless: bool
    ortho_01: float          # |n0 . n1| diagnostic at k_c
    ordinary_times: tuple[float, ...]
    tau_star: tuple[float, ...]


@dataclass(frozen=True)
class TauMatch:
    """Record of schedule.tau coinciding with a metamorphic duration."""

    branch: int
    n: int
    tau_star: float
    rel_error: float


@dataclass(frozen=True)
class CriticalReport:
    """Critical momenta with transition times and condition diagnostics."""

    branches: tuple[CriticalBranch, ...]
    orthogonality_12: bool
    parallel_02: bool
    metamorphic_possible: bool
    tau: float
    tau_match: TauMatch | None

    @property
    def k_c_list(self) -> tuple[float, ...]:
        return tuple(b.k_c for b in self.branches)

    @property
    def ordinary_times(self) -> dict[float, tuple[float, ...]]:
        return {b.k_c: b.ordinary_times for b in self.branches}

    @property
    def tau_star(self) -> dict[float, tuple[float, ...]]:
        return {b.k_c: b.tau_star for b in self.branches}

    def roots_in_zone(self) -> np.ndarray:
        """All critical momenta in [-pi, pi), mirrors included."""
        roots = []
        for b in self.branches:
            k = b.k_c
            roots.append(-math.pi if k >= math.pi else k)
            if 0.0 < k < math.pi:
                roots.append(-k)
        return np.sort(np.asarray(roots))


def ssh_critical_cos(j11: float, j12: float, j21: float, j22: float) -> float | None:
    """cos k_c solving n1 . n2 = 0 for an SSH pair, or None when out of range.

    The root exists exactly when (j11 - j12) * (j21 - j22) <= 0, i.e. when the
    two stages carry different bulk-band topology.
    """
    for name, v in (("j11", j11), ("j12", j12), ("j21", j21), ("j22", j22)):
        if not v > 0:
            raise ValueError(f"SSH hopping {name} must be positive, got {v}")
    x = -(j11 * j21 + j12 * j22) / (j11 * j22 + j12 * j21)
    if -1.0 <= x <= 1.0:
        return x
    return None


def kitaev_critical_cos(m1: float, c1: float, m2: float, c2: float) -> tuple[float, ...]:
    """Real roots y = cos k_c of sin^2 k + (m1 - c1 cos k)(m2 - c2 cos k) = 0.

    The quadratic (c1 c2 - 1) y^2 - (m1 c2 + m2 c1) y + (1 + m1 m2) = 0 is
    solved in the numerically stable form; a vanishing leading coefficient
    degenerates to the linear root.  Returns 0, 1, or 2 values in [-1, 1],
    larger root first; roots within 1e-12 of +-1 are snapped to the endpoint.
    """
    a = c1 * c2 - 1.0
    b = -(m1 * c2 + m2 * c1)
    c = 1.0 + m1 * m2
    if a == 0.0:
        if b == 0.0:
            return ()
        roots = [-c / b]
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            return ()
        sqrt_disc = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(sqrt_disc, b if b != 0.0 else 1.0))
        if q == 0.0:
            roots = [0.0]
        else:
            roots = [q / a, c / q]
    snapped = []
    for y in roots:
        if abs(y - 1.0) < 1e-12:
            y = 1.0
        elif abs(y + 1.0) < 1e-12:
            y = -1.0
        if -1.0 <= y <= 1.0:
            snapped.append(y)
    snapped = sorted(set(snapped), reverse=True)
    return tuple(snapped)


def find_orthogonal_momenta(da: BlochDispersion, db: BlochDispersion,
                            n_scan: int = 512) -> np.ndarray:
    """All roots of f(k) = nA(k) . nB(k) on [-pi, pi).

    Sign changes on an n_scan grid are bracketed and bisected to machine
    width; tangential zeros, which never change sign, are picked up as local
    minima of |f| refined below TANGENT_TOL.  Returns sorted momenta; empty
    when the directions are nowhere orthogonal.
    """
    if n_scan < 64:
        raise ValueError(f"n_scan must be >= 64, got {n_scan}")

    def f(k: float) -> float:
        if k >= math.pi:
            k -= _TWO_PI
        sa = eval_dispersion(da, k)
        sb = eval_dispersion(db, k)
        na, nb = sa.nhat, sb.nhat
        return na[0] * nb[0] + na[1] * nb[1] + na[2] * nb[2]

    ks = -math.pi + _TWO_PI * np.arange(n_scan) / n_scan
    fs = np.array([f(float(k)) for k in ks])

    roots: list[float] = []
    bracketed = np.zeros(n_scan, dtype=bool)
    for i in range(n_scan):
        j = (i + 1) % n_scan
        fi, fj = float(fs[i]), float(fs[j])
        if fi == 0.0:
            roots.append(float(ks[i]))
            bracketed[i] = True
            continue
        if fi * fj < 0.0:
            lo = float(ks[i])
            hi = float(ks[i] + _TWO_PI / n_scan)
            roots.append(_bisect(f, lo, hi, fi))
            bracketed[i] = True
            bracketed[j] = True

    # Tangential zeros: grid-local minima of |f| away from brackets.
    absf = np.abs(fs)
    for i in range(n_scan):
        if bracketed[i] or bracketed[(i - 1) % n_scan] or bracketed[(i + 1) % n_scan]:
            continue
        if absf[i] <= absf[(i - 1) % n_scan] and absf[i] <= absf[(i + 1) % n_scan]:
            lo = float(ks[i] - _TWO_PI / n_scan)
            hi = float(ks[i] + _TWO_PI / n_scan)
            k_min, f_min = _minimize_abs(f, lo, hi)
            if f_min < TANGENT_TOL:
                roots.append(k_min)

    roots = [_wrap_zone(k) for k in roots]
    roots.sort()
    deduped: list[float] = []
    for k in roots:
        if not deduped or k - deduped[-1] > 1e-10:
            deduped.append(k)
    # Drop a duplicate across the zone seam (k near pi vs -pi).
    if len(deduped) > 1 and deduped[0] + _TWO_PI - deduped[-1] < 1e-10:
        deduped.pop()
    return np.asarray(deduped)


def ordinary_dqpt_times(omega1_at_kc: float, n_max: int) -> np.ndarray:
    """Critical times t*_n = (n*pi + pi/2) / omega1 for n = 0..n_max."""
    if not omega1_at_kc > 0:
        raise ValueError("gapless critical mode: no finite transition times")
    n = np.arange(n_max + 1)
    return (n * math.pi + 0.5 * math.pi) / omega1_at_kc


def metamorphic_tau(omega1_at_kc: float, n: int) -> float:
    """Inter-quench duration tau*_n = (n*pi + pi/2) / omega1."""
    if not omega1_at_kc > 0:
        raise ValueError("gapless critical mode: no finite metamorphic duration")
    if n < 0:
        raise ValueError(f"branch order must be >= 0, got n={n}")
    return (n * math.pi + 0.5 * math.pi) / omega1_at_kc


def critical_branches(h0: BlochDispersion, h1: BlochDispersion, h2: BlochDispersion,
                      tol: float = PARALLEL_TOL, n_scan: int = 512,
                      n_max: int = 3) -> tuple[CriticalBranch, ...]:
    """Critical momenta of the (h1, h2) pair with per-branch diagnostics.

    Branches are the canonical representatives k_c in [0, pi], ascending.
    Closed forms are used for pure SSH or pure Kitaev pairs; other pairs fall
    back to the generic root scan.
    """
    cos_vals = _closed_form_cos(h1, h2)
    if cos_vals is not None:
        reps = sorted(math.acos(y) for y in cos_vals)
    else:
        roots = find_orthogonal_momenta(h1, h2, n_scan)
        reps = sorted({abs(float(k)) if float(k) > -math.pi else math.pi for k in roots})
        merged: list[float] = []
        for k in reps:
            if not merged or k - merged[-1] > 1e-9:
                merged.append(k)
        reps = merged

    branches = []
    for k_c in reps:
        s0 = eval_dispersion(h0, _wrap_zone(k_c))
        s1 = eval_dispersion(h1, _wrap_zone(k_c))
        s2 = eval_dispersion(h2, _wrap_zone(k_c))
        omega1 = 0.5 * s1.delta
        if s0.degenerate:
            # Vanishing thermal vector: the parallel condition holds trivially.
            parallel = True
        elif s2.degenerate:
            parallel = False
        else:
            parallel = _cross_norm(s0.nhat, s2.nhat) < tol
        ortho_01 = 0.0 if s0.degenerate else abs(_dot3(s0.nhat, s1.nhat))
        if s1.degenerate or omega1 <= 0.0:
            times: tuple[float, ...] = ()
            stars: tuple[float, ...] = ()
        else:
            times = tuple(float(t) for t in ordinary_dqpt_times(omega1, n_max))
            stars = tuple(metamorphic_tau(omega1, n) for n in range(n_max + 1))
        branches.append(CriticalBranch(
            k_c=float(k_c),
            cos_k_c=math.cos(k_c) if cos_vals is None else _cos_of(k_c, cos_vals),
            omega1=float(omega1),
            parallel_02=bool(parallel),
            h0_gapless=bool(s0.degenerate),
            h1_gapless=bool(s1.degenerate),
            ortho_01=float(ortho_01),
            ordinary_times=times,
            tau_star=stars,
        ))
    return tuple(branches)


def check_metamorphic_conditions(schedule: QuenchSchedule, temp: Temperature,
                                 tol: float = PARALLEL_TOL, n_scan: int = 512,
                                 n_max: int = 3,
                                 tau_match_tol: float = TAU_MATCH_TOL) -> CriticalReport:
    """Assemble the full critical report for a schedule.

    The geometric conditions depend on the Bloch directions only, so the
    temperature enters just through the convention that a gapless h0 mode
    carries a vanishing thermal vector (making the parallel condition moot).
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    del temp  # directions are temperature independent; kept for call symmetry
    branches = critical_branches(schedule.h0, schedule.h1, schedule.h2,
                                 tol=tol, n_scan=n_scan, n_max=n_max)
    return report_from_branches(branches, schedule.tau, tau_match_tol)


def report_from_branches(branches: tuple[CriticalBranch, ...], tau: float,
                         tau_match_tol: float = TAU_MATCH_TOL) -> CriticalReport:
    """Attach the tau diagnostics to precomputed branches."""
    orthogonality_12 = len(branches) > 0
    parallel_02 = any(b.parallel_02 for b in branches)
    match: TauMatch | None = None
    for bi, b in enumerate(branches):
        for n, star in enumerate(b.tau_star):
            rel = abs(tau - star) / star
            if rel <= tau_match_tol and match is None:
                match = TauMatch(branch=bi, n=n, tau_star=star, rel_error=rel)
    return CriticalReport(
        branches=branches,
        orthogonality_12=orthogonality_12,
        parallel_02=parallel_02,
        metamorphic_possible=orthogonality_12 and parallel_02,
        tau=tau,
        tau_match=match,
    )


def deviation_gi(omega1_at_kc: float, tau_star: float, epsilons,
                 n_modes: int) -> list[DeviationSample]:
    """Singular rate term g_i = -(2/N) ln|cos(w1 (tau* + eps))| per offset.

    Diverges logarithmically as eps -> 0; an exact zero of the cosine (within
    ZERO_TOL) maps to +inf.
    """
    if n_modes < 1:
        raise ValueError("n_modes must be positive")
    out = []
    for eps in np.asarray(epsilons, dtype=float):
        c = abs(math.cos(omega1_at_kc * (tau_star + float(eps))))
        g = math.inf if c < ZERO_TOL else -(2.0 / n_modes) * math.log(c)
        out.append(DeviationSample(float(eps), g))
    return out


def _closed_form_cos(h1: BlochDispersion, h2: BlochDispersion) -> tuple[float, ...] | None:
    if h1.kind == "ssh" and h2.kind == "ssh":
        p1: SshParams = h1.params
        p2: SshParams = h2.params
        x = ssh_critical_cos(p1.j1, p1.j2, p2.j1, p2.j2)
        return () if x is None else (x,)
    if h1.kind == "kitaev" and h2.kind == "kitaev":
        q1: KitaevParams = h1.params
        q2: KitaevParams = h2.params
        return kitaev_critical_cos(q1.m, q1.c, q2.m, q2.c)
    return None


def _cos_of(k: float, cos_vals: tuple[float, ...]) -> float:
    # Report the exact closed-form cosine rather than cos(arccos(...)).
    return min(cos_vals, key=lambda y: abs(math.acos(y) - k))


def _bisect(f: Callable[[float], float], lo: float, hi: float, f_lo: float) -> float:
    # Drive the bracket to floating-point width; the midpoint then sits at a
    # sign change of f to within evaluation rounding.
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_lo < 0.0) == (f_mid < 0.0):
            lo = mid
            f_lo = f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _minimize_abs(f: Callable[[float], float], lo: float, hi: float) -> tuple[float, float]:
    # Golden-section search on |f| over [lo, hi].
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = abs(f(c)), abs(f(d))
    for _ in range(120):
        if b - a < 1e-13:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = abs(f(c))
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = abs(f(d))
    k = 0.5 * (a + b)
    return k, abs(f(k))


def _wrap_zone(k: float) -> float:
    while k >= math.pi:
        k -= _TWO_PI
    while k < -math.pi:
        k += _TWO_PI
    return k


def _dot3(a, b) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _cross_norm(a, b) -> float:
    cx = a[1] * b[2] - a[2] * b[1]
    cy = a[2] * b[0] - a[0] * b[2]
    cz = a[0] * b[1] - a[1] * b[0]
    return math.sqrt(cx * cx + cy * cy + cz * cz)
