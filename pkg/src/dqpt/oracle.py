"""Brute-force 2x2 matrix reference path for the Pauli closed forms.

Everything here works on explicit complex matrices: the Hamiltonian is
assembled from its Bloch data, exponentiated by closed-form spectral
decomposition (trace/determinant, no iterative solver), and the amplitude is
the literal trace of the density matrix times the evolution operator.  This
is the slow, independent route used to validate the loschmidt module.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import loschmidt
from .model import BlochDispersion, BlochSample, eval_dispersion
from .thermal import Temperature, bloch_vector

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

#: Hermiticity tolerance on inputs.
HERMITIAN_TOL = 1e-12

#: Maximum closed-form vs brute-force deviation accepted by the check driver.
ORACLE_TOL = 1e-12

#: Inverse temperatures sampled by the check driver (incl. the T=0 limit).
CHECK_BETAS = (0.0, 0.1, 1.0, 10.0, math.inf)


def build_hk(sample: BlochSample) -> np.ndarray:
    """Assemble H = E * 1 + (Delta/2) * nhat . sigma as an explicit matrix."""
    nx, ny, nz = sample.nhat
    h = sample.e * IDENTITY + 0.5 * sample.delta * (nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z)
    return h


def expm_unitary(h: np.ndarray, t: float) -> np.ndarray:
    """U = exp(-i H t) for Hermitian 2x2 H via spectral decomposition."""
    lam_lo, lam_hi, p_lo, p_hi = _spectral(h)
    return np.exp(-1.0j * lam_lo * t) * p_lo + np.exp(-1.0j * lam_hi * t) * p_hi


def thermal_density(h0: np.ndarray, temp: Temperature) -> np.ndarray:
    """rho = exp(-beta H) / Tr exp(-beta H); ground projector at beta = inf.

    A degenerate spectrum at beta = inf has no preferred ground state; the
    maximally mixed matrix is returned (matching the vanishing thermal Bloch
    vector convention) and a warning is emitted.
    """
    lam_lo, lam_hi, p_lo, p_hi = _spectral(h0)
    if temp.is_zero_temperature:
        if lam_hi - lam_lo < 1e-14 * max(1.0, abs(lam_lo), abs(lam_hi)):
            warnings.warn("degenerate spectrum at zero temperature: using 1/2 * identity",
                          RuntimeWarning, stacklevel=2)
            return 0.5 * IDENTITY.copy()
        return p_lo
    w_lo = math.exp(-temp.beta * 0.0)
    w_hi = math.exp(-temp.beta * (lam_hi - lam_lo))
    return (w_lo * p_lo + w_hi * p_hi) / (w_lo + w_hi)


def amplitude_bruteforce(s0: BlochSample, s1: BlochSample, s2: BlochSample,
                         tau: float, temp: Temperature, t: float) -> complex:
    """Tr(rho0 U1(t)) before the second quench, Tr(rho0 U2(t-tau) U1(tau)) after.

    Band offsets E(k) are kept, so for nonzero offsets this differs from the
    closed forms by a pure phase.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got t={t}")
    rho = thermal_density(build_hk(s0), temp)
    if t < tau:
        u = expm_unitary(build_hk(s1), t)
    else:
        u = expm_unitary(build_hk(s2), t - tau) @ expm_unitary(build_hk(s1), tau)
    return complex(np.trace(rho @ u))


@dataclass(frozen=True)
class OracleCheckResult:
    """Outcome of a randomized closed-form vs brute-force comparison."""

    draws: int
    seed: int
    max_deviation: float
    tol: float
    passed: bool
    worst: dict


def run_oracle_check(draws: int, seed: int, threads: int = 1,
                     stage1: Callable = loschmidt.amplitude_stage1_k,
                     stage2: Callable = loschmidt.amplitude_stage2_k) -> OracleCheckResult:
    """Compare the Pauli closed forms against the matrix trace on random draws.

    Each draw picks a model family (SSH or Kitaev, so band offsets vanish),
    random stage parameters, a random momentum, an inverse temperature from
    CHECK_BETAS, and a time straddling the second quench.  The deviation is
    the complex distance between the two amplitudes; the check passes when
    the maximum over all draws stays below ORACLE_TOL.  Deterministic under a
    fixed seed regardless of the worker count.
    """
    if draws < 1:
        raise ValueError(f"draw count must be >= 1, got {draws}")
    rng = np.random.default_rng(seed)
    cases = [_draw_case(rng, i) for i in range(draws)]

    if threads > 1 and draws > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _case_deviation(c, stage1, stage2), cases))
    else:
        results = [_case_deviation(c, stage1, stage2) for c in cases]

    worst_idx = int(np.argmax(results))
    max_dev = float(results[worst_idx])
    case = cases[worst_idx]
    worst = {
        "draw": case["index"],
        "model": case["model"],
        "k": case["k"],
        "beta": case["beta"],
        "tau": case["tau"],
        "t": case["t"],
        "deviation": max_dev,
    }
    return OracleCheckResult(
        draws=draws,
        seed=seed,
        max_deviation=max_dev,
        tol=ORACLE_TOL,
        passed=max_dev < ORACLE_TOL,
        worst=worst,
    )


def _draw_case(rng: np.random.Generator, index: int) -> dict:
    if rng.integers(2) == 0:
        model = "ssh"
        dispersions = [BlochDispersion.ssh(*rng.uniform(0.2, 2.5, size=2)) for _ in range(3)]
    else:
        model = "kitaev"
        dispersions = [
            BlochDispersion.kitaev(rng.uniform(0.3, 2.0), rng.uniform(-2.5, 2.5),
                                   rng.uniform(-2.5, 2.5))
            for _ in range(3)
        ]
    k = float(rng.uniform(-math.pi, math.pi))
    beta = CHECK_BETAS[int(rng.integers(len(CHECK_BETAS)))]
    tau = float(rng.uniform(0.2, 4.0))
    t = float(rng.uniform(0.0, 2.2) * tau)
    s0, s1, s2 = (eval_dispersion(d, k) for d in dispersions)
    return {
        "index": index,
        "model": model,
        "k": k,
        "beta": beta,
        "tau": tau,
        "t": t,
        "s0": s0,
        "s1": s1,
        "s2": s2,
    }


def _case_deviation(case: dict, stage1: Callable, stage2: Callable) -> float:
    temp = Temperature(case["beta"])
    s0, s1, s2 = case["s0"], case["s1"], case["s2"]
    tau, t = case["tau"], case["t"]
    nvec = bloch_vector(s0, temp)
    if t < tau:
        closed = stage1(nvec, 0.5 * s1.delta, s1.nhat, t)
    else:
        closed = stage2(nvec, 0.5 * s1.delta, s1.nhat, tau, 0.5 * s2.delta, s2.nhat, t)
    brute = amplitude_bruteforce(s0, s1, s2, tau, temp, t)
    return abs(closed - brute)


def _spectral(h: np.ndarray) -> tuple[float, float, np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and spectral projectors of a Hermitian 2x2."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {h.shape}")
    scale = max(1.0, float(np.abs(h).max()))
    if (abs(h[0, 1] - np.conj(h[1, 0])) > HERMITIAN_TOL * scale
            or abs(h[0, 0].imag) > HERMITIAN_TOL * scale
            or abs(h[1, 1].imag) > HERMITIAN_TOL * scale):
        raise ValueError("matrix is not Hermitian within tolerance")
    a = h[0, 0].real
    d = h[1, 1].real
    b = h[0, 1]
    mean = 0.5 * (a + d)
    r = math.hypot(0.5 * (a - d), abs(b))
    lam_lo, lam_hi = mean - r, mean + r
    if r < 1e-15 * scale:
        half = 0.5 * IDENTITY.copy()
        return lam_lo, lam_hi, half, half
    hermitized = np.array([[complex(a), b], [np.conj(b), complex(d)]])
    p_lo = (lam_hi * IDENTITY - hermitized) / (lam_hi - lam_lo)
    p_hi = (hermitized - lam_lo * IDENTITY) / (lam_hi - lam_lo)
    return lam_lo, lam_hi, p_lo, p_hi
