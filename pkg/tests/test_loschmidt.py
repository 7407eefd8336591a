import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dqpt.loschmidt import (
    RateCurve,
    StageFrequencies,
    amplitude_full,
    amplitude_stage1_k,
    amplitude_stage2_k,
    detect_kinks,
    rate_function,
)
from dqpt.model import BlochDispersion, QuenchSchedule, eval_dispersion, momentum_grid
from dqpt.thermal import Temperature, thermal_bloch


def unit(v):
    v = np.asarray(v, dtype=float)
    return tuple(v / np.linalg.norm(v))


def random_unit(rng):
    return unit(rng.normal(size=3))


def random_nvec(rng):
    return tuple(rng.uniform(0.0, 1.0) * np.asarray(random_unit(rng)))


angles = st.floats(min_value=0.0, max_value=12.0, allow_nan=False)


class TestStage1:
    def test_identity_at_t_zero(self):
        assert amplitude_stage1_k((0.2, 0.1, 0.3), 1.7, (0, 0, 1), 0.0) == 1.0 + 0.0j

    def test_orthogonal_vector_vanishes_at_quarter_period(self):
        omega1 = 0.8
        g = amplitude_stage1_k((1.0, 0.0, 0.0), omega1, (0.0, 0.0, 1.0),
                               (math.pi / 2) / omega1)
        assert abs(g) < 1e-15

    def test_stationary_state_is_pure_phase(self, rng):
        n1 = random_unit(rng)
        nvec = tuple(-c for c in n1)
        for t in rng.uniform(0, 20, size=25):
            g = amplitude_stage1_k(nvec, 0.9, n1, float(t))
            assert g == pytest.approx(complex(math.cos(0.9 * t), math.sin(0.9 * t)),
                                      abs=1e-15)
            assert abs(g) == pytest.approx(1.0, abs=1e-13)


class TestStage2:
    def test_continuity_at_the_second_quench(self, rng):
        for _ in range(200):
            nvec = random_nvec(rng)
            n1, n2 = random_unit(rng), random_unit(rng)
            w1, w2 = rng.uniform(0.1, 3.0, size=2)
            tau = float(rng.uniform(0.1, 5.0))
            g1 = amplitude_stage1_k(nvec, w1, n1, tau)
            g2 = amplitude_stage2_k(nvec, w1, n1, tau, w2, n2, tau)
            assert g2 == g1  # a2 = 1, b2 = 0 exactly at t = tau

    def test_single_quench_reduction(self, rng):
        # h1 = h2 collapses the two-stage formula to the one-stage formula.
        for _ in range(300):
            nvec = random_nvec(rng)
            n1 = random_unit(rng)
            w = float(rng.uniform(0.1, 3.0))
            tau = float(rng.uniform(0.1, 4.0))
            t = tau + float(rng.uniform(0.0, 6.0))
            two = amplitude_stage2_k(nvec, w, n1, tau, w, n1, t)
            one = amplitude_stage1_k(nvec, w, n1, t)
            assert two == pytest.approx(one, abs=1e-12)

    def test_metamorphic_geometry_kills_amplitude(self, rng):
        # nvec parallel to n2, n2 orthogonal to n1, quarter-period duration.
        n1 = (1.0, 0.0, 0.0)
        n2 = (0.0, 1.0, 0.0)
        w1 = 1.3
        tau = (math.pi / 2) / w1
        for _ in range(100):
            nvec = (0.0, float(rng.uniform(0.1, 1.0)), 0.0)
            t = tau + float(rng.uniform(0.0, 10.0))
            g = amplitude_stage2_k(nvec, w1, n1, tau, 0.7, n2, t)
            assert abs(g) < 1e-12

    def test_zero_temperature_post_quench_modulus_is_constant(self, rng):
        # |nvec| = 1, nvec || n2 perpendicular to n1: modulus |cos(w1 tau)|.
        n1 = unit([0.0, 1.0, 1.0])
        n2 = unit([1.0, 0.0, 0.0])
        nvec = n2
        w1, w2 = 0.9, 1.7
        tau = 2.1
        expected = abs(math.cos(w1 * tau))
        for t in tau + rng.uniform(0, 15, size=50):
            g = amplitude_stage2_k(nvec, w1, n1, tau, w2, n2, float(t))
            assert abs(g) == pytest.approx(expected, abs=1e-13)

    @given(st.floats(0.05, 3.0), st.floats(0.05, 3.0), st.floats(0.1, 5.0),
           st.floats(0.0, 10.0), st.integers(0, 10 ** 6))
    def test_modulus_bounded_by_one(self, w1, w2, tau, dt, seed):
        rng = np.random.default_rng(seed)
        nvec = random_nvec(rng)
        n1, n2 = random_unit(rng), random_unit(rng)
        g = amplitude_stage2_k(nvec, w1, n1, tau, w2, n2, tau + dt)
        assert abs(g) <= 1.0 + 1e-12


class TestAmplitudeFull:
    def test_unity_at_t_zero(self, ssh_double_quench):
        h0, h1, h2, temp = ssh_double_quench
        field = thermal_bloch(h0, temp, momentum_grid(32))
        log_mod, phase = amplitude_full(QuenchSchedule(h0, h1, h2, 1.0), field, 0.0)
        assert log_mod == 0.0
        assert phase == 0.0

    def test_matches_per_mode_product(self, ssh_double_quench, rng):
        h0, h1, h2, temp = ssh_double_quench
        schedule = QuenchSchedule(h0, h1, h2, 1.7)
        grid = momentum_grid(48)
        field = thermal_bloch(h0, temp, grid)
        for t in (0.4, 1.7, 2.9, 6.0):
            log_mod, phase = amplitude_full(schedule, field, t)
            prod = 1.0 + 0.0j
            for i, k in enumerate(grid):
                x1 = eval_dispersion(h1, float(k))
                x2 = eval_dispersion(h2, float(k))
                nvec = field.nvec[i]
                if t < schedule.tau:
                    prod *= amplitude_stage1_k(nvec, 0.5 * x1.delta, x1.nhat, t)
                else:
                    prod *= amplitude_stage2_k(nvec, 0.5 * x1.delta, x1.nhat,
                                               schedule.tau, 0.5 * x2.delta, x2.nhat, t)
            assert math.exp(log_mod) == pytest.approx(abs(prod), rel=1e-10)
            assert np.exp(1j * phase) == pytest.approx(prod / abs(prod), abs=1e-10)

    def test_rejects_negative_time(self, ssh_double_quench):
        h0, h1, h2, temp = ssh_double_quench
        field = thermal_bloch(h0, temp, momentum_grid(8))
        with pytest.raises(ValueError):
            amplitude_full(QuenchSchedule(h0, h1, h2, 1.0), field, -0.1)


class TestRateFunction:
    def test_infinite_temperature_single_quench_closed_sum(self):
        # A vanishing thermal vector leaves g(t) = -(2/N) sum ln|cos(w1 t)|.
        h0 = BlochDispersion.ssh(1.0, 0.8)
        h1 = BlochDispersion.ssh(0.4, 0.8)
        schedule = QuenchSchedule(h0, h1, h1, 50.0)
        grid = momentum_grid(64)
        field = thermal_bloch(h0, Temperature.from_beta(0.0), grid)
        t = 1.37
        curve = rate_function(schedule, field, np.array([t]))
        expected = -(2.0 / 64) * math.fsum(
            math.log(abs(math.cos(0.5 * eval_dispersion(h1, float(k)).delta * t)))
            for k in grid)
        assert curve.g[0] == pytest.approx(expected, rel=1e-13)

    def test_riemann_sum_convergence(self, ssh_double_quench):
        h0, h1, h2, temp = ssh_double_quench
        schedule = QuenchSchedule(h0, h1, h2, 2.3)
        times = np.array([0.7, 1.9, 3.3, 5.1])
        g_n = rate_function(schedule, thermal_bloch(h0, temp, momentum_grid(1000)),
                            times).g
        g_2n = rate_function(schedule, thermal_bloch(h0, temp, momentum_grid(2000)),
                             times).g
        assert np.all(np.abs(g_n - g_2n) / np.abs(g_2n) < 1e-3)

    def test_deterministic_bit_identical(self, ssh_double_quench):
        h0, h1, h2, temp = ssh_double_quench
        schedule = QuenchSchedule(h0, h1, h2, 2.3)
        times = np.linspace(0.0, 6.0, 40)
        field = thermal_bloch(h0, temp, momentum_grid(128))
        a = rate_function(schedule, field, times)
        b = rate_function(schedule, field, times)
        assert np.array_equal(a.g, b.g)

    def test_rejects_unsorted_times(self, ssh_double_quench):
        h0, h1, h2, temp = ssh_double_quench
        field = thermal_bloch(h0, temp, momentum_grid(8))
        with pytest.raises(ValueError):
            rate_function(QuenchSchedule(h0, h1, h2, 1.0), field,
                          np.array([0.0, 2.0, 1.0]))


class TestDetectKinks:
    def test_constant_curve_has_no_kinks(self):
        curve = RateCurve(np.linspace(0, 5, 200), np.full(200, 0.42), 2.0, 100)
        assert detect_kinks(curve).size == 0

    def test_synthetic_spike_is_located(self):
        times = np.linspace(0.0, 10.0, 501)
        g = np.sin(times) * 0.05 + 0.5
        g[250] += 0.2
        curve = RateCurve(times, g, 20.0, 100)
        kinks = detect_kinks(curve)
        assert kinks.size == 1
        assert kinks[0] == pytest.approx(times[250])

    def test_infinite_samples_are_excluded(self):
        times = np.linspace(0.0, 10.0, 501)
        g = np.sin(times) * 0.05 + 0.5
        g[300:] = math.inf
        curve = RateCurve(times, g, times[299], 100)
        assert detect_kinks(curve).size == 0

    def test_nonuniform_grid_rejected(self):
        times = np.array([0.0, 0.1, 0.3, 0.35, 0.6])
        curve = RateCurve(times, np.zeros(5), 1.0, 10)
        with pytest.raises(ValueError):
            detect_kinks(curve)

    def test_single_first_stage_transition_is_found(self, ssh_double_quench):
        # Off-resonance double quench: the only kink before the second quench
        # is the first-stage transition time of the critical mode.
        from dqpt.cli import _augmented_grid
        from dqpt.critical import critical_branches, report_from_branches

        h0, h1, h2, temp = ssh_double_quench
        branches = critical_branches(h0, h1, h2)
        schedule = QuenchSchedule(h0, h1, h2, 8.0)
        grid, _ = _augmented_grid(400, report_from_branches(branches, 8.0))
        field = thermal_bloch(h0, temp, grid)
        curve = rate_function(schedule, field, np.linspace(0.0, 7.5, 751))
        kinks = detect_kinks(curve)
        assert kinks.size == 1
        assert kinks[0] == pytest.approx(branches[0].ordinary_times[0], abs=0.05)


class TestTypes:
    def test_stage_frequencies_validation(self):
        StageFrequencies(0.0, 1.0)
        with pytest.raises(ValueError):
            StageFrequencies(-0.1, 1.0)

    def test_rate_curve_validation(self):
        with pytest.raises(ValueError):
            RateCurve(np.array([0.0, 0.0]), np.zeros(2), 1.0, 10)
        with pytest.raises(ValueError):
            RateCurve(np.array([0.0, 1.0]), np.zeros(3), 1.0, 10)
