import math

import numpy as np
import pytest

from dqpt.critical import find_orthogonal_momenta, kitaev_critical_cos
from dqpt.loschmidt import rate_function
from dqpt.model import BlochDispersion, QuenchSchedule, momentum_grid
from dqpt.sweep import (
    DiagramGrid,
    batch_rate_curves,
    kitaev_phase_diagram,
    ssh_phase_diagram,
)
from dqpt.thermal import thermal_bloch


class TestSshDiagram:
    def test_example_cells(self):
        grid = ssh_phase_diagram([0.5, 1.0, 2.0], [0.5, 1.0, 2.0])
        lookup = {(x, y): grid.cells[i, j]
                  for i, x in enumerate(grid.x_values)
                  for j, y in enumerate(grid.y_values)}
        assert lookup[(0.5, 2.0)]
        assert not lookup[(2.0, 2.0)]
        assert lookup[(1.0, 0.5)] and lookup[(1.0, 2.0)]  # boundary ratio

    def test_exact_sign_predicate(self, rng):
        r1 = np.sort(rng.uniform(0.05, 3.0, size=41))
        r2 = np.sort(rng.uniform(0.05, 3.0, size=37))
        grid = ssh_phase_diagram(r1, r2)
        expected = np.outer(r1 - 1.0, r2 - 1.0) <= 0.0
        assert np.array_equal(grid.cells, expected)

    def test_symmetric_under_axis_swap(self):
        values = np.linspace(0.1, 2.5, 31)
        grid = ssh_phase_diagram(values, values)
        assert np.array_equal(grid.cells, grid.cells.T)

    def test_rejects_nonpositive_ratios(self):
        with pytest.raises(ValueError):
            ssh_phase_diagram([-0.1, 1.0], [0.5, 1.0])


class TestKitaevDiagram:
    def test_benchmark_cell_is_true(self):
        grid = kitaev_phase_diagram(0.2, 5.0, [2.0], [2.0])
        assert grid.cells[0, 0]

    def test_unit_first_stage_fills_plane(self):
        grid = kitaev_phase_diagram(1.0, 1.0, np.linspace(-3, 3, 11),
                                    np.linspace(-3, 3, 11))
        assert np.all(grid.cells)

    def test_empty_cell_where_discriminant_is_negative(self):
        assert kitaev_critical_cos(0.0, 2.0, 0.0, 2.0) == ()
        grid = kitaev_phase_diagram(0.0, 2.0, [0.0], [2.0])
        assert not grid.cells[0, 0]

    def test_true_cells_confirmed_by_root_scan(self, rng):
        m2 = np.linspace(-3.0, 3.0, 21)
        c2 = np.linspace(-3.0, 3.0, 21)
        grid = kitaev_phase_diagram(0.2, 5.0, m2, c2)
        true_cells = np.argwhere(grid.cells)
        picks = true_cells[rng.choice(len(true_cells), size=20, replace=False)]
        h1 = BlochDispersion.kitaev(1.0, 0.2, 5.0)
        for i, j in picks:
            h2 = BlochDispersion.kitaev(1.0, float(m2[j]), float(c2[i]))
            assert find_orthogonal_momenta(h1, h2).size > 0

    def test_rejects_nonfinite_ranges(self):
        with pytest.raises(ValueError):
            kitaev_phase_diagram(0.2, 5.0, [0.0, math.inf], [0.0, 1.0])

    def test_refinement_never_flips_shared_cells(self):
        # Pointwise predicates: a grid point keeps its value when the grid
        # spacing is halved around it.
        coarse_m2 = np.linspace(-3.0, 3.0, 13)
        coarse_c2 = np.linspace(-3.0, 3.0, 13)
        fine_m2 = np.linspace(-3.0, 3.0, 25)
        fine_c2 = np.linspace(-3.0, 3.0, 25)
        coarse = kitaev_phase_diagram(0.2, 5.0, coarse_m2, coarse_c2)
        fine = kitaev_phase_diagram(0.2, 5.0, fine_m2, fine_c2)
        assert np.array_equal(coarse.cells, fine.cells[::2, ::2])


class TestDiagramGrid:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            DiagramGrid("x", np.array([0.0, 1.0]), "y", np.array([0.0, 1.0]),
                        np.zeros((3, 2), dtype=bool))

    def test_axis_ordering_validation(self):
        with pytest.raises(ValueError):
            DiagramGrid("x", np.array([1.0, 0.0]), "y", np.array([0.0, 1.0]),
                        np.zeros((2, 2), dtype=bool))


class TestBatch:
    @pytest.fixture
    def base(self, ssh_double_quench):
        h0, h1, h2, temp = ssh_double_quench
        return QuenchSchedule(h0, h1, h2, 2.0), temp

    def test_batch_equals_map(self, base):
        schedule, temp = base
        times = np.linspace(0.0, 6.0, 25)
        items = batch_rate_curves(schedule, temp, 64, times,
                                  [{"tau": 1.5}, {"tau": 4.0}])
        for item, tau in zip(items, (1.5, 4.0)):
            assert item.error is None
            single = rate_function(
                QuenchSchedule(schedule.h0, schedule.h1, schedule.h2, tau),
                thermal_bloch(schedule.h0, temp, momentum_grid(64)), times)
            assert np.array_equal(item.curve.g, single.g)

    def test_error_entry_does_not_stop_the_batch(self, base):
        schedule, temp = base
        times = np.linspace(0.0, 4.0, 9)
        items = batch_rate_curves(schedule, temp, 16, times, [
            {"h1": {"model": "ssh", "j1": -1.0, "j2": 0.8}},
            {"tau": 1.0},
        ])
        assert items[0].curve is None and items[0].error
        assert items[1].curve is not None and items[1].error is None

    def test_empty_batch(self, base):
        schedule, temp = base
        assert batch_rate_curves(schedule, temp, 8, np.linspace(0, 1, 4), []) == []

    def test_threaded_batch_matches_serial(self, base):
        schedule, temp = base
        times = np.linspace(0.0, 5.0, 17)
        overrides = [{"tau": 0.5}, {"tau": 1.5}, {"tau": 2.5}, {"tau": 3.5}]
        serial = batch_rate_curves(schedule, temp, 32, times, overrides, threads=1)
        threaded = batch_rate_curves(schedule, temp, 32, times, overrides, threads=4)
        for a, b in zip(serial, threaded):
            assert a.index == b.index
            assert np.array_equal(a.curve.g, b.curve.g)

    def test_unknown_override_key_is_an_error_entry(self, base):
        schedule, temp = base
        items = batch_rate_curves(schedule, temp, 8, np.linspace(0, 1, 4),
                                  [{"nope": 1}])
        assert items[0].error is not None
