# ------ tests/test_lyapunov.py ------

import math

import numpy as np
import pytest

from src.analyzer.attractors import global_attractor
from src.analyzer.lyapunov import (
    FlowLyapunov, bump, k0_distance, lyapunov_field, lyapunov_for, lyapunov_value,
    separating_lyapunov, verify_decrease, xi,
)
from src.errors import EmptyAttractor, NotDeterministic, NotInBasin, Overlap
from tests.oracles import hitting_times, orbit_sum

F1_IMAGE = {0: 0, 1: 0, 2: 1, 3: 4, 4: 3, 5: 3}
F1_ATTRACTOR = frozenset({0, 3, 4})


class TestZeta:
    def test_f1_hitting_distance(self, f1):
        zeta = k0_distance(f1, F1_ATTRACTOR)
        assert zeta.values.tolist() == [0, 1, 2, 0, 0, 1]

    def test_matches_hitting_oracle(self, f1):
        zeta = k0_distance(f1, {0})
        expected = hitting_times(F1_IMAGE, {0}, 6)
        assert [zeta[c] for c in range(6)] == [expected[c] for c in range(6)]

    def test_zero_exactly_on_attractor(self, g1, cells_of):
        zeta = k0_distance(g1, cells_of('a'))
        assert zeta.zero_set() == cells_of('a')

    def test_empty_attractor(self, f1):
        with pytest.raises(EmptyAttractor):
            k0_distance(f1, set())

    def test_bistable_box_distance(self, o1):
        cells = global_attractor(o1).cells
        zeta = k0_distance(o1, cells)
        w = o1.grid.width
        value = float(zeta.evaluator(np.array([[1.5]]))[0])
        assert 0.5 - 4 * w <= value <= 0.5
        assert zeta.zero_set() == cells


class TestFiniteConstruction:
    def test_xi_along_orbit(self, f1):
        zeta = k0_distance(f1, F1_ATTRACTOR)
        assert xi(f1, zeta, 2) == 2
        assert xi(f1, zeta, 0) == 0

    def test_value_closed_form(self, f1):
        zeta = k0_distance(f1, F1_ATTRACTOR)
        assert lyapunov_value(f1, zeta, 2) == pytest.approx(4 + math.exp(-1), abs=1e-12)
        assert lyapunov_value(f1, zeta, 1) == pytest.approx(2.0, abs=1e-12)
        assert lyapunov_value(f1, zeta, 3) == 0

    def test_value_matches_direct_sum(self, f1):
        zeta = k0_distance(f1, F1_ATTRACTOR)
        values = {c: zeta[c] for c in range(6)}
        for c in range(6):
            expected = orbit_sum(F1_IMAGE, values, c, F1_ATTRACTOR)
            assert lyapunov_value(f1, zeta, c) == pytest.approx(expected, abs=1e-12)

    def test_labels_accepted(self, f1):
        zeta = k0_distance(f1, F1_ATTRACTOR)
        assert lyapunov_value(f1, zeta, '2') == lyapunov_value(f1, zeta, 2)

    def test_field_over_basin(self, f1):
        field = lyapunov_field(f1, F1_ATTRACTOR)
        np.testing.assert_allclose(field.values, [0, 2, 4 + math.exp(-1), 0, 0, 2], atol=1e-12)
        assert not field.failures

    def test_field_on_attractor_is_zero(self, f1):
        field = lyapunov_field(f1, F1_ATTRACTOR, scope=F1_ATTRACTOR)
        assert field.values.tolist() == [0, 0, 0]

    def test_outside_basin(self, f1):
        zeta = k0_distance(f1, {0})
        with pytest.raises(NotInBasin):
            lyapunov_value(f1, zeta, 5)

    def test_field_records_failures(self, f1):
        field = lyapunov_field(f1, {0}, scope=range(6))
        assert set(field.failures) == {3, 4, 5}
        assert np.isnan(field[5])

    def test_strict_decrease(self, f1):
        report = verify_decrease(f1, F1_ATTRACTOR)
        assert report.passed
        assert report.checked == 3
        assert report.exempt == 3

    def test_multivalued_systems_have_xi_only(self, g1, cells_of):
        construction = lyapunov_for(g1, k0_distance(g1, cells_of('a')))
        assert construction.xi(g1.index_of('d')) == 2
        with pytest.raises(NotDeterministic):
            construction.value(g1.index_of('d'))
        assert construction.verify_decrease().passed

    def test_table_columns(self, f1):
        table = lyapunov_for(f1, k0_distance(f1, F1_ATTRACTOR)).table()
        assert list(table.columns) == ['cell_index', 'zeta', 'xi', 'L']
        assert table.loc[table.cell_index == 2, 'L'].item() == pytest.approx(4 + math.exp(-1), abs=1e-12)


class TestSeparation:
    def test_bump_endpoints(self):
        assert bump(0.0, 3.0) == 1.0
        assert bump(3.0, 0.0) == 0.0
        assert bump(np.inf, np.inf) == 0.0

    def test_f1_single_target(self, f1):
        construction = separating_lyapunov(f1, F1_ATTRACTOR, {2})
        assert construction.zeta[2] == 3.0
        assert construction.zeta[1] == pytest.approx(1.5)
        assert construction.value(2) == pytest.approx(6 + 1.5 * math.exp(-1), abs=1e-12)
        assert construction.value(2) >= 1

    def test_attractor_stays_at_zero(self, f1):
        construction = separating_lyapunov(f1, F1_ATTRACTOR, {2})
        assert construction.value(0) == 0

    def test_empty_target_is_plain_construction(self, f1):
        plain = lyapunov_for(f1, k0_distance(f1, F1_ATTRACTOR))
        separated = separating_lyapunov(f1, F1_ATTRACTOR, set())
        for c in range(6):
            assert separated.value(c) == plain.value(c)

    def test_overlap(self, f1):
        with pytest.raises(Overlap):
            separating_lyapunov(f1, F1_ATTRACTOR, {0, 2})

    def test_separated_function_still_decreases(self, f1):
        assert separating_lyapunov(f1, F1_ATTRACTOR, {2, 5}).verify_decrease().passed


@pytest.mark.slow
class TestFlowConstruction:
    @pytest.fixture(scope='class')
    def construction(self, o1):
        cells = global_attractor(o1).cells
        return lyapunov_for(o1, k0_distance(o1, cells), horizon=40.0, tmax=20.0)

    def test_xi_is_initial_zeta_off_attractor(self, o1, construction):
        zeta = float(construction.zeta(np.array([[1.5]]))[0])
        assert construction.xi([1.5]) == pytest.approx(zeta, abs=1e-9)

    def test_zero_on_attractor(self, construction):
        assert construction.value([0.5]) == 0.0

    def test_decrease_along_sampled_paths(self, construction):
        report = construction.verify_decrease(samples=20, tol=1e-9, seed=1)
        assert report.passed, report.violations[:3]

    def test_truncation_bound(self, o1, construction):
        longer = FlowLyapunov(o1.spec, construction.zeta, horizon=60.0, tmax=40.0)
        rng = np.random.default_rng(7)
        points = rng.uniform(-2.0, 2.0, size=(50, 1))
        _, xi20, L20, _ = construction.evaluate(points)
        _, _, L40, _ = longer.evaluate(points)
        assert not np.isnan(L20).any()
        assert np.all(np.abs(L40 - L20) <= math.exp(-20) * xi20 + 1e-12)

    def test_field_maximum_at_boundary(self, o1):
        cells = global_attractor(o1).cells
        field = lyapunov_field(o1, cells, scope=o1.cells)
        assert not field.failures
        assert int(field.cells[np.nanargmax(field.values)]) in (0, o1.n_cells - 1)

