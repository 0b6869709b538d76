# ------ tests/test_transition.py ------

import warnings

import numpy as np
import pytest

from src.dynsys.spec import DigraphSpec
from src.errors import GridTooLarge, InputError
from src.transition.graph import BACKWARD, FORWARD, condense, reach, reach_within
from src.transition.grid import Grid
from src.transition.system import FROM_DIGRAPH, FROM_ODE, build_transitions
from src.verifier.suite import check_enclosure
from tests.conftest import make_ode
from tests.oracles import recurrent_classes, successor_table


class TestGrid:
    def test_one_dimensional_layout(self):
        grid = Grid([[-2, 2]], 7)
        assert grid.n_cells == 128
        assert grid.width == pytest.approx(4 / 128)
        lo, hi = grid.bounds([0, 127])
        np.testing.assert_allclose(lo[:, 0], [-2.0, 2.0 - grid.width])
        np.testing.assert_allclose(hi[:, 0], [-2.0 + grid.width, 2.0])

    def test_cell_of_faces_and_outside(self):
        grid = Grid([[0, 4]], 2)
        cells = grid.cell_of(np.array([[0.0], [1.0], [3.5], [4.0], [4.5], [-0.1]]))
        assert cells.tolist() == [0, 1, 3, 3, -1, -1]

    def test_ravel_order_in_two_dimensions(self):
        grid = Grid([[0, 2], [0, 2]], 1)
        assert grid.cell_of(np.array([[0.5, 1.5]])).tolist() == [1]
        assert grid.multi_index([3]).tolist() == [[1, 1]]

    def test_samples_include_corners(self):
        grid = Grid([[0, 1], [0, 1]], 0)
        pts = grid.samples([0], 3)
        assert pts.shape == (1, 9, 2)
        assert [0.0, 0.0] in pts[0].tolist()
        assert [1.0, 1.0] in pts[0].tolist()

    def test_dimension_limit(self):
        with pytest.raises(InputError):
            Grid([[0, 1]] * 4, 1)

    def test_hull(self):
        grid = Grid([[0, 4]], 2)
        lo, hi = grid.cell_hull({1, 2})
        assert (lo[0], hi[0]) == (1.0, 3.0)


class TestFiniteSystems:
    def test_digraph_copied_faithfully(self, g1):
        a, b, d, e = (g1.index_of(x) for x in 'abde')
        assert g1.successors[a] == (a,)
        assert g1.successors[b] == (a,)
        assert g1.successors[d] == (b,)
        assert g1.successors[e] == tuple(sorted((d, e)))
        assert not g1.escape_flag.any()
        assert g1.origin.kind == FROM_DIGRAPH

    def test_finite_map_is_deterministic(self, f1):
        assert f1.is_deterministic
        assert [s[0] for s in f1.successors] == [0, 0, 1, 4, 3, 3]

    def test_dead_end_goes_to_escape(self):
        ts = build_transitions(DigraphSpec(cells=['a', 'b'], edges=[('a', 'b')]))
        assert ts.escape_flag.tolist() == [False, True]

    def test_restrict_marks_leaving_edges(self, g1):
        a, b, d, e = (g1.index_of(x) for x in 'abde')
        sub = g1.restrict({d, e})
        assert sub.support == {d, e}
        assert sub.escape_flag[d]
        assert sub.successors[e] == tuple(sorted((d, e)))
        assert sub.successors[a] == ()

    def test_image_and_preimage(self, g1):
        a, b, d, e = (g1.index_of(x) for x in 'abde')
        assert g1.image({e}) == {d, e}
        assert g1.preimage({a}) == {a, b}


class TestCondensation:
    def test_g1_components(self, g1):
        cg = condense(g1)
        assert len(cg.components) == 4
        recurrent = {frozenset(g1.label(c) for c in cg.components[cid]) for cid in cg.recurrent_ids}
        assert recurrent == {frozenset('a'), frozenset('e')}
        e = cg.comp_of[g1.index_of('e')]
        a = cg.comp_of[g1.index_of('a')]
        assert a in cg.descendants(e)

    def test_f1_recurrent_components(self, f1):
        cg = condense(f1)
        assert {cg.components[cid] for cid in cg.recurrent_ids} == {frozenset({0}), frozenset({3, 4})}

    def test_recurrent_components_match_pairwise_reachability(self, g1, f1):
        for ts in (g1, f1):
            cg = condense(ts)
            assert {cg.components[cid] for cid in cg.recurrent_ids} == recurrent_classes(successor_table(ts))

    def test_topological_order(self, g1):
        cg = condense(g1)
        position = {cid: i for i, cid in enumerate(cg.topo_order)}
        for u, v in cg.dag_edges:
            assert position[u] < position[v]

    def test_sinks_first(self, f1):
        cg = condense(f1)
        order = cg.sinks_first()
        assert [cg.components[cid] for cid in order] == [frozenset({0}), frozenset({3, 4})]


class TestReach:
    def test_forward(self, g1, cells_of):
        assert reach(g1, cells_of('e'), FORWARD) == cells_of('abde')

    def test_backward(self, g1, cells_of):
        assert reach(g1, cells_of('a'), BACKWARD) == cells_of('abde')

    def test_within(self, g1, cells_of):
        assert reach_within(g1, cells_of('e'), cells_of('de')) == cells_of('de')

    @pytest.mark.parametrize('direction', [FORWARD, BACKWARD])
    def test_idempotent(self, f1, g1, direction):
        for ts in (f1, g1):
            for start in [{c} for c in ts.cells] + [set(ts.cells[:2]), set()]:
                once = reach(ts, start, direction)
                assert reach(ts, once, direction) == once

    def test_bad_direction(self, g1):
        with pytest.raises(ValueError):
            reach(g1, {0}, 'sideways')


class TestOdeEnclosure:
    def test_bistable_box_is_forward_invariant(self, o1):
        assert o1.origin.kind == FROM_ODE
        assert o1.n_cells == 128
        assert all(o1.successors[c] for c in o1.cells)
        assert not o1.escape_flag.any()

    def test_blow_up_cells_escape(self):
        spec = make_ode(['x^2'], [[-1, 3]], 1e-3)
        ts = build_transitions(spec, depth=7, tau=0.5, bloat=1.0)
        centers = ts.grid.centers()[:, 0]
        assert ts.escape_flag[centers > 1.3].all()

    def test_escaping_cells_raise_no_cast_warnings(self):
        spec = make_ode(['x^2'], [[-1, 3]], 1e-3)
        with warnings.catch_warnings():
            warnings.simplefilter('error', RuntimeWarning)
            ts = build_transitions(spec, depth=5, tau=0.5, bloat=1.0)
        assert ts.escape_flag.any()

    def test_random_images_land_in_successors(self, o1):
        passed, detail = check_enclosure(o1, samples=1000, seed=3)
        assert passed, detail

    def test_grid_cap(self, o1_spec, monkeypatch):
        monkeypatch.setenv('MFW_CELL_CAP', '100')
        with pytest.raises(GridTooLarge):
            build_transitions(o1_spec, depth=7)

    def test_negative_bloat(self, o1_spec):
        with pytest.raises(InputError):
            build_transitions(o1_spec, depth=3, bloat=-1.0)

    def test_three_recurrent_components(self, o1):
        cg = condense(o1)
        assert len(cg.recurrent_ids) == 3

    @pytest.mark.slow
    def test_planar_components_resolved(self, o3):
        assert len(condense(o3).recurrent_ids) == 3

    @pytest.mark.slow
    def test_planar_enclosure(self, o3):
        passed, detail = check_enclosure(o3, samples=1000, seed=5)
        assert passed, detail
