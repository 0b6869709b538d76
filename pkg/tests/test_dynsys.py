# ------ tests/test_dynsys.py ------

import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.dynsys.flow import (
    AT, ENTERED_TARGET, ESCAPED, HORIZON, evolve, time_tau_map, trajectory,
)
from src.dynsys.integrator import BatchState, sample_times
from src.dynsys.spec import DigraphSpec, FiniteMapSpec
from src.errors import (
    FieldSyntaxError, InputError, MultivaluedState, NonIntegerTime, OutOfDomain, UnknownState,
)
from tests.conftest import make_ode


class TestSpecModels:
    def test_integer_identifiers_become_strings(self):
        spec = FiniteMapSpec(states=[0, 1], map={0: 1, 1: 1})
        assert spec.states == ['0', '1']
        assert spec.map == {'0': '1', '1': '1'}

    def test_image_must_be_declared(self):
        with pytest.raises(ValidationError, match='7'):
            FiniteMapSpec(states=['0'], map={'0': '7'})

    def test_every_state_needs_an_image(self):
        with pytest.raises(ValidationError):
            FiniteMapSpec(states=['0', '1'], map={'0': '0'})

    def test_digraph_endpoints_declared(self):
        with pytest.raises(ValidationError):
            DigraphSpec(cells=['a'], edges=[('a', 'b')])

    def test_field_length_must_match_dim(self):
        with pytest.raises(ValidationError):
            make_ode(['x', 'x'], [[-1, 1]], 0.01)

    def test_empty_domain_interval(self):
        with pytest.raises(ValidationError):
            make_ode(['x'], [[1, 1]], 0.01)

    def test_field_syntax_error_names_component(self):
        with pytest.raises(ValidationError) as info:
            make_ode(['y', 'x +'], [[-1, 1], [-1, 1]], 0.01)
        wrapped = info.value.errors()[0]['ctx']['error']
        assert isinstance(wrapped, FieldSyntaxError)
        assert wrapped.field == 'field[1]'

    def test_nonpositive_step(self):
        with pytest.raises(ValidationError):
            make_ode(['x'], [[-1, 1]], 0.0)

    def test_with_dt_keeps_everything_else(self, o1_spec):
        finer = o1_spec.with_dt(1e-3)
        assert finer.dt == 1e-3
        assert finer.field == o1_spec.field
        assert o1_spec.dt == 0.01

    def test_default_magnitude_cap(self, o1_spec):
        assert o1_spec.cap == 1e6


class TestFiniteEvolution:
    def test_two_steps(self, f1_spec):
        result = evolve(f1_spec, '2', 2)
        assert result.outcome == AT
        assert result.point == '0'

    def test_identity_at_time_zero(self, f1_spec):
        for state in f1_spec.states:
            assert evolve(f1_spec, state, 0).point == state

    def test_semigroup(self, f1_spec):
        for state in f1_spec.states:
            for s in range(4):
                for t in range(4):
                    middle = evolve(f1_spec, state, s).point
                    assert evolve(f1_spec, state, t + s).point == evolve(f1_spec, middle, t).point

    def test_unknown_state(self, f1_spec):
        with pytest.raises(UnknownState):
            evolve(f1_spec, '9', 1)

    def test_non_integer_time(self, f1_spec):
        with pytest.raises(NonIntegerTime):
            evolve(f1_spec, '2', 1.5)

    def test_negative_time(self, f1_spec):
        with pytest.raises(InputError):
            evolve(f1_spec, '2', -1)

    def test_digraph_dead_end_escapes(self):
        spec = DigraphSpec(cells=['a', 'b'], edges=[('a', 'b')])
        result = evolve(spec, 'a', 3)
        assert result.escaped
        assert result.t_escape == 2

    def test_digraph_branching_is_multivalued(self, g1_spec):
        with pytest.raises(MultivaluedState):
            evolve(g1_spec, 'e', 1)

    def test_trajectory_to_horizon(self, f1_spec):
        traj = trajectory(f1_spec, '5', 3)
        assert traj.points == ['5', '3', '4', '3']
        assert traj.times == [0, 1, 2, 3]
        assert traj.terminal.kind == HORIZON

    def test_trajectory_stop_set(self, f1_spec):
        traj = trajectory(f1_spec, '2', 10, stop_set={'0'})
        assert traj.points == ['2', '1', '0']
        assert traj.terminal.kind == ENTERED_TARGET
        assert traj.terminal.t == 2


class TestFlowEvolution:
    def test_exponential_growth(self):
        spec = make_ode(['x'], [[-10, 10]], 1e-3)
        result = evolve(spec, [1.0], 1.0)
        assert result.outcome == AT
        assert result.point[0] == pytest.approx(math.e, abs=1e-5)

    def test_blow_up_is_reported_near_one(self):
        spec = make_ode(['x^2'], [[-1e7, 1e7]], 1e-3)
        result = evolve(spec, [1.0], 2.0)
        assert result.outcome == ESCAPED
        assert 0.95 <= result.t_escape <= 1.05

    def test_escape_is_monotone(self):
        spec = make_ode(['x^2'], [[-1e7, 1e7]], 1e-3)
        t_e = evolve(spec, [1.0], 2.0).t_escape
        assert evolve(spec, [1.0], 3.0).t_escape == t_e

    def test_escape_time_is_last_grid_time_in_domain(self):
        spec = make_ode(['1'], [[0, 1.05]], 0.1)
        short = evolve(spec, [0.0], 1.07)
        long = evolve(spec, [0.0], 1.3)
        assert short.outcome == long.outcome == ESCAPED
        assert short.t_escape == long.t_escape == pytest.approx(1.0)
        assert short.t_escape <= 1.07

    def test_last_grid_point_in_domain_is_reached(self):
        spec = make_ode(['1'], [[0, 1.05]], 0.1)
        result = evolve(spec, [0.0], 1.0)
        assert result.outcome == AT
        assert result.point[0] == pytest.approx(1.0)

    @pytest.mark.slow
    def test_negative_start_decays_to_origin(self, o2_spec):
        traj = trajectory(o2_spec, [-1.0], 200.0, sample_dt=10.0)
        assert traj.terminal.kind == HORIZON
        assert evolve(o2_spec, [-1.0], 200.0).outcome == AT
        assert abs(traj.points[-1][0]) < 1e-2
        assert traj.points[-1][0] == pytest.approx(-1.0 / 201.0, abs=1e-6)

    def test_identity_at_time_zero(self, o1_spec):
        np.testing.assert_array_equal(evolve(o1_spec, [0.3], 0).point, [0.3])

    def test_semigroup_within_tolerance(self):
        spec = make_ode(['x - x^3'], [[-2, 2]], 1e-3)
        direct = evolve(spec, [0.25], 1.5).point
        middle = evolve(spec, [0.25], 0.5).point
        assert evolve(spec, middle, 1.0).point[0] == pytest.approx(direct[0], rel=1e-6)

    def test_bit_identical_repeats(self, o3_spec):
        first = evolve(o3_spec, [0.1, -0.3], 2.0).point
        second = evolve(o3_spec, [0.1, -0.3], 2.0).point
        assert first.tobytes() == second.tobytes()

    def test_out_of_domain(self, o1_spec):
        with pytest.raises(OutOfDomain):
            evolve(o1_spec, [2.5], 1.0)

    def test_trajectory_converges_to_sink(self, o1_spec):
        traj = trajectory(o1_spec, [0.25], 20.0)
        assert traj.terminal.kind == HORIZON
        assert traj.times[-1] == pytest.approx(20.0)
        assert traj.points[-1][0] == pytest.approx(1.0, abs=1e-3)

    def test_equilibrium_stays_put(self, o2_spec):
        traj = trajectory(o2_spec, [0.0], 5.0)
        assert all(p[0] == 0.0 for p in traj.points)

    def test_trajectory_truncated_at_escape(self):
        spec = make_ode(['x^2'], [[-1e7, 1e7]], 1e-3)
        traj = trajectory(spec, [1.0], 2.0, sample_dt=0.1)
        assert traj.terminal.kind == ESCAPED
        assert traj.times[-1] <= 1.05
        assert 0.95 <= traj.terminal.t <= 1.05


class TestTimeTauMap:
    def test_equilibrium_is_fixed(self, o1_spec):
        assert time_tau_map(o1_spec, 0.5)([1.0]).point[0] == pytest.approx(1.0)

    def test_moves_toward_sink(self, o1_spec):
        image = time_tau_map(o1_spec, 0.5)([2.0]).point[0]
        assert 1.0 < image < 2.0

    def test_blow_up_escapes(self):
        spec = make_ode(['x^2'], [[-1, 3]], 1e-3)
        assert time_tau_map(spec, 0.5)([3.0]).escaped

    def test_tau_below_step(self, o1_spec):
        with pytest.raises(InputError):
            time_tau_map(o1_spec, 0.001)

    def test_batch_images(self, o1_spec):
        images, escaped = time_tau_map(o1_spec, 0.5).images(np.array([[1.0], [-1.0], [0.0]]))
        np.testing.assert_allclose(images[:, 0], [1.0, -1.0, 0.0], atol=1e-12)
        assert not escaped.any()


class TestStepping:
    def test_partial_step_leaves_grid_untouched(self):
        spec = make_ode(['1'], [[0, 10]], 0.1)
        state = BatchState(spec, [[0.0]]).advance_to(0.25)
        assert state.x[0, 0] == pytest.approx(0.25)
        assert state.n == 2
        assert state.grid[0, 0] == pytest.approx(0.2)

    def test_exact_multiple_lands_on_grid(self):
        spec = make_ode(['1'], [[0, 10]], 0.01)
        state = BatchState(spec, [[0.0]]).advance_to(0.5)
        assert state.n == 50
        assert state.x[0, 0] == pytest.approx(0.5)

    def test_starting_outside_is_escaped_at_zero(self):
        spec = make_ode(['1'], [[0, 1]], 0.1)
        state = BatchState(spec, [[2.0], [0.5]])
        assert state.escaped.tolist() == [True, False]
        assert state.t_escape[0] == 0.0

    def test_sample_times_include_horizon(self):
        times = sample_times(1.05, 0.1)
        assert times[0] == 0.0
        assert times[-1] == pytest.approx(1.05)
