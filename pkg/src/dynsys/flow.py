# ------ src/dynsys/flow.py ------

"""
Partial-time evolution, trajectory sampling and time-tau maps.

Finite kinds evolve in integer steps; ODE kinds evolve with the
fixed-step integrator of their spec.
"""

import logging
import numbers
from dataclasses import dataclass, field
from typing import Any, List, Optional

import numpy as np

from config.config import DEFAULT_SAMPLE_DT
from src.dynsys.integrator import escaped_mask, integrate_many, sample_paths
from src.errors import InputError, MultivaluedState, NonIntegerTime, OutOfDomain, UnknownState

logger = logging.getLogger(__name__)

AT = 'at'
ESCAPED = 'escaped'

HORIZON = 'horizon'
ENTERED_TARGET = 'entered_target'


@dataclass(frozen=True)
class EvolveResult:
    outcome: str
    point: Any = None
    t_escape: Optional[float] = None

    @property
    def escaped(self):
        return self.outcome == ESCAPED

    @classmethod
    def at(cls, point):
        return cls(AT, point=point)

    @classmethod
    def escaped_at(cls, t_escape):
        return cls(ESCAPED, t_escape=t_escape)


@dataclass(frozen=True)
class Terminal:
    kind: str
    t: Optional[float] = None


@dataclass
class Trajectory:
    """Sampled solution; times start at 0 and points[0] is the initial condition."""
    times: List[float] = field(default_factory=list)
    points: List[Any] = field(default_factory=list)
    terminal: Terminal = Terminal(HORIZON)

    def __len__(self):
        return len(self.times)


def is_finite_kind(spec):
    return spec.kind in ('finite_map', 'digraph')


def check_time(spec, t):
    if isinstance(t, bool) or not isinstance(t, numbers.Real):
        raise InputError(f"time must be a real number, got {t!r}")
    if t < 0:
        raise InputError(f"time must be nonnegative, got {t}")
    if is_finite_kind(spec):
        if float(t) != int(t):
            raise NonIntegerTime(t)
        return int(t)
    return float(t)


def check_state(spec, x):
    state = str(x)
    if state not in spec.labels:
        raise UnknownState(state)
    return state


def check_point(spec, x):
    point = np.atleast_1d(np.asarray(x, dtype=float))
    if point.shape != (spec.dim,):
        raise InputError(f"point must have {spec.dim} components, got {point.tolist()}")
    if escaped_mask(spec, point[None, :])[0]:
        raise OutOfDomain(point.tolist())
    return point


def step_state(spec, state):
    """
    One application of a finite system.

    Returns:
        str or None: The image, or None when the state has no successor
    """
    if spec.kind == 'finite_map':
        return spec.map[state]
    targets = sorted({v for u, v in spec.edges if u == state})
    if not targets:
        return None
    if len(targets) > 1:
        raise MultivaluedState(state, len(targets))
    return targets[0]


def evolve(spec, x, t):
    """
    Evolve a state or point for time t.

    Args:
        spec: FiniteMapSpec, DigraphSpec or OdeSpec
        x: State identifier (finite kinds) or point (ode)
        t: Nonnegative time; an integer number of steps for finite kinds

    Returns:
        EvolveResult: At(point) or Escaped(t_escape)
    """
    t = check_time(spec, t)
    if is_finite_kind(spec):
        state = check_state(spec, x)
        for k in range(t):
            state = step_state(spec, state)
            if state is None:
                return EvolveResult.escaped_at(k + 1)
        return EvolveResult.at(state)

    point = check_point(spec, x)
    final, escaped, t_escape = integrate_many(spec, point[None, :], t)
    if escaped[0]:
        return EvolveResult.escaped_at(float(t_escape[0]))
    return EvolveResult.at(final[0].copy())


def _in_stop_set(stop_set, point):
    if stop_set is None:
        return False
    if callable(stop_set):
        return bool(stop_set(point))
    return point in stop_set


def trajectory(spec, x, t_max, sample_dt=None, stop_set=None):
    """
    Sample the solution through x on [0, t_max].

    Args:
        spec: System spec
        x: Initial state or point
        t_max: Horizon
        sample_dt (float): Sample spacing for ODEs, default DEFAULT_SAMPLE_DT; finite kinds sample every step
        stop_set: Predicate or container; sampling stops at the first sample inside it

    Returns:
        Trajectory: Times, points and terminal condition
    """
    t_max = check_time(spec, t_max)
    if is_finite_kind(spec):
        state = check_state(spec, x)
        result = Trajectory(times=[0], points=[state])
        if _in_stop_set(stop_set, state):
            result.terminal = Terminal(ENTERED_TARGET, 0)
            return result
        for k in range(1, t_max + 1):
            state = step_state(spec, state)
            if state is None:
                result.terminal = Terminal(ESCAPED, k)
                return result
            result.times.append(k)
            result.points.append(state)
            if _in_stop_set(stop_set, state):
                result.terminal = Terminal(ENTERED_TARGET, k)
                return result
        return result

    point = check_point(spec, x)
    sample_dt = DEFAULT_SAMPLE_DT if sample_dt is None else float(sample_dt)
    times, paths, t_escape = sample_paths(spec, point[None, :], t_max, sample_dt)
    result = Trajectory()
    for k, t in enumerate(times):
        sample = paths[0, k]
        if not np.all(np.isfinite(sample)):
            result.terminal = Terminal(ESCAPED, float(t_escape[0]))
            return result
        result.times.append(float(t))
        result.points.append(sample.copy())
        if _in_stop_set(stop_set, sample):
            result.terminal = Terminal(ENTERED_TARGET, float(t))
            return result
    if not np.isnan(t_escape[0]):
        result.terminal = Terminal(ESCAPED, float(t_escape[0]))
    return result


class TimeTauMap:
    """
    The deterministic partial map x -> evolve(spec, x, tau) of an ODE.
    """
    def __init__(self, spec, tau):
        if spec.kind != 'ode':
            raise InputError('time-tau maps are defined for ode systems only')
        if tau < spec.dt:
            raise InputError(f"tau={tau} is shorter than the integrator step {spec.dt}")
        self.spec = spec
        self.tau = float(tau)

    def __call__(self, x):
        return evolve(self.spec, x, self.tau)

    def images(self, points):
        """
        Apply the map to a batch.

        Args:
            points (ndarray): Shape (n, dim)

        Returns:
            tuple: (images (n, dim), escaped flags (n,))
        """
        final, escaped, _ = integrate_many(self.spec, points, self.tau)
        return final, escaped


def time_tau_map(spec, tau):
    return TimeTauMap(spec, tau)
