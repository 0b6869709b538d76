# ------ src/dynsys/integrator.py ------

"""
Fixed-step RK4 over batches of initial points, with escape detection.

A point escapes once it leaves the domain box, exceeds the magnitude cap
or turns non-finite. Escaped points are frozen at their last in-domain
grid point and report that grid time.
"""

import logging
import math

import numpy as np

logger = logging.getLogger(__name__)

STEP_EPS = 1e-9


def vector_field(spec):
    """
    Build the batched right-hand side of an ODE spec.

    Args:
        spec (OdeSpec): The system

    Returns:
        callable: f(points) mapping shape (n, dim) to shape (n, dim)
    """
    exprs = spec.exprs

    def f(points):
        return np.stack([expr.evaluate(points) for expr in exprs], axis=1)

    return f


def rk4_step(f, x, h):
    """One classical Runge-Kutta step of size h for every row of x."""
    with np.errstate(all='ignore'):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def escaped_mask(spec, x):
    """Rows of x that are outside the box, above the cap or non-finite."""
    box = np.asarray(spec.domain, dtype=float)
    with np.errstate(invalid='ignore'):
        bad = ~np.all(np.isfinite(x), axis=1)
        bad |= np.any(np.abs(x) > spec.cap, axis=1)
        bad |= np.any(x < box[:, 0], axis=1) | np.any(x > box[:, 1], axis=1)
    return bad


class BatchState:
    """
    Positions, clock and escape bookkeeping for a batch of initial points.

    Rows move along the fixed grid of times n * dt. A row escapes when the
    next grid point it would need is outside the domain; its escape time is
    the last in-domain grid time, so it does not depend on the horizon.
    """
    def __init__(self, spec, points, dt=None):
        self.spec = spec
        self.f = vector_field(spec)
        self.dt = spec.dt if dt is None else float(dt)
        self.grid = np.array(points, dtype=float).reshape(-1, spec.dim)
        self.n = 0
        self.x = self.grid.copy()
        self.t = 0.0
        self.escaped = escaped_mask(spec, self.grid)
        self.t_escape = np.where(self.escaped, 0.0, np.nan)

    def _grid_step(self, commit=True):
        """Full step for every live row; rows landing outside escape at n * dt."""
        live = np.flatnonzero(~self.escaped)
        x_new = rk4_step(self.f, self.grid[live], self.dt)
        out = escaped_mask(self.spec, x_new)
        if out.any():
            hit = live[out]
            self.escaped[hit] = True
            self.t_escape[hit] = self.n * self.dt
            logger.debug("%d point(s) escaped after t=%.6g", len(hit), self.n * self.dt)
        if commit:
            self.grid[live[~out]] = x_new[~out]
            self.n += 1

    def advance_to(self, t):
        """Integrate every live point up to absolute time t (not before the current clock)."""
        t = float(t)
        n_target = int(math.floor(t / self.dt + STEP_EPS))
        while self.n < n_target and not self.escaped.all():
            self._grid_step()
        self.n = max(self.n, n_target)
        self.x = self.grid.copy()
        remainder = t - n_target * self.dt
        if remainder > STEP_EPS * self.dt and not self.escaped.all():
            self._grid_step(commit=False)
            live = ~self.escaped
            self.x[live] = rk4_step(self.f, self.grid[live], remainder)
        self.t = t
        return self


def integrate_many(spec, points, t, dt=None):
    """
    Integrate a batch of points for time t.

    Args:
        spec (OdeSpec): The system
        points (array-like): Initial points, shape (n, dim)
        t (float): Duration
        dt (float): Step override, defaults to the spec's integrator step

    Returns:
        tuple: (final points (n, dim), escaped flags (n,), escape times (n,), NaN when not escaped)
    """
    state = BatchState(spec, points, dt).advance_to(t)
    return state.x, state.escaped, state.t_escape


def sample_times(t_max, sample_dt):
    """Times k * sample_dt up to t_max, with t_max itself always included."""
    if sample_dt <= 0:
        raise ValueError(f"sample_dt must be positive, got {sample_dt}")
    count = int(math.floor(t_max / sample_dt + STEP_EPS))
    times = [k * sample_dt for k in range(count + 1)]
    if t_max - times[-1] > STEP_EPS * sample_dt:
        times.append(float(t_max))
    return np.asarray(times, dtype=float)


def sample_paths(spec, points, t_max, sample_dt, dt=None):
    """
    Integrate a batch and record every path at regular sample times.

    Args:
        spec (OdeSpec): The system
        points (array-like): Initial points, shape (n, dim)
        t_max (float): Horizon
        sample_dt (float): Spacing of the recorded samples
        dt (float): Step override

    Returns:
        tuple: (times (m,), paths (n, m, dim) with NaN after escape, escape times (n,))
    """
    times = sample_times(float(t_max), float(sample_dt))
    state = BatchState(spec, points, dt)
    paths = np.full((len(state.x), len(times), spec.dim), np.nan)
    paths[:, 0] = state.x
    for k in range(1, len(times)):
        state.advance_to(times[k])
        live = ~state.escaped
        paths[live, k] = state.x[live]
    return times, paths, state.t_escape
