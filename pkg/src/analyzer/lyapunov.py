# ------ src/analyzer/lyapunov.py ------

"""
Lyapunov functions built from a distance-like function zeta.

    xi(x) = sup over t >= 0 of zeta(x(t))
    L(x)  = xi(x) + integral over [0, inf) of exp(-t) * xi(x(t)) dt

Finite deterministic systems use unit steps and the sum with weights
exp(-k); ODEs use sampled paths and the trapezoid rule on [0, tmax].
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, List, Optional

import networkx as nx
import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from config.config import (
    DECREASE_SAMPLE_DT, DECREASE_SAMPLES, DECREASE_SPAN, DECREASE_TOL, DEFAULT_HORIZON, DEFAULT_TMAX,
    SEPARATION_EPS, ZETA_TOL,
)
from src.analyzer.attractors import basin
from src.dynsys.integrator import sample_paths
from src.errors import (
    AnalysisError, EmptyAttractor, HorizonTooShort, NotDeterministic, NotInBasin, Overlap,
)
from src.transition.graph import reach
from src.transition.system import FROM_ODE

logger = logging.getLogger(__name__)

ZETA = 'zeta'
LYAPUNOV = 'L'

# query points per distance batch
DISTANCE_CHUNK = 2048
# paths per integration batch
PATH_CHUNK = 256


@dataclass
class ScalarField:
    """
    Values of zeta, xi or L on a set of cells.

    Attributes:
        kind (str): 'zeta', 'xi' or 'L'
        cells (ndarray): Cell indices
        values (ndarray): One value per cell, NaN where evaluation failed
        points (ndarray): Query point per cell (cell centers for ODEs)
        failures (dict): Cell index to error message
        evaluator (callable): Point evaluator for ODE zeta fields
    """
    kind: str
    cells: np.ndarray
    values: np.ndarray
    points: Optional[np.ndarray] = None
    failures: Dict[int, str] = field(default_factory=dict)
    evaluator: Optional[Callable] = None

    def __post_init__(self):
        self._index = {int(c): i for i, c in enumerate(self.cells)}

    def __getitem__(self, cell):
        return float(self.values[self._index[int(cell)]])

    def zero_set(self):
        return frozenset(int(c) for c, v in zip(self.cells, self.values) if v == 0)


@dataclass
class DecreaseReport:
    checked: int = 0
    exempt: int = 0
    skipped: int = 0
    violations: List[tuple] = field(default_factory=list)

    @property
    def passed(self):
        return not self.violations


class BoxDistance:
    """
    Euclidean distance from points to a union of grid cells.
    """
    def __init__(self, grid, cells):
        cells = sorted(cells)
        if not cells:
            raise EmptyAttractor()
        self.lower, self.upper = grid.bounds(cells)

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        flat = points.reshape(-1, points.shape[-1])
        out = np.empty(len(flat))
        for start in range(0, len(flat), DISTANCE_CHUNK):
            chunk = flat[start:start + DISTANCE_CHUNK, None, :]
            gap = np.maximum(np.maximum(self.lower - chunk, chunk - self.upper), 0.0)
            out[start:start + DISTANCE_CHUNK] = np.sqrt((gap ** 2).sum(axis=2)).min(axis=1)
        return out.reshape(points.shape[:-1])


def hitting_distance(ts, cells):
    """
    Forward hitting distance into a set, capped at n_cells + 1.

    Args:
        ts (TransitionSystem): The system
        cells (iterable): Target set

    Returns:
        ndarray: One distance per cell
    """
    cells = frozenset(cells)
    lengths = nx.multi_source_dijkstra_path_length(ts.graph.reverse(copy=False), cells)
    dist = np.full(ts.n_cells, float(ts.n_cells + 1))
    for cell, length in lengths.items():
        dist[cell] = float(length)
    return dist


def k0_distance(ts, cells):
    """
    A function vanishing exactly on the attractor cells.

    Combinatorial systems get the forward hitting distance; ODE systems the
    Euclidean distance to the union of the attractor's cell boxes, with an
    evaluator for arbitrary points.

    Args:
        ts (TransitionSystem): The system
        cells (iterable): Nonempty attractor

    Returns:
        ScalarField: zeta on every cell of the support
    """
    cells = frozenset(cells)
    if not cells:
        raise EmptyAttractor()
    support = np.array(ts.cells, dtype=np.int64)
    if ts.origin.kind == FROM_ODE:
        distance = BoxDistance(ts.grid, cells)
        centers = ts.grid.centers(support)
        values = distance(centers)
        values[np.isin(support, sorted(cells))] = 0.0
        return ScalarField(ZETA, support, values, points=centers, evaluator=distance)
    values = hitting_distance(ts, cells)[support]
    return ScalarField(ZETA, support, values)


def _as_cell(ts, x):
    if isinstance(x, str):
        return ts.index_of(x)
    return int(x)


class FiniteLyapunov:
    """
    zeta, xi and L on a finite system.

    Deterministic systems get the exact orbit sums. Multivalued systems get
    xi as the maximum of zeta over everything reachable; L is undefined there.
    """
    def __init__(self, ts, zeta):
        self.ts = ts
        self.zeta = zeta
        self.attractor = zeta.zero_set()
        if not self.attractor:
            raise EmptyAttractor()

    @property
    def deterministic(self):
        return self.ts.is_deterministic

    def orbit(self, cell):
        """Orbit from cell up to and including its entry into the attractor."""
        cell = _as_cell(self.ts, cell)
        path = [cell]
        seen = {cell}
        while cell not in self.attractor:
            if self.ts.escape_flag[cell] or not self.ts.successors[cell]:
                raise NotInBasin(self.ts.label(path[0]))
            cell = self.ts.successors[cell][0]
            if cell in seen:
                raise NotInBasin(self.ts.label(path[0]))
            seen.add(cell)
            path.append(cell)
        return path

    def xi(self, cell):
        cell = _as_cell(self.ts, cell)
        if self.deterministic:
            return max(self.zeta[c] for c in self.orbit(cell))
        if cell not in self.basin:
            raise NotInBasin(self.ts.label(cell))
        return max(self.zeta[c] for c in reach(self.ts, [cell]))

    def value(self, cell):
        """L(x) = xi(x) + sum over the orbit of exp(-k) * xi(f^k x)."""
        if not self.deterministic:
            raise NotDeterministic('the Lyapunov sum')
        path = self.orbit(cell)
        zeta = np.array([self.zeta[c] for c in path])
        xi = np.maximum.accumulate(zeta[::-1])[::-1]
        weights = np.exp(-np.arange(len(path), dtype=float))
        return float(xi[0] + np.dot(weights, xi))

    @cached_property
    def basin(self):
        return basin(self.ts, self.attractor)

    def field(self, scope=None):
        """
        L on every cell of scope (default: the basin).

        Returns:
            ScalarField: L values, NaN with a failure message where evaluation failed
        """
        cells = np.array(sorted(self.basin if scope is None else {_as_cell(self.ts, c) for c in scope}))
        values = np.full(len(cells), np.nan)
        failures = {}
        for i, cell in enumerate(cells):
            try:
                values[i] = self.value(cell)
            except AnalysisError as exc:
                failures[int(cell)] = str(exc)
        return ScalarField(LYAPUNOV, cells, values, failures=failures)

    def table(self, scope=None):
        """cell_index, zeta, xi and L for every scope cell."""
        L = self.field(scope)
        xi = []
        for cell in L.cells:
            try:
                xi.append(self.xi(cell))
            except AnalysisError:
                xi.append(np.nan)
        return pd.DataFrame({
            'cell_index': L.cells.astype(int),
            'zeta': [self.zeta[c] for c in L.cells],
            'xi': xi,
            'L': L.values,
        })

    def verify_decrease(self):
        """
        Exact check off the attractor: L(f(x)) < L(x) for deterministic systems,
        xi(v) <= xi(u) on every edge u -> v otherwise.
        """
        report = DecreaseReport()
        for cell in sorted(self.basin):
            if cell in self.attractor:
                report.exempt += 1
                continue
            report.checked += 1
            if self.deterministic:
                nxt = self.ts.successors[cell][0]
                if not self.value(nxt) < self.value(cell):
                    report.violations.append((cell, self.value(cell), self.value(nxt)))
            else:
                for nxt in self.ts.successors[cell]:
                    if self.xi(nxt) > self.xi(cell):
                        report.violations.append((cell, self.xi(cell), self.xi(nxt)))
        return report


class FlowLyapunov:
    """
    zeta, xi and L for an ODE, evaluated along sampled solutions.

    Args:
        spec (OdeSpec): The system
        zeta (callable): Point evaluator vanishing on the attractor
        horizon (float): Length of the sampled paths
        tmax (float): Upper limit of the truncated integral
        dt (float): Integrator step and sample spacing; the spec's step if omitted
        zeta_tol (float): Paths must end with zeta at most this
    """
    def __init__(self, spec, zeta, horizon=DEFAULT_HORIZON, tmax=DEFAULT_TMAX, dt=None, zeta_tol=ZETA_TOL):
        self.spec = spec
        self.zeta = zeta
        self.tmax = float(tmax)
        self.horizon = max(float(horizon), self.tmax)
        self.dt = spec.dt if dt is None else float(dt)
        self.zeta_tol = zeta_tol

    def _paths(self, points, duration):
        return sample_paths(self.spec, points, duration, self.dt, dt=self.dt)

    def evaluate(self, points):
        """
        zeta, xi and L at a batch of points.

        Returns:
            tuple: (zeta, xi, L, errors) with errors a list of exception-or-None per point
        """
        points = np.asarray(points, dtype=float).reshape(-1, self.spec.dim)
        n = len(points)
        zeta0, xi0, value = np.full(n, np.nan), np.full(n, np.nan), np.full(n, np.nan)
        errors = [None] * n
        for start in range(0, n, PATH_CHUNK):
            batch = slice(start, min(start + PATH_CHUNK, n))
            times, paths, t_escape = self._paths(points[batch], self.horizon)
            zeta = self.zeta(paths)
            window = times <= self.tmax + 1e-9 * self.dt
            for row in range(paths.shape[0]):
                i = start + row
                zeta0[i] = zeta[row, 0]
                if not np.isnan(t_escape[row]):
                    errors[i] = NotInBasin(points[i].tolist())
                    continue
                if zeta[row, -1] > self.zeta_tol:
                    errors[i] = HorizonTooShort(self.horizon, float(zeta[row, -1]))
                    continue
                xi = np.maximum.accumulate(zeta[row, ::-1])[::-1]
                xi0[i] = xi[0]
                value[i] = xi[0] + trapezoid(np.exp(-times[window]) * xi[window], times[window])
        return zeta0, xi0, value, errors

    def _single(self, x, column):
        result = self.evaluate(np.atleast_1d(np.asarray(x, dtype=float))[None, :])
        if result[3][0] is not None:
            raise result[3][0]
        return float(result[column][0])

    def xi(self, x):
        return self._single(x, 1)

    def value(self, x):
        return self._single(x, 2)

    def field(self, grid, cells):
        """L at the centers of the given cells."""
        cells = np.array(sorted(cells), dtype=np.int64)
        centers = grid.centers(cells)
        _, _, values, errors = self.evaluate(centers)
        failures = {int(c): str(e) for c, e in zip(cells, errors) if e is not None}
        return ScalarField(LYAPUNOV, cells, values, points=centers, failures=failures)

    def table(self, grid, cells):
        cells = np.array(sorted(cells), dtype=np.int64)
        centers = grid.centers(cells)
        zeta, xi, values, _ = self.evaluate(centers)
        data = {'cell_index': cells}
        for axis in range(centers.shape[1]):
            data[f"x{axis + 1}"] = centers[:, axis]
        data.update(zeta=zeta, xi=xi, L=values)
        return pd.DataFrame(data)

    def along_paths(self, points, span, sample_dt):
        """
        L at regular samples of the solutions through the given points.

        One path per point is integrated over [0, span + horizon]; the value
        at sample time s uses the same path from s on.

        Returns:
            tuple: (sample times (m,), zeta (n, m), L (n, m)) with NaN for escaped paths
        """
        points = np.asarray(points, dtype=float).reshape(-1, self.spec.dim)
        times, paths, t_escape = self._paths(points, span + self.horizon)
        zeta = self.zeta(paths)
        stride = max(int(round(sample_dt / self.dt)), 1)
        n_window = int(round(self.tmax / self.dt)) + 1
        starts = np.arange(0, int(round(span / self.dt)) + 1, stride)
        L = np.full((len(points), len(starts)), np.nan)
        for row in range(len(points)):
            if not np.isnan(t_escape[row]):
                continue
            xi = np.maximum.accumulate(zeta[row, ::-1])[::-1]
            for col, k in enumerate(starts):
                seg = slice(k, k + n_window)
                local = times[seg] - times[k]
                L[row, col] = xi[k] + trapezoid(np.exp(-local) * xi[seg], local)
        return times[starts], zeta[:, starts], L

    def verify_decrease(self, samples=DECREASE_SAMPLES, tol=DECREASE_TOL, seed=0,
                        span=DECREASE_SPAN, sample_dt=DECREASE_SAMPLE_DT, points=None):
        """
        Check that L decreases along sampled solutions.

        A step from sample j to j+1 is a violation when L rises by tol or
        more; steps starting where zeta < zeta_tol are exempt.
        """
        if points is None:
            rng = np.random.default_rng(seed)
            box = np.asarray(self.spec.domain, dtype=float)
            points = rng.uniform(box[:, 0], box[:, 1], size=(samples, self.spec.dim))
        times, zeta, L = self.along_paths(points, span, sample_dt)
        report = DecreaseReport()
        for row in range(L.shape[0]):
            if np.isnan(L[row]).any():
                report.skipped += 1
                continue
            for col in range(L.shape[1] - 1):
                if zeta[row, col] < self.zeta_tol:
                    report.exempt += 1
                    continue
                report.checked += 1
                if L[row, col + 1] - L[row, col] >= tol:
                    report.violations.append((row, float(times[col]), float(L[row, col]), float(L[row, col + 1])))
        logger.info("decrease check: %d step(s) checked, %d exempt, %d violation(s)",
                    report.checked, report.exempt, len(report.violations))
        return report


def lyapunov_for(ts, zeta, horizon=DEFAULT_HORIZON, tmax=DEFAULT_TMAX, dt=None):
    """The finite or flow construction matching the origin of ts."""
    if ts.origin.kind == FROM_ODE:
        return FlowLyapunov(ts.spec, zeta.evaluator, horizon=horizon, tmax=tmax, dt=dt)
    return FiniteLyapunov(ts, zeta)


def xi(ts, zeta, x, horizon=DEFAULT_HORIZON):
    """Envelope sup of zeta along the solution through x."""
    return lyapunov_for(ts, zeta, horizon=horizon).xi(x)


def lyapunov_value(ts, zeta, x, horizon=DEFAULT_HORIZON, quad=None, tmax=DEFAULT_TMAX):
    """L(x); quad is the trapezoid step for ODEs (the integrator step by default)."""
    return lyapunov_for(ts, zeta, horizon=horizon, tmax=tmax, dt=quad).value(x)


def lyapunov_field(ts, cells, scope=None, horizon=DEFAULT_HORIZON, tmax=DEFAULT_TMAX, dt=None):
    """
    L on each cell of scope (cell centers for ODEs).

    Args:
        ts (TransitionSystem): The system
        cells (iterable): The attractor
        scope (iterable): Cells to evaluate, default the basin of the attractor

    Returns:
        ScalarField: L values with per-cell failures
    """
    zeta = k0_distance(ts, cells)
    construction = lyapunov_for(ts, zeta, horizon=horizon, tmax=tmax, dt=dt)
    if ts.origin.kind == FROM_ODE:
        scope = basin(ts, cells) if scope is None else scope
        return construction.field(ts.grid, scope)
    return construction.field(scope)


def verify_decrease(ts, cells, samples=DECREASE_SAMPLES, tol=DECREASE_TOL, seed=0):
    """Decrease report for the plain construction on an attractor."""
    construction = lyapunov_for(ts, k0_distance(ts, cells))
    if ts.origin.kind == FROM_ODE:
        return construction.verify_decrease(samples=samples, tol=tol, seed=seed)
    return construction.verify_decrease()


def bump(d_target, d_attractor, eps=SEPARATION_EPS):
    """1 on the target, 0 on the attractor, linear in the distance ratio between."""
    d_target = np.asarray(d_target, dtype=float)
    d_attractor = np.asarray(d_attractor, dtype=float)
    with np.errstate(invalid='ignore', divide='ignore'):
        ratio = d_target / np.maximum(d_target + d_attractor, eps)
    ratio = np.where(np.isinf(d_target), 1.0, ratio)
    ratio = np.where(np.isnan(ratio), 0.0, ratio)
    return np.clip(1.0 - ratio, 0.0, 1.0)


def hop_distance(ts, cells):
    """Undirected hop distance to a set, inf where unreachable."""
    lengths = nx.multi_source_dijkstra_path_length(ts.graph.to_undirected(as_view=True), frozenset(cells))
    dist = np.full(ts.n_cells, np.inf)
    for cell, length in lengths.items():
        dist[cell] = float(length)
    return dist


def separating_lyapunov(ts, cells, target, horizon=DEFAULT_HORIZON, tmax=DEFAULT_TMAX, dt=None):
    """
    Lyapunov construction with L >= 1 on a target set K.

    zeta is replaced by eta = zeta + psi with psi = 1 on K and 0 on the
    attractor.

    Args:
        ts (TransitionSystem): The system
        cells (iterable): The attractor
        target (iterable): Cells of K, disjoint from the attractor

    Returns:
        FiniteLyapunov or FlowLyapunov: The construction built on eta
    """
    cells = frozenset(cells)
    target = frozenset(_as_cell(ts, c) for c in target)
    overlap = target & cells
    if overlap:
        raise Overlap(overlap)
    zeta = k0_distance(ts, cells)
    region = basin(ts, cells)
    outside = target - region
    if outside:
        raise NotInBasin(ts.label(min(outside)))

    if ts.origin.kind == FROM_ODE:
        if not target:
            return FlowLyapunov(ts.spec, zeta.evaluator, horizon=horizon, tmax=tmax, dt=dt)
        to_target = BoxDistance(ts.grid, target)
        to_attractor = zeta.evaluator

        def eta(points):
            return to_attractor(points) + bump(to_target(points), to_attractor(points))

        return FlowLyapunov(ts.spec, eta, horizon=horizon, tmax=tmax, dt=dt)

    if target:
        psi = bump(hop_distance(ts, target), hop_distance(ts, cells))[zeta.cells]
        zeta = ScalarField(ZETA, zeta.cells, zeta.values + psi)
    return FiniteLyapunov(ts, zeta)
