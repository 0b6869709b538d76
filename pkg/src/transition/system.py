# ------ src/transition/system.py ------

"""
Multivalued cell maps with an escape sink.

A TransitionSystem stores, per cell, a sorted tuple of successor cells and
a flag for an edge into the escape sink. The sink itself is not a cell.
"""

import logging
import time
from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, Optional

import networkx as nx
import numpy as np

from config.config import DEFAULT_BLOAT, DEFAULT_DEPTH, DEFAULT_SAMPLES_PER_AXIS, DEFAULT_TAU, get_cell_cap
from src.dynsys.flow import time_tau_map
from src.errors import GridTooLarge, InputError
from src.transition.grid import Grid

logger = logging.getLogger(__name__)

CellSet = FrozenSet[int]

FROM_MAP = 'from_map'
FROM_DIGRAPH = 'from_digraph'
FROM_ODE = 'from_ode'

# cells per batch handed to the integrator
BUILD_CHUNK = 8192


@dataclass(frozen=True)
class Origin:
    kind: str
    tau: Optional[float] = None
    bloat: Optional[float] = None
    samples_per_axis: Optional[int] = None

    def describe(self):
        info = {'kind': self.kind}
        if self.kind == FROM_ODE:
            info.update(tau=self.tau, bloat=self.bloat, samples_per_axis=self.samples_per_axis)
        return info


class TransitionSystem:
    """
    Combinatorial enclosure of a dynamical system.

    Attributes:
        n_cells (int): Number of cells in the carrier
        successors (tuple): Per-cell sorted tuple of successor cells
        escape_flag (ndarray): Per-cell flag for an edge to the escape sink
        origin (Origin): How the system was built
        support (frozenset): Cells taking part; a restriction shrinks it
    """
    def __init__(self, successors, escape_flag, origin, labels=None, spec=None, grid=None, support=None):
        self.successors = tuple(tuple(sorted(set(s))) for s in successors)
        self.n_cells = len(self.successors)
        self.escape_flag = np.asarray(escape_flag, dtype=bool).copy()
        self.escape_flag.setflags(write=False)
        self.origin = origin
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(self.n_cells))
        self.spec = spec
        self.grid = grid
        self.support = frozenset(range(self.n_cells)) if support is None else frozenset(support)

    @property
    def cells(self):
        return sorted(self.support)

    @cached_property
    def predecessors(self):
        preds = [[] for _ in range(self.n_cells)]
        for u in self.support:
            for v in self.successors[u]:
                preds[v].append(u)
        return tuple(tuple(sorted(p)) for p in preds)

    @cached_property
    def graph(self):
        """Successor digraph over the support, escape sink excluded."""
        g = nx.DiGraph()
        g.add_nodes_from(self.cells)
        g.add_edges_from((u, v) for u in self.cells for v in self.successors[u])
        return g

    @property
    def n_edges(self):
        return sum(len(self.successors[c]) for c in self.support)

    @property
    def escape_cells(self):
        return frozenset(c for c in self.support if self.escape_flag[c])

    @cached_property
    def is_deterministic(self):
        return all(len(self.successors[c]) + int(self.escape_flag[c]) == 1 for c in self.support)

    def image(self, cells):
        """Successor cells of a set, escape sink excluded."""
        out = set()
        for c in cells:
            out.update(self.successors[c])
        return frozenset(out)

    def preimage(self, cells):
        out = set()
        for c in cells:
            out.update(self.predecessors[c])
        return frozenset(out)

    def escapes(self, cells):
        """True if any cell of the set has an edge to the escape sink."""
        return any(self.escape_flag[c] for c in cells)

    def label(self, cell):
        return self.labels[cell]

    def index_of(self, label):
        return self.labels.index(str(label))

    def restrict(self, cells):
        """
        Subsystem on a set of cells.

        Edges leaving the set are redirected to the escape sink; cells
        outside the set lose their edges and drop out of the support.
        """
        keep = frozenset(cells)
        successors = []
        escape = np.zeros(self.n_cells, dtype=bool)
        for c in range(self.n_cells):
            if c not in keep:
                successors.append(())
                continue
            inside = [v for v in self.successors[c] if v in keep]
            successors.append(inside)
            escape[c] = self.escape_flag[c] or len(inside) < len(self.successors[c])
        return TransitionSystem(successors, escape, self.origin, self.labels, self.spec, self.grid, keep)

    def statistics(self):
        return {
            'cells': len(self.support),
            'edges': self.n_edges,
            'escape_cells': len(self.escape_cells),
            'deterministic': self.is_deterministic,
        }


def from_finite_map(spec):
    index = {state: i for i, state in enumerate(spec.states)}
    successors = [(index[spec.map[state]],) for state in spec.states]
    escape = np.zeros(len(spec.states), dtype=bool)
    return TransitionSystem(successors, escape, Origin(FROM_MAP), spec.states, spec)


def from_digraph(spec):
    index = {cell: i for i, cell in enumerate(spec.cells)}
    successors = [set() for _ in spec.cells]
    for u, v in spec.edges:
        successors[index[u]].add(index[v])
    escape = np.array([not s for s in successors], dtype=bool)
    return TransitionSystem(successors, escape, Origin(FROM_DIGRAPH), spec.cells, spec)


def from_ode(spec, grid, tau, bloat, samples_per_axis):
    if bloat < 0:
        raise InputError(f"bloat must be nonnegative, got {bloat}")
    if samples_per_axis < 2:
        raise InputError(f"samples_per_axis must be at least 2, got {samples_per_axis}")
    cap = get_cell_cap()
    if grid.n_cells > cap:
        raise GridTooLarge(grid.n_cells, cap)

    tau_map = time_tau_map(spec, tau)
    start = time.perf_counter()
    successors = []
    escape = np.zeros(grid.n_cells, dtype=bool)
    for chunk_start in range(0, grid.n_cells, BUILD_CHUNK):
        cells = np.arange(chunk_start, min(chunk_start + BUILD_CHUNK, grid.n_cells))
        points = grid.samples(cells, samples_per_axis)
        n, m, dim = points.shape
        images, escaped = tau_map.images(points.reshape(-1, dim))
        images = images.reshape(n, m, dim)
        escaped = escaped.reshape(n, m)
        escape[cells] = escaped.any(axis=1)

        masked = np.where(escaped[:, :, None], np.nan, images)
        live = ~escaped.all(axis=1)
        core_lo = np.nanmin(masked[live], axis=1)
        core_hi = np.nanmax(masked[live], axis=1)
        first = np.zeros((n, dim), dtype=np.int64)
        last = np.zeros((n, dim), dtype=np.int64)
        first[live], last[live] = grid.index_ranges(core_lo - bloat * grid.widths, core_hi + bloat * grid.widths)
        cell_lo, cell_hi = grid.bounds(cells[live])
        meets_self = np.zeros(n, dtype=bool)
        meets_self[live] = np.all((core_lo <= cell_hi) & (core_hi >= cell_lo), axis=1)

        for row, cell in enumerate(cells):
            if not live[row]:
                successors.append(())
                continue
            targets = grid.cells_in_ranges(first[row], last[row])
            if not meets_self[row]:
                targets = [t for t in targets if t != cell]
            successors.append(targets)
        logger.debug("built transitions for cells %d..%d", cells[0], cells[-1])

    logger.info("enclosure of %d cells built in %.3fs (%d escaping)",
                grid.n_cells, time.perf_counter() - start, int(escape.sum()))
    origin = Origin(FROM_ODE, tau=float(tau), bloat=float(bloat), samples_per_axis=int(samples_per_axis))
    return TransitionSystem(successors, escape, origin, spec=spec, grid=grid)


def build_transitions(spec, grid=None, tau=None, bloat=None, samples_per_axis=None, depth=None):
    """
    Build the transition system of a spec.

    Args:
        spec: FiniteMapSpec, DigraphSpec or OdeSpec
        grid (Grid): Grid for ODE specs; built from the domain and depth if omitted
        tau (float): Time-tau step for ODE specs
        bloat (float): Enclosure margin in cell widths
        samples_per_axis (int): Sample pattern per cell
        depth (int): Grid depth when no grid is given

    Returns:
        TransitionSystem: The combinatorial enclosure
    """
    if spec.kind == 'finite_map':
        return from_finite_map(spec)
    if spec.kind == 'digraph':
        return from_digraph(spec)
    if grid is None:
        grid = Grid(spec.domain, DEFAULT_DEPTH if depth is None else depth)
    return from_ode(
        spec, grid,
        DEFAULT_TAU if tau is None else tau,
        DEFAULT_BLOAT if bloat is None else bloat,
        DEFAULT_SAMPLES_PER_AXIS if samples_per_axis is None else samples_per_axis,
    )
