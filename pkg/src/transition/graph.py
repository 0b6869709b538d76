# ------ src/transition/graph.py ------

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Tuple

import networkx as nx

FORWARD = 'forward'
BACKWARD = 'backward'


@dataclass(frozen=True)
class CondensationGraph:
    """
    SCC quotient of a transition system.

    Components are numbered by their smallest cell; the escape sink is not
    a component.
    """
    comp_of: Dict[int, int]
    components: Tuple[FrozenSet[int], ...]
    recurrent: Tuple[bool, ...]
    dag_edges: Tuple[Tuple[int, int], ...]
    topo_order: Tuple[int, ...]

    @cached_property
    def dag(self):
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.components)))
        g.add_edges_from(self.dag_edges)
        return g

    @property
    def recurrent_ids(self):
        return [cid for cid in self.topo_order if self.recurrent[cid]]

    def sinks_first(self):
        """
        Recurrent components in a reverse topological order.

        The order is the lexicographic topological sort of the reversed DAG,
        so among components free to come next the smallest id goes first.
        """
        order = nx.lexicographical_topological_sort(self.dag.reverse(copy=False))
        return [cid for cid in order if self.recurrent[cid]]

    def descendants(self, cid):
        """Components reachable from cid, cid included."""
        return nx.descendants(self.dag, cid) | {cid}

    def cells_of(self, cids):
        out = set()
        for cid in cids:
            out |= self.components[cid]
        return frozenset(out)

    def summary(self):
        return {
            'components': len(self.components),
            'recurrent': sum(self.recurrent),
            'dag_edges': len(self.dag_edges),
        }


def condense(ts):
    """
    Strongly connected components with recurrence flags.

    Args:
        ts (TransitionSystem): The system

    Returns:
        CondensationGraph: Components, recurrence flags, DAG edges and a topological order
    """
    g = ts.graph
    sccs = sorted((frozenset(c) for c in nx.strongly_connected_components(g)), key=min)
    quotient = nx.condensation(g, scc=sccs)
    comp_of = {cell: cid for cid, comp in enumerate(sccs) for cell in comp}
    recurrent = tuple(
        len(comp) > 1 or g.has_edge(next(iter(comp)), next(iter(comp)))
        for comp in sccs
    )
    dag_edges = tuple(sorted(quotient.edges()))
    topo_order = tuple(nx.lexicographical_topological_sort(quotient))
    return CondensationGraph(comp_of, tuple(sccs), recurrent, dag_edges, topo_order)


def reach(ts, cells, direction=FORWARD):
    """
    Cells reachable from (forward) or reaching (backward) a set, the set included.

    Args:
        ts (TransitionSystem): The system
        cells (iterable): Seed cells
        direction (str): 'forward' or 'backward'

    Returns:
        frozenset: Reached cells
    """
    if direction == FORWARD:
        neighbours = ts.successors
    elif direction == BACKWARD:
        neighbours = ts.predecessors
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    seen = set(cells)
    queue = deque(seen)
    while queue:
        cell = queue.popleft()
        for nxt in neighbours[cell]:
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


def reach_within(ts, cells, allowed, direction=FORWARD):
    """Like reach, but only through cells of allowed."""
    allowed = frozenset(allowed)
    neighbours = ts.successors if direction == FORWARD else ts.predecessors
    seen = set(c for c in cells if c in allowed)
    queue = deque(seen)
    while queue:
        cell = queue.popleft()
        for nxt in neighbours[cell]:
            if nxt in allowed and nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)
