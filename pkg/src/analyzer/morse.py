# ------ src/analyzer/morse.py ------

"""
Dual repellers, Morse decompositions, unstable sets and their verifier.

Everything is computed in the subsystem on the global attractor.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import networkx as nx

from src.analyzer.attractors import (
    AttractorRecord, attractor_of_downset, basin, global_attractor, validate_attractor, downset_of,
)
from src.analyzer.limits import is_solution_invariant
from src.errors import ChainEntryNotAttractor, ChainNotIncreasing, NotAttractorInSubsystem, NotForwardClosed
from src.transition.graph import BACKWARD, condense, reach, reach_within

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MorseDecomposition:
    """
    Attributes:
        global_attractor (frozenset): The cells of the global attractor
        chain (tuple): A_0 = {} inside A_1 ... inside A_n = global attractor
        records (tuple): AttractorRecords of A_1..A_n in the subsystem
        morse_sets (tuple): M_1..M_n
        repellers (tuple): A_0*..A_{n-1}*
    """
    global_attractor: frozenset
    chain: Tuple[frozenset, ...]
    records: Tuple[AttractorRecord, ...]
    morse_sets: Tuple[frozenset, ...]
    repellers: Tuple[frozenset, ...]

    def __len__(self):
        return len(self.morse_sets)

    def swapped(self, i, j):
        """Copy with Morse sets i and j (1-based) exchanged."""
        sets = list(self.morse_sets)
        sets[i - 1], sets[j - 1] = sets[j - 1], sets[i - 1]
        return MorseDecomposition(self.global_attractor, self.chain, self.records, tuple(sets), self.repellers)


@dataclass
class MorseVerification:
    attractor_repeller: bool
    disjoint_invariant: bool
    ordering: bool
    unstable_reconstruction: bool
    lifts_to_full_system: bool
    details: List[str] = field(default_factory=list)

    @property
    def passed(self):
        return all(self.checks().values())

    def checks(self):
        return {
            'attractor_repeller': self.attractor_repeller,
            'disjoint_invariant': self.disjoint_invariant,
            'ordering': self.ordering,
            'unstable_reconstruction': self.unstable_reconstruction,
            'lifts_to_full_system': self.lifts_to_full_system,
        }


def _repeller(sub, global_cells, cells):
    if not cells:
        return frozenset(global_cells)
    return frozenset(global_cells) - basin(sub, cells)


def dual_repeller(ts, global_cells, cells):
    """
    Cells of the global attractor never attracted to an attractor A of it.

    Args:
        ts (TransitionSystem): The system
        global_cells (iterable): The global attractor
        cells (iterable): An attractor of the subsystem on global_cells

    Returns:
        frozenset: The dual repeller A*
    """
    global_cells = frozenset(global_cells)
    cells = frozenset(cells)
    if not cells:
        return global_cells
    sub = ts.restrict(global_cells)
    if not cells <= global_cells or not validate_attractor(sub, cells).is_attractor:
        raise NotAttractorInSubsystem()
    return _repeller(sub, global_cells, cells)


def default_chain(sub):
    """Attractors of the prefixes of the sinks-first order of recurrent components."""
    cg = condense(sub)
    order = cg.sinks_first()
    return [attractor_of_downset(sub, cg, frozenset(order[:k])) for k in range(1, len(order) + 1)]


def chain_from_cells(sub, global_cells, chain):
    """Validate a user chain; empty entries are dropped and the global attractor appended."""
    entries = [frozenset(c) for c in chain if c]
    if not entries or entries[-1] != global_cells:
        entries.append(global_cells)
    for index, cells in enumerate(entries):
        if not cells <= global_cells or (index > 0 and not entries[index - 1] < cells):
            raise ChainNotIncreasing(index)
    records = []
    for index, cells in enumerate(entries):
        report = validate_attractor(sub, cells)
        if not report.is_attractor:
            raise ChainEntryNotAttractor(index)
        records.append(AttractorRecord(cells, report.witness, basin(sub, cells), downset_of(sub, cells)))
    return records


def morse_decomposition(ts, global_cells=None, chain=None):
    """
    Morse decomposition from an increasing chain of attractors.

    Args:
        ts (TransitionSystem): The system
        global_cells (iterable): Global attractor, computed if omitted
        chain (list): Increasing cell sets; the sinks-first chain if omitted

    Returns:
        MorseDecomposition: Chain, repellers and Morse sets
    """
    if global_cells is None:
        global_cells = global_attractor(ts).cells
    global_cells = frozenset(global_cells)
    sub = ts.restrict(global_cells)
    records = default_chain(sub) if chain is None else chain_from_cells(sub, global_cells, chain)
    cells = [frozenset()] + [r.cells for r in records]
    repellers = [_repeller(sub, global_cells, cells[k]) for k in range(len(records))]
    morse_sets = [cells[k] & repellers[k - 1] for k in range(1, len(cells))]
    logger.info("Morse decomposition with %d set(s) over %d cell(s)", len(morse_sets), len(global_cells))
    return MorseDecomposition(global_cells, tuple(cells), tuple(records), tuple(morse_sets), tuple(repellers))


def unstable_set(ts, global_cells, cells):
    """
    Cells of the global attractor lying on a full solution whose backward tail stays in M.

    Args:
        ts (TransitionSystem): The system
        global_cells (iterable): Global attractor
        cells (iterable): The set M

    Returns:
        frozenset: The unstable set of M
    """
    global_cells = frozenset(global_cells)
    cells = frozenset(cells) & global_cells
    sub = ts.restrict(global_cells)
    inner = sub.graph.subgraph(cells)
    cyclic = set()
    for comp in nx.strongly_connected_components(inner):
        node = next(iter(comp))
        if len(comp) > 1 or inner.has_edge(node, node):
            cyclic |= comp
    core = reach_within(sub, cyclic, cells)
    return reach_within(sub, core, global_cells)


def _check_attractor_repeller(ts, md, sub, details):
    ok = True
    for k in range(1, len(md.chain)):
        upper, lower = md.chain[k], md.chain[k - 1]
        try:
            inner = upper if not lower else upper - basin(ts.restrict(upper), lower)
            expected_repeller = _repeller(sub, md.global_attractor, lower)
        except NotForwardClosed:
            details.append(f"A{k - 1} is not forward closed inside A{k}")
            ok = False
            continue
        if md.morse_sets[k - 1] != inner or md.morse_sets[k - 1] != upper & md.repellers[k - 1]:
            details.append(f"M{k} differs from the repeller of A{k - 1} inside A{k}")
            ok = False
        if md.repellers[k - 1] != expected_repeller:
            details.append(f"stored repeller A{k - 1}* is wrong")
            ok = False
    return ok


def _check_disjoint_invariant(md, sub, details):
    ok = True
    seen = set()
    for k, cells in enumerate(md.morse_sets, start=1):
        if not cells or seen & cells:
            details.append(f"M{k} is empty or overlaps an earlier Morse set")
            ok = False
        seen |= cells
        if not is_solution_invariant(sub, cells):
            details.append(f"M{k} is not invariant")
            ok = False
    return ok


def _check_ordering(md, sub, details):
    ok = True
    sets = md.morse_sets
    forward = [reach(sub, m) for m in sets]
    backward = [reach(sub, m, BACKWARD) for m in sets]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if forward[i] & sets[j]:
                details.append(f"path from M{i + 1} to M{j + 1}")
                ok = False
    union = frozenset().union(*sets) if sets else frozenset()
    for cell in sorted(md.global_attractor - union):
        connected = any(
            cell in forward[j] and cell in backward[i]
            for j in range(len(sets)) for i in range(j)
        )
        if not connected:
            details.append(f"cell {sub.label(cell)} is not on a connection from a higher to a lower Morse set")
            ok = False
    return ok


def _check_unstable_sets(ts, md, details):
    ok = True
    unstable = [unstable_set(ts, md.global_attractor, m) for m in md.morse_sets]
    for k in range(1, len(md.chain)):
        union = frozenset().union(*unstable[:k])
        if union != md.chain[k]:
            details.append(f"A{k} is not the union of the unstable sets of M1..M{k}")
            ok = False
    return ok


def _check_lift(ts, md, details):
    ok = True
    for k in range(1, len(md.chain)):
        if not validate_attractor(ts, md.chain[k]).is_attractor:
            details.append(f"A{k} is not an attractor of the full system")
            ok = False
    return ok


def verify_morse(ts, md):
    """
    Check a Morse decomposition claim by claim.

    Returns:
        MorseVerification: One flag per claim plus human-readable details
    """
    sub = ts.restrict(md.global_attractor)
    details = []
    result = MorseVerification(
        attractor_repeller=_check_attractor_repeller(ts, md, sub, details),
        disjoint_invariant=_check_disjoint_invariant(md, sub, details),
        ordering=_check_ordering(md, sub, details),
        unstable_reconstruction=_check_unstable_sets(ts, md, details),
        lifts_to_full_system=_check_lift(ts, md, details),
        details=details,
    )
    for line in details:
        logger.debug("morse check: %s", line)
    return result


def morse_graph(ts, md):
    """
    Hasse diagram of reachability between Morse sets.

    Nodes are Morse indices 1..n with 'size' and 'label' attributes; an
    edge j -> i means a connection from M_j down to M_i.
    """
    sub = ts.restrict(md.global_attractor)
    g = nx.DiGraph()
    for k, cells in enumerate(md.morse_sets, start=1):
        g.add_node(k, size=len(cells), label=f"M{k} ({len(cells)})")
    for j, source in enumerate(md.morse_sets, start=1):
        reached = reach(sub, source)
        for i, target in enumerate(md.morse_sets, start=1):
            if i != j and reached & target:
                g.add_edge(j, i)
    if not nx.is_directed_acyclic_graph(g):
        logger.warning("Morse sets are not ordered; returning the full reachability graph")
        return g
    hasse = nx.transitive_reduction(g)
    hasse.add_nodes_from(g.nodes(data=True))
    return hasse
