# ------ src/analyzer/limits.py ------

"""
Limit sets and invariance predicates on a transition system.

Forward images of a set form an eventually periodic sequence of subsets;
the omega-limit is the union over one period of that cycle.
"""

import logging
from dataclasses import dataclass

from config.config import OMEGA_ITERATION_FACTOR
from src.errors import EmptyInput
from src.transition.graph import BACKWARD, condense, reach

logger = logging.getLogger(__name__)

PATHS = 'paths'
IMAGES = 'images'


@dataclass(frozen=True)
class InvarianceReport:
    positively_invariant: bool
    negatively_invariant: bool
    invariant: bool


def _nonempty(cells, what='cell set'):
    cells = frozenset(cells)
    if not cells:
        raise EmptyInput(what)
    return cells


def _periodic_union(step, start, cap):
    """
    Union over the cycle of the sequence start, step(start), ...

    Args:
        step (callable): Set-to-set map
        start (frozenset): First term
        cap (int): Iteration count after which a diagnostic is logged

    Returns:
        frozenset: Union of the terms in the cycle
    """
    first_seen = {start: 0}
    sequence = [start]
    current = start
    warned = False
    while True:
        current = step(current)
        if current in first_seen:
            cycle = sequence[first_seen[current]:]
            return frozenset().union(*cycle)
        first_seen[current] = len(sequence)
        sequence.append(current)
        if not warned and len(sequence) > cap:
            logger.warning("image sequence has not cycled after %d iterations; continuing", cap)
            warned = True


def omega_limit(ts, cells):
    """
    Cells hit by the forward images of a set infinitely often.

    Args:
        ts (TransitionSystem): The system
        cells (iterable): Nonempty starting set

    Returns:
        frozenset: The omega-limit set; empty if every branch escapes
    """
    cells = _nonempty(cells)
    cap = OMEGA_ITERATION_FACTOR * max(ts.n_cells, 1)
    return _periodic_union(ts.image, cells, cap)


def omega_intersection_form(ts, cells):
    """
    Intersection over m of the union of all images from step m on.

    Computed independently of omega_limit, from an explicit list of the
    image sequence extended by one full period.
    """
    current = _nonempty(cells)
    sequence = []
    while current not in sequence:
        sequence.append(current)
        current = ts.image(current)
    start = sequence.index(current)
    period = len(sequence) - start
    extended = sequence + sequence[start:start + period]

    result = None
    for m in range(len(sequence)):
        tail = frozenset().union(*extended[m:])
        result = tail if result is None else result & tail
    return result


def backward_viable(ts, cg=None):
    """Cells that admit an infinite backward path: those reachable from a recurrent component."""
    cg = cg or condense(ts)
    recurrent_cells = cg.cells_of(cg.recurrent_ids)
    return reach(ts, recurrent_cells)


def alpha_limit(ts, cells, form=PATHS):
    """
    Backward limit set of a set of cells.

    Args:
        ts (TransitionSystem): The system
        cells (iterable): Nonempty set
        form (str): 'paths' for the union of the limit sets of individual
            backward paths, 'images' for the limsup of backward images

    Returns:
        frozenset: The alpha-limit set
    """
    cells = _nonempty(cells)
    cg = condense(ts)
    if form == PATHS:
        ancestors = reach(ts, cells, BACKWARD)
        comps = {cg.comp_of[c] for c in ancestors if c in cg.comp_of}
        return cg.cells_of(cid for cid in comps if cg.recurrent[cid])
    if form != IMAGES:
        raise ValueError(f"form must be 'paths' or 'images', got {form!r}")
    viable = backward_viable(ts, cg)

    def step(current):
        return ts.preimage(current) & viable

    cap = OMEGA_ITERATION_FACTOR * max(ts.n_cells, 1)
    return _periodic_union(step, cells & viable, cap)


def invariance(ts, cells):
    """
    Invariance report for a set; an escaping cell puts the sink into the image.

    Returns:
        InvarianceReport: positively (F(S) in S), negatively (S in F(S)) and invariant (F(S) = S)
    """
    cells = frozenset(cells)
    image = ts.image(cells)
    escapes = ts.escapes(cells)
    positively = image <= cells and not escapes
    negatively = cells <= image
    return InvarianceReport(positively, negatively, positively and negatively)


def is_solution_invariant(ts, cells):
    """Every cell of the set has a successor and a predecessor inside it."""
    cells = frozenset(cells)
    for c in cells:
        if not any(v in cells for v in ts.successors[c]):
            return False
        if not any(u in cells for u in ts.predecessors[c]):
            return False
    return True


def maximal_invariant_subset(ts, cells):
    """
    Largest S within the given cells with F(S) = S and no escape.

    Cells with an escape, a successor outside, or no predecessor inside
    are removed until nothing changes.
    """
    current = set(cells)
    changed = True
    while changed:
        changed = False
        for c in sorted(current):
            leaves = ts.escape_flag[c] or any(v not in current for v in ts.successors[c])
            orphan = not any(u in current for u in ts.predecessors[c])
            if leaves or orphan:
                current.discard(c)
                changed = True
    return frozenset(current)
