# ------ src/analyzer/attractors.py ------

"""
Attractors of a transition system: construction from absorbing sets,
validation, basins, stability and the lattice of downset attractors.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import networkx as nx

from config.config import LATTICE_CAP
from src.analyzer.limits import invariance, maximal_invariant_subset, omega_limit
from src.errors import EmptyAttractor, EmptyInput, EscapesDomain, NotAbsorbing, NotForwardClosed
from src.transition.graph import BACKWARD, condense, reach, reach_within

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AttractorRecord:
    """
    An attractor with its absorbing witness and basin.

    Attributes:
        cells (frozenset): The attractor
        absorbing (frozenset): A set N with F^t(N) inside N whose omega-limit is cells
        basin (frozenset): Cells all of whose forward paths end up in cells
        downset (tuple): Ids of the recurrent components the attractor contains
    """
    cells: frozenset
    absorbing: frozenset
    basin: frozenset
    downset: Tuple[int, ...] = ()

    def to_dict(self, attractor_id):
        return {
            'id': attractor_id,
            'cells': sorted(self.cells),
            'absorbing': sorted(self.absorbing),
            'basin': sorted(self.basin),
            'downset': list(self.downset),
        }


@dataclass(frozen=True)
class AttractorValidation:
    invariant: bool
    absorbing_witness_found: bool
    maximal_in_witness: bool
    is_attractor: bool
    witness: Optional[frozenset] = None
    maximal_in_basin: Optional[bool] = None


@dataclass(frozen=True)
class PointAttractionReport:
    invariant: bool
    stable: bool
    attracts_collar: bool
    is_attractor: bool


@dataclass
class AttractorLattice:
    """Downset attractors in inclusion-compatible order."""
    records: List[AttractorRecord] = field(default_factory=list)
    truncated: bool = False

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, index):
        return self.records[index]

    def to_list(self):
        return [record.to_dict(i) for i, record in enumerate(self.records)]


def absorption_time(ts, cells):
    """
    First t0 in 1..n_cells with F^t0(N) inside N.

    Returns:
        int or None: t0, or None when N is not absorbing within n_cells steps

    Raises:
        EscapesDomain: If an iterate reaches the escape sink first
    """
    cells = frozenset(cells)
    current = cells
    seen = {cells}
    for t in range(1, max(ts.n_cells, 1) + 1):
        leaving = sorted(c for c in current if ts.escape_flag[c])
        if leaving:
            raise EscapesDomain(ts.label(leaving[0]))
        current = ts.image(current)
        if current <= cells:
            return t
        if current in seen:
            return None
        seen.add(current)
    return None


def _first_leaving(ts, cells):
    for c in sorted(cells):
        if ts.escape_flag[c] or any(v not in cells for v in ts.successors[c]):
            return c
    return min(cells)


def downset_of(ts, cells, cg=None):
    cg = cg or condense(ts)
    comps = {cg.comp_of[c] for c in cells if c in cg.comp_of}
    return tuple(sorted(cid for cid in comps if cg.recurrent[cid] and cg.components[cid] <= cells))


def attractor_from_absorbing(ts, cells):
    """
    The attractor omega(N) of an absorbing set N.

    Args:
        ts (TransitionSystem): The system
        cells (iterable): Nonempty absorbing set N

    Returns:
        AttractorRecord: omega(N) with witness N
    """
    cells = frozenset(cells)
    if not cells:
        raise EmptyInput('absorbing set')
    if absorption_time(ts, cells) is None:
        raise NotAbsorbing(ts.label(_first_leaving(ts, cells)))
    attractor = omega_limit(ts, cells)
    if not attractor:
        raise EmptyAttractor()
    return AttractorRecord(attractor, cells, basin(ts, attractor), downset_of(ts, attractor))


def basin(ts, cells):
    """
    Region of attraction: cells every forward path of which ends up in the set.

    A cell is excluded when, avoiding the set, it can reach the escape sink
    or a cycle disjoint from the set.

    Args:
        ts (TransitionSystem): The system
        cells (iterable): Forward-closed set

    Returns:
        frozenset: The basin, the set itself included
    """
    cells = frozenset(cells)
    for c in sorted(cells):
        if ts.escape_flag[c] or any(v not in cells for v in ts.successors[c]):
            raise NotForwardClosed(ts.label(c))
    outside = ts.support - cells
    sub = ts.graph.subgraph(outside)
    seeds = {c for c in outside if ts.escape_flag[c]}
    for comp in nx.strongly_connected_components(sub):
        node = next(iter(comp))
        if len(comp) > 1 or sub.has_edge(node, node):
            seeds |= comp
    bad = reach_within(ts, seeds, outside, BACKWARD)
    return frozenset(ts.support - bad)


def is_stable(ts, cells):
    """True when F(A) lies inside A and no cell of A escapes."""
    cells = frozenset(cells)
    return ts.image(cells) <= cells and not ts.escapes(cells)


def collar(ts, cells):
    """The set together with its one-step in-neighbourhood."""
    cells = frozenset(cells)
    return cells | ts.preimage(cells)


def _witness_candidates(ts, cells):
    yield collar(ts, cells)
    yield cells
    if is_stable(ts, cells):
        yield basin(ts, cells)


def validate_attractor(ts, cells, check_basin_maximality=False):
    """
    Check that a set is an attractor.

    The witness search tries the one-cell collar, then the set itself,
    then its basin. A witness N must be absorbing; maximality means
    omega(N) equals the set.

    Args:
        ts (TransitionSystem): The system
        cells (iterable): Nonempty candidate
        check_basin_maximality (bool): Also check that the set is the
            maximal invariant subset of its basin

    Returns:
        AttractorValidation: Report with the witness used
    """
    cells = frozenset(cells)
    if not cells:
        raise EmptyInput('attractor candidate')
    invariant = invariance(ts, cells).invariant
    absorbing_found = False
    maximal = False
    witness = None
    seen = set()
    for candidate in _witness_candidates(ts, cells):
        if candidate in seen:
            continue
        seen.add(candidate)
        try:
            t0 = absorption_time(ts, candidate)
        except EscapesDomain:
            continue
        if t0 is None:
            continue
        if not absorbing_found:
            absorbing_found = True
            witness = candidate
        if omega_limit(ts, candidate) == cells:
            maximal = True
            witness = candidate
            break

    maximal_in_basin = None
    if check_basin_maximality:
        maximal_in_basin = is_stable(ts, cells) and maximal_invariant_subset(ts, basin(ts, cells)) == cells
    return AttractorValidation(
        invariant=invariant,
        absorbing_witness_found=absorbing_found,
        maximal_in_witness=maximal,
        is_attractor=invariant and absorbing_found and maximal,
        witness=witness,
        maximal_in_basin=maximal_in_basin,
    )


def point_attraction_check(ts, cells):
    """
    An invariant, stable set whose basin holds its collar is an attractor.

    Returns:
        PointAttractionReport: The hypotheses and the validation outcome
    """
    cells = frozenset(cells)
    stable = is_stable(ts, cells)
    attracts = stable and collar(ts, cells) <= basin(ts, cells)
    return PointAttractionReport(
        invariant=invariance(ts, cells).invariant,
        stable=stable,
        attracts_collar=attracts,
        is_attractor=validate_attractor(ts, cells).is_attractor,
    )


def viable_components(ts, cg):
    """Recurrent components that cannot reach the escape sink."""
    doomed = reach(ts, ts.escape_cells, BACKWARD)
    return [cid for cid in cg.sinks_first() if not (cg.components[cid] & doomed)]


def enumerate_downsets(cg, comps, cap):
    """
    Nonempty sets of recurrent components closed under reachability.

    Args:
        cg (CondensationGraph): Condensation
        comps (list): Candidate components, sinks first
        cap (int): Maximum number of downsets

    Returns:
        tuple: (list of frozensets, truncated flag)
    """
    recurrent = set(cg.recurrent_ids)
    below = {cid: (cg.descendants(cid) & recurrent) - {cid} for cid in comps}
    downsets = [frozenset()]
    truncated = False
    for cid in comps:
        grown = [d | {cid} for d in downsets if below[cid] <= d]
        downsets.extend(grown)
        if len(downsets) - 1 > cap:
            downsets = downsets[:cap + 1]
            truncated = True
            break
    result = [d for d in downsets if d]
    full = frozenset(comps)
    if truncated and full and full not in result:
        result[-1] = full
    return result, truncated


def attractor_of_downset(ts, cg, downset):
    """
    The attractor omega(N(D)) with N(D) the cells that reach neither the
    escape sink nor a recurrent component outside D.
    """
    outside = [cid for cid in cg.recurrent_ids if cid not in downset]
    seeds = set(ts.escape_cells) | cg.cells_of(outside)
    absorbing = ts.support - reach(ts, seeds, BACKWARD)
    cells = omega_limit(ts, absorbing)
    return AttractorRecord(cells, frozenset(absorbing), basin(ts, cells), tuple(sorted(downset)))


def attractor_lattice(ts, cg=None, cap=LATTICE_CAP):
    """
    One attractor per nonempty downset of viable recurrent components.

    Args:
        ts (TransitionSystem): The system
        cg (CondensationGraph): Its condensation, computed if omitted
        cap (int): Maximum number of records

    Returns:
        AttractorLattice: Records sorted by (downset size, downset)
    """
    if cap < 1:
        raise ValueError(f"cap must be at least 1, got {cap}")
    cg = cg or condense(ts)
    comps = viable_components(ts, cg)
    downsets, truncated = enumerate_downsets(cg, comps, cap)
    if truncated:
        logger.warning("attractor lattice truncated at %d downsets", cap)
    downsets.sort(key=lambda d: (len(d), sorted(d)))
    records = [attractor_of_downset(ts, cg, d) for d in downsets]
    logger.info("attractor lattice: %d attractor(s) from %d viable recurrent component(s)",
                len(records), len(comps))
    return AttractorLattice(records, truncated)


def global_attractor(ts, cg=None):
    """The attractor of the full downset: every viable recurrent component."""
    cg = cg or condense(ts)
    comps = viable_components(ts, cg)
    if not comps:
        raise EmptyAttractor()
    return attractor_of_downset(ts, cg, frozenset(comps))
