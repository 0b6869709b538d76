# ------ src/verifier/suite.py ------

"""
Named property checks over fixture systems and seeded random systems.

Each check returns a CheckResult; the CLI prints one line per result.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from config.config import (
    BRUTE_FORCE_MAX_CELLS, ENCLOSURE_SAMPLES, RANDOM_SUITE_DENSITY, RANDOM_SUITE_MAX_CELLS,
    RANDOM_SUITE_OMEGA_SEED_OFFSET,
)
from src.analyzer.attractors import attractor_lattice, basin, is_stable, validate_attractor
from src.analyzer.limits import invariance, omega_intersection_form, omega_limit
from src.analyzer.lyapunov import verify_decrease
from src.analyzer.morse import morse_decomposition, verify_morse
from src.dynsys.flow import time_tau_map
from src.dynsys.spec import DigraphSpec, FiniteMapSpec
from src.errors import EmptyAttractor
from src.transition.graph import condense
from src.transition.system import FROM_ODE, build_transitions

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ''

    def line(self):
        status = 'PASS' if self.passed else 'FAIL'
        suffix = f"  ({self.detail})" if self.detail else ''
        return f"{status}  {self.name}{suffix}"


def random_digraph(seed, max_cells=RANDOM_SUITE_MAX_CELLS, density=RANDOM_SUITE_DENSITY):
    """
    Random digraph in which every cell has at least one successor.

    Args:
        seed (int): Generator seed
        max_cells (int): Upper bound on the cell count (at least 2 cells)
        density (float): Edge probability

    Returns:
        DigraphSpec
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_cells + 1))
    adjacency = rng.random((n, n)) < density
    for u in range(n):
        if not adjacency[u].any():
            adjacency[u, rng.integers(0, n)] = True
    cells = [str(i) for i in range(n)]
    edges = [(str(u), str(v)) for u, v in zip(*np.nonzero(adjacency))]
    return DigraphSpec(cells=cells, edges=edges)


def random_finite_map(seed, max_cells=RANDOM_SUITE_MAX_CELLS):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_cells + 1))
    images = rng.integers(0, n, size=n)
    states = [str(i) for i in range(n)]
    return FiniteMapSpec(states=states, map={str(i): str(int(v)) for i, v in enumerate(images)})


def _sample_sets(ts, rng=None, extra=3):
    """Singletons, the whole support and a few random subsets."""
    cells = ts.cells
    sets = [frozenset([c]) for c in cells] + [frozenset(cells)]
    if rng is not None:
        for _ in range(extra):
            mask = rng.random(len(cells)) < 0.3
            chosen = frozenset(c for c, keep in zip(cells, mask) if keep)
            if chosen:
                sets.append(chosen)
    return sets


def check_omega_forms(ts, rng=None):
    """omega_limit agrees with the intersection form, and omega-limits are invariant."""
    for cells in _sample_sets(ts, rng):
        omega = omega_limit(ts, cells)
        if omega != omega_intersection_form(ts, cells):
            return False, f"forms differ from {sorted(cells)}"
        if omega and not ts.escapes(omega) and not invariance(ts, omega).invariant:
            return False, f"omega of {sorted(cells)} is not invariant"
    return True, ''


def basin_saturated(ts, cells, region):
    """Every cell whose successors all lie in the basin is in the basin."""
    for c in ts.cells:
        succ = ts.successors[c]
        if succ and not ts.escape_flag[c] and all(v in region for v in succ) and c not in region:
            return False
    return True


def check_attractor_theorems(ts, cg=None):
    cg = cg or condense(ts)
    lattice = attractor_lattice(ts, cg)
    for record in lattice:
        if not validate_attractor(ts, record.cells).is_attractor:
            return False, f"downset {list(record.downset)} fails validation"
        if not is_stable(ts, record.cells):
            return False, f"downset {list(record.downset)} is not stable"
        if not basin_saturated(ts, record.cells, basin(ts, record.cells)):
            return False, f"basin of downset {list(record.downset)} is not saturated"
    if len(lattice) > 1:
        union = frozenset().union(*(r.cells for r in lattice))
        if not validate_attractor(ts, union).is_attractor:
            return False, 'union of lattice attractors is not an attractor'
    return True, ''


def invariant_subsets(ts):
    """Every nonempty S with F(S) = S and no escape, by exhaustive enumeration."""
    cells = ts.cells
    found = []
    for size in range(1, len(cells) + 1):
        for combo in itertools.combinations(cells, size):
            s = frozenset(combo)
            if invariance(ts, s).invariant:
                found.append(s)
    return found


def check_maximality(ts, cg=None):
    """Each lattice attractor contains every invariant set inside its witness."""
    invariant = invariant_subsets(ts)
    for record in attractor_lattice(ts, cg or condense(ts)):
        for s in invariant:
            if s <= record.absorbing and not s <= record.cells:
                return False, f"invariant {sorted(s)} escapes downset {list(record.downset)}"
    return True, ''


def check_morse(ts, chain=None):
    try:
        md = morse_decomposition(ts, chain=chain)
    except EmptyAttractor:
        return True, 'no global attractor'
    report = verify_morse(ts, md)
    return report.passed, '; '.join(report.details)


def check_enclosure(ts, samples=ENCLOSURE_SAMPLES, seed=0):
    """Images of random points land in a successor of their cell (or the cell escapes)."""
    grid = ts.grid
    rng = np.random.default_rng(seed)
    cells = rng.integers(0, grid.n_cells, size=samples)
    lo, hi = grid.bounds(cells)
    points = lo + rng.random(lo.shape) * (hi - lo)
    images, escaped = time_tau_map(ts.spec, ts.origin.tau).images(points)
    landed = grid.cell_of(images)
    misses = 0
    for cell, image_cell, gone in zip(cells, landed, escaped):
        if gone or image_cell < 0:
            misses += not ts.escape_flag[cell]
        elif image_cell not in ts.successors[cell]:
            misses += 1
    return misses == 0, f"{misses} of {samples} images outside the enclosure" if misses else ''


def check_lyapunov(ts):
    try:
        cells = attractor_lattice(ts)[-1].cells
    except IndexError:
        return True, 'no attractor'
    if ts.origin.kind != FROM_ODE and not ts.is_deterministic:
        return True, 'multivalued: xi envelope only'
    report = verify_decrease(ts, cells)
    return report.passed, f"{len(report.violations)} violation(s)" if report.violations else ''


def system_checks(name, spec, **build_options):
    """
    The property checks that apply to one system.

    Returns:
        list: CheckResult per check
    """
    ts = build_transitions(spec, **build_options)
    cg = condense(ts)
    checks = [
        ('omega_forms', lambda: check_omega_forms(ts)),
        ('attractor_theorems', lambda: check_attractor_theorems(ts, cg)),
        ('morse', lambda: check_morse(ts)),
        ('lyapunov_decrease', lambda: check_lyapunov(ts)),
    ]
    if len(ts.support) <= BRUTE_FORCE_MAX_CELLS:
        checks.append(('maximality', lambda: check_maximality(ts, cg)))
    if ts.origin.kind == FROM_ODE:
        checks.append(('enclosure', lambda: check_enclosure(ts)))
    results = []
    for check, run in checks:
        passed, detail = run()
        results.append(CheckResult(f"{name}.{check}", passed, detail))
    return results


def random_suite(seeds):
    """
    Property checks on seeded random finite maps and digraphs.

    Args:
        seeds (int): Number of seeds; seed k drives a map and a digraph, plus a second map for the omega checks

    Returns:
        list: One CheckResult per property, aggregated over all seeds
    """
    failures = {name: [] for name in ('omega_forms', 'attractor_theorems', 'maximality', 'morse')}
    counts = dict.fromkeys(failures, 0)
    for seed in range(seeds):
        rng = np.random.default_rng(seed + 10_000)
        extra = random_finite_map(seed + RANDOM_SUITE_OMEGA_SEED_OFFSET)
        passed, detail = check_omega_forms(build_transitions(extra), rng)
        counts['omega_forms'] += 1
        if not passed:
            failures['omega_forms'].append(f"finite_map#{seed + RANDOM_SUITE_OMEGA_SEED_OFFSET}: {detail}")
        for spec in (random_finite_map(seed), random_digraph(seed)):
            ts = build_transitions(spec)
            cg = condense(ts)
            tag = f"{spec.kind}#{seed}"
            runs = [
                ('omega_forms', lambda: check_omega_forms(ts, rng)),
                ('attractor_theorems', lambda: check_attractor_theorems(ts, cg)),
                ('morse', lambda: check_morse(ts)),
            ]
            if ts.n_cells <= BRUTE_FORCE_MAX_CELLS:
                runs.append(('maximality', lambda: check_maximality(ts, cg)))
            for name, run in runs:
                passed, detail = run()
                counts[name] += 1
                if not passed:
                    failures[name].append(f"{tag}: {detail}")
        logger.debug("random suite seed %d done", seed)
    return [
        CheckResult(f"random.{name}", not failed, '; '.join(failed[:3]) if failed else f"{counts[name]} systems")
        for name, failed in failures.items()
    ]
