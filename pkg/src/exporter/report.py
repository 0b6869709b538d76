# ------ src/exporter/report.py ------

"""
The analysis report written as report.json.
"""

from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict


class Timing(BaseModel):
    timestamp: str
    build_seconds: float


class CondensationSummary(BaseModel):
    components: int
    recurrent: int
    dag_edges: int
    recurrent_components: List[List[int]]


class MorseSummary(BaseModel):
    chain: List[List[int]]
    morse_sets: List[List[int]]
    repellers: List[List[int]]
    edges: List[List[int]]


class AnalysisReport(BaseModel):
    """
    Self-contained record of one analysis run.

    Every entry of `verification` names one check; `passed` is their conjunction.
    """
    model_config = ConfigDict(frozen=True)

    spec: Dict[str, Any]
    spec_sha256: str
    options: Dict[str, Any]
    grid: Optional[Dict[str, Any]] = None
    transitions: Dict[str, Any]
    condensation: CondensationSummary
    attractors: List[Dict[str, Any]]
    lattice_truncated: bool
    morse: MorseSummary
    verification: Dict[str, bool]
    details: List[str]
    tolerances: Dict[str, Any]
    passed: bool
    timing: Optional[Timing] = None

    def to_json(self):
        return self.model_dump_json(indent=2, exclude_none=True)


def timing_now(build_seconds):
    return Timing(timestamp=datetime.now(timezone.utc).isoformat(), build_seconds=round(build_seconds, 6))


def build_report(spec, digest, options, ts, cg, lattice, md, morse_edges, verification, details,
                 tolerances, build_seconds=None):
    """
    Assemble an AnalysisReport.

    Args:
        spec: The loaded spec, echoed in full
        digest (str): SHA-256 of the spec file
        options (dict): Effective analysis options
        ts (TransitionSystem): The transition system
        cg (CondensationGraph): Its condensation
        lattice (AttractorLattice): Downset attractors
        md (MorseDecomposition): The Morse decomposition
        morse_edges (list): Hasse edges [j, i] between Morse indices
        verification (dict): Check name to outcome
        details (list): Messages of failed checks
        tolerances (dict): Tolerances in force
        build_seconds (float): Build time; None suppresses the timing block

    Returns:
        AnalysisReport
    """
    return AnalysisReport(
        spec=spec.model_dump(by_alias=True, mode='json'),
        spec_sha256=digest,
        options=options,
        grid=ts.grid.describe() if ts.grid is not None else None,
        transitions={**ts.statistics(), 'origin': ts.origin.describe()},
        condensation=CondensationSummary(
            **cg.summary(),
            recurrent_components=[sorted(cg.components[cid]) for cid in cg.recurrent_ids],
        ),
        attractors=lattice.to_list(),
        lattice_truncated=lattice.truncated,
        morse=MorseSummary(
            chain=[sorted(cells) for cells in md.chain],
            morse_sets=[sorted(cells) for cells in md.morse_sets],
            repellers=[sorted(cells) for cells in md.repellers],
            edges=[list(edge) for edge in morse_edges],
        ),
        verification=verification,
        details=details,
        tolerances=tolerances,
        passed=all(verification.values()),
        timing=None if build_seconds is None else timing_now(build_seconds),
    )
