"""Analysis nodes and per-equipment operating conditions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import datetime
from typing import Mapping, Sequence

from .engine import ParaFuzzyEngine, default_engine
from .evidence import NodeSpec, ReadingPair, extract_evidence
from .pal2v import CertaintyPoint, EvidencePair, LogicalState, compute_degrees
from .profiles import EquipmentProfile


class ConfigurationError(ValueError):
    pass


class OperatingCondition(enum.Enum):
    NORMAL = "NORMAL"
    UNSTABLE = "UNSTABLE"
    FAIL = "FAIL"
    INCONSISTENT = "INCONSISTENT"
    INDETERMINATE = "INDETERMINATE"

    def __str__(self) -> str:
        return self.value


# Highest first. FAIL over NORMAL is the only ordering the field tests show;
# contradictory evidence is ranked above plain instability.
DEFAULT_PRECEDENCE = (
    OperatingCondition.FAIL,
    OperatingCondition.INCONSISTENT,
    OperatingCondition.INDETERMINATE,
    OperatingCondition.UNSTABLE,
    OperatingCondition.NORMAL,
)


@dataclass(frozen=True)
class NodeResult:
    node_id: str
    evidence: EvidencePair
    point: CertaintyPoint
    crisp: float
    state: LogicalState
    boundary: bool = False
    readings: Mapping[str, ReadingPair] = field(default_factory=dict, compare=False)

    @property
    def condition(self) -> OperatingCondition:
        return state_to_condition(self.state)

    @property
    def state_label(self) -> str:
        # A near state exactly on dct = 0 reads from either half of the lattice.
        if self.boundary and not self.state.is_extreme:
            base, _, side = self.state.label.rpartition("-")
            if side in ("⊥", "⊤"):
                return f"{base}-⊥/⊤"
        return self.state.label


@dataclass(frozen=True)
class SubsystemReport:
    equipment: str
    subsystem: str
    nodes: tuple[NodeResult, ...]
    # None only when the cycle was skipped for stale data.
    condition: OperatingCondition | None
    cycle: int = 0  # 1-based when produced by the scheduler
    timestamp: datetime | None = None
    stale: tuple[str, ...] = ()
    profile: str = ""

    def __post_init__(self) -> None:
        expected = {"A": 2, "B": 1, "C": 1}.get(self.subsystem)
        if self.nodes and expected is not None and len(self.nodes) != expected:
            raise ValueError(
                f"subsystem {self.subsystem} report needs {expected} node result(s), got {len(self.nodes)}"
            )


def run_node(
    node: NodeSpec,
    readings: Mapping[str, ReadingPair],
    engine: ParaFuzzyEngine | None = None,
) -> NodeResult:
    engine = engine or default_engine()
    evidence = extract_evidence(node, readings)
    point = compute_degrees(evidence)
    result = engine.evaluate(point.dc, point.dct)
    boundary = abs(point.dct) <= 1e-9
    used = {name: readings[name] for name in node.variable_names}
    return NodeResult(node.node_id, evidence, point, result.crisp, result.state, boundary, used)


_STATE_CONDITIONS = {
    LogicalState.T: OperatingCondition.FAIL,
    LogicalState.F: OperatingCondition.NORMAL,
    LogicalState.TOP: OperatingCondition.INCONSISTENT,
    LogicalState.BOTTOM: OperatingCondition.INDETERMINATE,
}


def state_to_condition(s: LogicalState) -> OperatingCondition:
    return _STATE_CONDITIONS.get(s, OperatingCondition.UNSTABLE)


def classify_equipment(
    results: Sequence[NodeResult],
    precedence: Sequence[OperatingCondition] = DEFAULT_PRECEDENCE,
) -> OperatingCondition:
    if not results:
        raise ValueError("no node results to classify")
    rank = {cond: i for i, cond in enumerate(precedence)}
    missing = set(OperatingCondition) - set(rank)
    if missing:
        raise ValueError(f"precedence misses {sorted(c.value for c in missing)}")
    return min((r.condition for r in results), key=rank.__getitem__)


def run_subsystem(
    kind: str,
    profile: EquipmentProfile,
    samples: Mapping[str, ReadingPair],
    engine: ParaFuzzyEngine | None = None,
    precedence: Sequence[OperatingCondition] = DEFAULT_PRECEDENCE,
    cycle: int = 0,
    timestamp: datetime | None = None,
    equipment: str | None = None,
) -> SubsystemReport:
    """Run every node of one equipment and classify it.

    ``samples`` maps variable name to its reading pair. ``equipment`` is the
    id used in telemetry; it defaults to the profile name.
    """
    kind = kind.upper()
    if kind != profile.subsystem:
        raise ConfigurationError(
            f"profile {profile.name!r} is for subsystem {profile.subsystem}, not {kind}"
        )
    for node in profile.nodes:
        for name in node.variable_names:
            if name not in samples:
                raise ConfigurationError(
                    f"{profile.name}: node {node.node_id} needs variable {name!r}, which has no samples"
                )
    results = tuple(run_node(node, samples, engine) for node in profile.nodes)
    return SubsystemReport(
        equipment or profile.name,
        kind,
        results,
        classify_equipment(results, precedence),
        cycle,
        timestamp,
        profile=profile.name,
    )


def stale_report(
    kind: str,
    profile: EquipmentProfile,
    stale: Sequence[str],
    cycle: int = 0,
    timestamp: datetime | None = None,
    equipment: str | None = None,
) -> SubsystemReport:
    """Placeholder for an equipment skipped this cycle."""
    return SubsystemReport(
        equipment or profile.name, kind.upper(), (), None, cycle, timestamp, tuple(stale), profile.name
    )
