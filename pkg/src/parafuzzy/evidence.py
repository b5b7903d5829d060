"""Raw readings to favourable/unfavourable evidence.

Each analysis node looks at two variables. Every variable has three
category functions (1 not failure, 2 undefined, 3 failure); association
rules over those categories select output functions 4/5/6 for the
favourable and unfavourable evidence, which are aggregated and defuzzified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .fuzzy import FuzzySet, PiecewiseLinearMembership, RuleActivation, defuzzify_centroid, mamdani_infer
from .pal2v import EvidencePair

CATEGORY_INDICES = (1, 2, 3)
OUTPUT_INDICES = (4, 5, 6)
EVIDENCE_UNIVERSE = (0.0, 1.0)

Literal = tuple[str, int]  # (variable name, category index)
ReadingPair = tuple[float, float]


class ReadingError(ValueError):
    pass


@dataclass(frozen=True)
class VariableSpec:
    name: str
    unit: str
    category_functions: tuple[PiecewiseLinearMembership, ...]
    # All shipped units (%, kbps, octets, msgs) are counts or shares.
    nonnegative: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "category_functions", tuple(self.category_functions))
        if len(self.category_functions) != 3:
            raise ValueError(
                f"variable {self.name!r}: expected 3 category functions, "
                f"got {len(self.category_functions)}"
            )

    @property
    def operating_range(self) -> tuple[float, float]:
        lo = min(f.support_hull[0] for f in self.category_functions)
        hi = max(f.support_hull[1] for f in self.category_functions)
        return lo, hi


@dataclass(frozen=True)
class EvidenceOutputSpec:
    """Output functions 4, 5 and 6 for each side of the evidence pair."""

    favourable: Mapping[int, PiecewiseLinearMembership]
    unfavourable: Mapping[int, PiecewiseLinearMembership]

    def __post_init__(self) -> None:
        for side, funcs in (("favourable", self.favourable), ("unfavourable", self.unfavourable)):
            if set(funcs) != set(OUTPUT_INDICES):
                raise ValueError(f"{side} outputs must define functions 4, 5 and 6")
            for idx, f in funcs.items():
                lo, hi = f.support_hull
                if lo < 0.0 or hi > 1.0:
                    raise ValueError(f"{side} function {idx}: support [{lo}, {hi}] leaves [0, 1]")


@dataclass(frozen=True)
class AssociationRule:
    """OR over AND-groups of category literals; no groups means catch-all."""

    groups: tuple[tuple[Literal, ...], ...]
    consequent: tuple[int, int]  # (favourable index, unfavourable index)
    label: str = field(default="", compare=False)

    @property
    def is_catch_all(self) -> bool:
        return not self.groups

    def strength(self, degrees: Mapping[str, Sequence[float]]) -> float:
        best = 0.0
        for group in self.groups:
            s = min(degrees[var][idx - 1] for var, idx in group)
            best = max(best, s)
        return best

    def variables(self) -> set[str]:
        return {var for group in self.groups for var, _ in group}


@dataclass(frozen=True)
class NodeSpec:
    node_id: str
    equipment: str
    variables: tuple[VariableSpec, VariableSpec]
    rules: tuple[AssociationRule, ...]
    outputs: EvidenceOutputSpec

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rules", tuple(self.rules))
        if len(self.variables) != 2:
            raise ValueError(f"node {self.node_id}: exactly two variables required")

    @property
    def variable_names(self) -> tuple[str, str]:
        return self.variables[0].name, self.variables[1].name


def categorize(reading: float, v: VariableSpec) -> tuple[float, float, float]:
    if not math.isfinite(reading):
        raise ReadingError(f"{v.name}: reading {reading!r} is not finite")
    if v.nonnegative and reading < 0:
        raise ReadingError(f"{v.name}: negative reading {reading} for unit {v.unit!r}")
    a, b, c = (f(reading) for f in v.category_functions)
    return a, b, c


def combine_reading_pair(r1: float, r2: float, v: VariableSpec) -> tuple[float, float, float]:
    """Category degrees both sources agree on: elementwise min."""
    d1 = categorize(r1, v)
    d2 = categorize(r2, v)
    a, b, c = (min(x, y) for x, y in zip(d1, d2))
    return a, b, c


def rule_strengths(
    node: NodeSpec, readings: Mapping[str, ReadingPair]
) -> list[tuple[AssociationRule, float]]:
    degrees = {}
    for v in node.variables:
        if v.name not in readings:
            raise KeyError(f"node {node.node_id}: no readings for variable {v.name!r}")
        r1, r2 = readings[v.name]
        degrees[v.name] = combine_reading_pair(r1, r2, v)

    explicit = [(rule, rule.strength(degrees)) for rule in node.rules if not rule.is_catch_all]
    top = max((s for _, s in explicit), default=0.0)
    catch_all = [(rule, max(0.0, 1.0 - top)) for rule in node.rules if rule.is_catch_all]
    return explicit + catch_all


def extract_evidence(node: NodeSpec, readings: Mapping[str, ReadingPair]) -> EvidencePair:
    fired = [(rule, s) for rule, s in rule_strengths(node, readings) if s > 0.0]
    if not fired:
        raise RuntimeError(f"node {node.node_id}: no association rule fired")
    mu = _defuzzify(node.outputs.favourable, [(rule.consequent[0], s) for rule, s in fired])
    lam = _defuzzify(node.outputs.unfavourable, [(rule.consequent[1], s) for rule, s in fired])
    return EvidencePair(mu, lam)


def _defuzzify(funcs: Mapping[int, PiecewiseLinearMembership], hits: list[tuple[int, float]]) -> float:
    acts = [RuleActivation(FuzzySet(funcs[idx], EVIDENCE_UNIVERSE), min(s, 1.0)) for idx, s in hits]
    value = defuzzify_centroid(mamdani_infer(acts))
    return min(max(value, 0.0), 1.0)
