"""Para-fuzzy combination: fuzzify (dc, dct), apply the inference table, pick
the strongest lattice state and defuzzify a crisp value in [-1, 1]."""

from __future__ import annotations

import configparser
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterator, Mapping

from .fuzzy import FuzzySet, PiecewiseLinearMembership, RuleActivation, defuzzify_centroid, mamdani_infer
from .pal2v import EPS, CertaintyPoint, LogicalState, normalize_symbols

CERTAINTY_LABELS = ("F", "QF", "RCF", "RCt", "Qt", "t")
CONTRADICTION_LABELS = ("⊥", "Q⊥", "Ri⊥", "Ri⊤", "Q⊤", "⊤")
IMPOSSIBLE = "*"
AXIS_UNIVERSE = (-1.0, 1.0)

# Strengths are compared after rounding so float noise cannot break a tie.
_TIE_DIGITS = 12


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class AxisFuzzification:
    certainty_functions: Mapping[str, PiecewiseLinearMembership]
    contradiction_functions: Mapping[str, PiecewiseLinearMembership]

    def fuzzify_certainty(self, dc: float) -> dict[str, float]:
        _check_axis_value("dc", dc)
        return {name: f(dc) for name, f in self.certainty_functions.items()}

    def fuzzify_contradiction(self, dct: float) -> dict[str, float]:
        _check_axis_value("dct", dct)
        return {name: f(dct) for name, f in self.contradiction_functions.items()}


@dataclass(frozen=True)
class InferenceTable:
    # (certainty label, contradiction label) -> state, or None for "*"
    entries: Mapping[tuple[str, str], LogicalState | None]

    def cells(self) -> Iterator[tuple[str, str, LogicalState]]:
        for (c, k), state in self.entries.items():
            if state is not None:
                yield c, k, state


@dataclass(frozen=True)
class CrispOutputSets:
    output_set_1: Mapping[LogicalState, PiecewiseLinearMembership]
    output_set_2: Mapping[LogicalState, PiecewiseLinearMembership]

    def family(self, dc: float) -> Mapping[LogicalState, PiecewiseLinearMembership]:
        return self.output_set_1 if dc >= 0.0 else self.output_set_2


@dataclass(frozen=True)
class ParaFuzzyResult:
    state: LogicalState
    state_memberships: Mapping[LogicalState, float]
    crisp: float
    point: CertaintyPoint


@dataclass(frozen=True)
class StepSpec:
    dc_values: tuple[float, ...]
    dct_values: tuple[float, ...]

    @classmethod
    def uniform(cls, step: float = 0.05) -> StepSpec:
        values = _axis_values(step)
        return cls(values, values)

    @classmethod
    def paper(cls) -> StepSpec:
        """Tenths along both axes, plus dc = +-0.05 beside the centre line."""
        tenths = _axis_values(0.1)
        dc = tuple(sorted(set(tenths) | {-0.05, 0.05}))
        return cls(dc, tenths)

    @property
    def size(self) -> int:
        return len(self.dc_values) * len(self.dct_values)


@dataclass(frozen=True)
class SweepRecord:
    dc: float
    dct: float
    crisp: float
    state_index: int


class ParaFuzzyEngine:
    def __init__(
        self,
        axes: AxisFuzzification,
        table: InferenceTable,
        outputs: CrispOutputSets,
        tie_break: str = "lattice",
    ) -> None:
        if tie_break not in TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {', '.join(TIE_BREAKS)}")
        self.axes = axes
        self.table = table
        self.outputs = outputs
        self.tie_break = tie_break
        problems = validate_geometry(axes, table, outputs)
        if problems:
            raise GeometryError("; ".join(problems))

    @classmethod
    def from_file(cls, path: str | Path, tie_break: str = "lattice") -> ParaFuzzyEngine:
        return cls(*load_geometry(path), tie_break=tie_break)

    def fuzzify_certainty(self, dc: float) -> dict[str, float]:
        return self.axes.fuzzify_certainty(dc)

    def fuzzify_contradiction(self, dct: float) -> dict[str, float]:
        return self.axes.fuzzify_contradiction(dct)

    def infer_states(self, dc: float, dct: float) -> dict[LogicalState, float]:
        """Max-min evaluation of the table; '*' cells are skipped."""
        dc, dct = project_to_lattice(dc, dct)
        cdeg = self.fuzzify_certainty(dc)
        kdeg = self.fuzzify_contradiction(dct)
        strengths = {state: 0.0 for state in LogicalState}
        for c, k, state in self.table.cells():
            s = min(cdeg[c], kdeg[k])
            if s > strengths[state]:
                strengths[state] = s
        return strengths

    def compute_crisp(
        self, dc: float, dct: float, strengths: Mapping[LogicalState, float] | None = None
    ) -> float:
        dc, dct = project_to_lattice(dc, dct)
        if strengths is None:
            strengths = self.infer_states(dc, dct)
        family = self.outputs.family(dc)
        activations = [
            RuleActivation(FuzzySet(family[state], AXIS_UNIVERSE), min(s, 1.0), state.label)
            for state, s in strengths.items()
            if s > 0.0
        ]
        # Rounded like the tie comparison so 0.5 does not print as 0.4999...
        crisp = round(defuzzify_centroid(mamdani_infer(activations)), _TIE_DIGITS)
        return min(max(crisp, -1.0), 1.0)

    def evaluate(self, dc: float, dct: float) -> ParaFuzzyResult:
        _check_axis_value("dc", dc)
        _check_axis_value("dct", dct)
        strengths = self.infer_states(dc, dct)
        crisp = self.compute_crisp(dc, dct, strengths)
        return ParaFuzzyResult(select_state(strengths, self.tie_break), strengths, crisp, CertaintyPoint(dc, dct))

    def lattice_sweep(self, grid: StepSpec | None = None) -> list[SweepRecord]:
        grid = grid or StepSpec.uniform()
        records = []
        for dct in grid.dct_values:
            for dc in grid.dc_values:
                r = self.evaluate(dc, dct)
                records.append(SweepRecord(dc, dct, r.crisp, r.state.index))
        return records


def select_state(strengths: Mapping[LogicalState, float], tie_break: str = "lattice") -> LogicalState:
    """Strongest state.

    With ``tie_break="index"`` exact ties go to the lower state index. The
    default ``"lattice"`` rule settles them the way the analyser settles its
    boundaries: an extreme state wins over a near state (⊥ before ⊤), then the
    ⊥ half wins over the ⊤ half, then certainty-dominant wins over
    contradiction-dominant, and only then the lower index. Unlike the bare
    index rule it treats both sides of dc = 0 alike, so the sweep stays
    mirror-symmetric on the dct = 0 line where whole rows of cells tie.
    """
    best = max(round(s, _TIE_DIGITS) for s in strengths.values())
    tied = [state for state, s in strengths.items() if round(s, _TIE_DIGITS) == best]
    if tie_break == "index":
        return min(tied, key=lambda st: st.index)
    return min(tied, key=_lattice_rank)


TIE_BREAKS = ("lattice", "index")


def _lattice_rank(state: LogicalState) -> tuple[int, int, int, int]:
    if state.is_extreme:
        return (0, {"⊥": 0, "⊤": 1}.get(state.label, 2), 0, state.index)
    first = state.label.partition("-")[0]
    half = 0 if "⊥" in state.label else 1
    contradiction_dominant = int(first.startswith("Q⊥") or first.startswith("Q⊤"))
    return (1, half, contradiction_dominant, state.index)


def project_to_lattice(dc: float, dct: float) -> tuple[float, float]:
    """Pull points with |dc| + |dct| > 1 radially onto the lattice boundary.

    Such points cannot come from any evidence pair; the sweep still visits
    them, so they are evaluated at the nearest reachable point on their ray.
    """
    norm = abs(dc) + abs(dct)
    if norm <= 1.0 + EPS:
        return dc, dct
    return dc / norm, dct / norm


def validate_geometry(
    axes: AxisFuzzification, table: InferenceTable, outputs: CrispOutputSets
) -> list[str]:
    problems = []
    for axis, funcs in (
        ("certainty", axes.certainty_functions),
        ("contradiction", axes.contradiction_functions),
    ):
        if not funcs:
            problems.append(f"{axis}: no membership functions")
            continue
        for name, f in funcs.items():
            lo, hi = f.support_hull
            if lo < -1.0 or hi > 1.0:
                problems.append(f"{axis}.{name}: support [{lo}, {hi}] leaves [-1, 1]")
        gaps = _coverage_gaps(funcs.values())
        if gaps:
            problems.append(f"{axis}: no membership covers x = {gaps[0]:g}")
    for (c, k), state in table.entries.items():
        if c not in axes.certainty_functions:
            problems.append(f"table: unknown certainty label {c!r}")
        if k not in axes.contradiction_functions:
            problems.append(f"table: unknown contradiction label {k!r}")
    for c in axes.certainty_functions:
        for k in axes.contradiction_functions:
            if (c, k) not in table.entries:
                problems.append(f"table: missing cell ({c}, {k})")
    used = {state for _, _, state in table.cells()}
    for family_name, family in (("output1", outputs.output_set_1), ("output2", outputs.output_set_2)):
        for state in used:
            if state not in family:
                problems.append(f"{family_name}: no output function for state {state.label}")
        for state, f in family.items():
            lo, hi = f.support_hull
            if lo < -1.0 or hi > 1.0:
                problems.append(f"{family_name}.{state.label}: support leaves [-1, 1]")
    return problems


def _coverage_gaps(funcs) -> list[float]:
    funcs = list(funcs)
    xs = sorted({x for f in funcs for x, _ in f.vertices} | {-1.0, 1.0})
    probes = list(xs) + [(a + b) / 2.0 for a, b in zip(xs, xs[1:])]
    return [x for x in sorted(probes) if -1.0 <= x <= 1.0 and max(f(x) for f in funcs) <= 0.0]


# --- configuration -------------------------------------------------------


def load_geometry(path: str | Path) -> tuple[AxisFuzzification, InferenceTable, CrispOutputSets]:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        return geometry_from_mapping(json.loads(text))
    return geometry_from_ini(text)


def geometry_from_ini(text: str) -> tuple[AxisFuzzification, InferenceTable, CrispOutputSets]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # type: ignore[assignment]
    parser.read_string(text)
    data = {section: dict(parser[section]) for section in parser.sections()}
    return geometry_from_mapping(data)


def geometry_from_mapping(data: Mapping) -> tuple[AxisFuzzification, InferenceTable, CrispOutputSets]:
    try:
        certainty = _functions(data["certainty"])
        contradiction = _functions(data["contradiction"])
        raw_table = data["table"]
        out1 = {LogicalState.from_label(k): _membership(v, k) for k, v in data["output1"].items()}
        out2 = {LogicalState.from_label(k): _membership(v, k) for k, v in data["output2"].items()}
    except KeyError as exc:
        raise GeometryError(f"missing section {exc.args[0]!r}") from None

    entries: dict[tuple[str, str], LogicalState | None] = {}
    for key, value in raw_table.items():
        c, sep, k = normalize_symbols(key).partition(",")
        if not sep:
            raise GeometryError(f"table key {key!r} must read 'certainty,contradiction'")
        value = value.strip()
        entries[(c.strip(), k.strip())] = None if value == IMPOSSIBLE else LogicalState.from_label(value)
    return (
        AxisFuzzification(certainty, contradiction),
        InferenceTable(entries),
        CrispOutputSets(out1, out2),
    )


def geometry_to_mapping(engine: ParaFuzzyEngine) -> dict:
    return {
        "certainty": {k: f.format() for k, f in engine.axes.certainty_functions.items()},
        "contradiction": {k: f.format() for k, f in engine.axes.contradiction_functions.items()},
        "table": {
            f"{c},{k}": (state.label if state else IMPOSSIBLE)
            for (c, k), state in engine.table.entries.items()
        },
        "output1": {s.label: f.format() for s, f in engine.outputs.output_set_1.items()},
        "output2": {s.label: f.format() for s, f in engine.outputs.output_set_2.items()},
    }


def _functions(section: Mapping[str, str]) -> dict[str, PiecewiseLinearMembership]:
    return {normalize_symbols(k): _membership(v, k) for k, v in section.items()}


def _membership(value, name: str) -> PiecewiseLinearMembership:
    if isinstance(value, str):
        return PiecewiseLinearMembership.parse(value, normalize_symbols(name))
    return PiecewiseLinearMembership(tuple(tuple(v) for v in value), normalize_symbols(name))


def _check_axis_value(name: str, value: float) -> None:
    if not -1.0 - EPS <= value <= 1.0 + EPS:
        raise ValueError(f"{name} = {value} outside [-1, 1]")


def _axis_values(step: float) -> tuple[float, ...]:
    if step <= 0 or step > 2:
        raise ValueError(f"step must lie in (0, 2], got {step}")
    n = round(2.0 / step)
    if abs(n * step - 2.0) > 1e-9:
        raise ValueError(f"step {step} does not divide [-1, 1] evenly")
    return tuple(round(-1.0 + i * step, 10) for i in range(n + 1))


DEFAULT_GEOMETRY = "parafuzzy.ini"


@lru_cache(maxsize=1)
def default_engine() -> ParaFuzzyEngine:
    text = resources.files("parafuzzy").joinpath("data", DEFAULT_GEOMETRY).read_text(encoding="utf-8")
    return ParaFuzzyEngine(*geometry_from_ini(text))


# Module-level conveniences over the shipped geometry.


def fuzzify_certainty(dc: float) -> dict[str, float]:
    return default_engine().fuzzify_certainty(dc)


def fuzzify_contradiction(dct: float) -> dict[str, float]:
    return default_engine().fuzzify_contradiction(dct)


def infer_states(dc: float, dct: float) -> dict[LogicalState, float]:
    return default_engine().infer_states(dc, dct)


def compute_crisp(dc: float, dct: float) -> float:
    return default_engine().compute_crisp(dc, dct)


def evaluate(dc: float, dct: float) -> ParaFuzzyResult:
    return default_engine().evaluate(dc, dct)


def lattice_sweep(grid: StepSpec | None = None) -> list[SweepRecord]:
    return default_engine().lattice_sweep(grid)
