"""Paired readings from pluggable sources, polled on a fixed cycle.

Three source kinds exist: ``replay-file`` (a CSV script), ``synthetic-scenario``
(generated from the profiles' category plateaus) and ``adapter`` (an extension
point for real collectors; none ship).
"""

from __future__ import annotations

import abc
import csv
import importlib
import logging
import math
import random
import time
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Callable, Iterator, Mapping, Sequence

from .engine import ParaFuzzyEngine
from .evidence import VariableSpec
from .fuzzy import PiecewiseLinearMembership
from .pipeline import (
    DEFAULT_PRECEDENCE,
    OperatingCondition,
    SubsystemReport,
    run_subsystem,
    stale_report,
)
from .profiles import EquipmentProfile

log = logging.getLogger(__name__)

REPLAY_HEADER = ("cycle", "equipment", "variable", "reading_1", "reading_2", "unit")
SOURCE_KINDS = ("replay-file", "synthetic-scenario", "adapter")
DEFAULT_CYCLE_SECONDS = 300

Wanted = tuple[str, str]  # (equipment, variable)


class SourceError(ValueError):
    pass


@dataclass(frozen=True)
class TelemetrySample:
    equipment: str
    variable: str
    reading_1: float
    reading_2: float
    unit: str
    cycle: int
    timestamp: datetime | None = None

    def __post_init__(self) -> None:
        for name in ("reading_1", "reading_2"):
            value = getattr(self, name)
            if value is None or not math.isfinite(value):
                raise ValueError(f"{self.equipment}/{self.variable}: {name} missing or not finite")

    @property
    def pair(self) -> tuple[float, float]:
        return self.reading_1, self.reading_2


@dataclass(frozen=True)
class StaleMarker:
    """No usable data for one wanted pair this cycle."""

    equipment: str
    variable: str
    cycle: int
    reason: str = "no data"


@dataclass(frozen=True)
class SourceSpec:
    kind: str
    params: Mapping[str, str] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind not in SOURCE_KINDS:
            raise SourceError(f"source {self.name!r}: kind must be one of {', '.join(SOURCE_KINDS)}")
        required = {"replay-file": "path", "synthetic-scenario": "scenario", "adapter": "target"}[self.kind]
        if not self.params.get(required):
            raise SourceError(f"source {self.name!r}: kind {self.kind} needs parameter {required!r}")
        if self.kind == "synthetic-scenario" and self.params["scenario"] not in SCENARIOS:
            raise SourceError(
                f"source {self.name!r}: unknown scenario {self.params['scenario']!r};"
                f" known: {', '.join(SCENARIOS)}"
            )


class TelemetrySource(abc.ABC):
    #: Number of cycles the source can serve, or None if unbounded.
    length: int | None = None

    @abc.abstractmethod
    def poll(self, cycle: int, wanted: Sequence[Wanted]) -> list[TelemetrySample | StaleMarker]:
        """One entry per wanted pair for cycle index ``cycle`` (0-based)."""


# --- replay ----------------------------------------------------------------


class ReplaySource(TelemetrySource):
    """Rows grouped by their ``cycle`` value; the n-th poll serves the n-th group."""

    def __init__(self, rows: Sequence[Mapping[str, str]], origin: str = "<replay>") -> None:
        self.origin = origin
        groups: dict[int, dict[Wanted, tuple[str, str, str]]] = {}
        for lineno, row in enumerate(rows, start=2):
            try:
                cycle = int(row["cycle"])
            except (TypeError, ValueError):
                raise SourceError(f"{origin}:{lineno}: cycle {row.get('cycle')!r} is not an integer") from None
            key = (row["equipment"].strip(), row["variable"].strip())
            group = groups.setdefault(cycle, {})
            if key in group:
                raise SourceError(f"{origin}:{lineno}: duplicate row for {key[0]}/{key[1]} in cycle {cycle}")
            group[key] = (row["reading_1"].strip(), row["reading_2"].strip(), row["unit"].strip())
        self.cycle_ids = sorted(groups)
        self._groups = groups
        self.length = len(self.cycle_ids)

    @classmethod
    def from_file(cls, path: str | Path) -> ReplaySource:
        path = Path(path)
        try:
            with path.open(newline="", encoding="utf-8") as fh:
                reader = csv.DictReader(fh)
                header = tuple(h.strip() for h in (reader.fieldnames or ()))
                if header and header != REPLAY_HEADER:
                    raise SourceError(f"{path}: header must be {','.join(REPLAY_HEADER)}, got {','.join(header)}")
                rows = list(reader)
        except OSError as exc:
            raise SourceError(f"{path}: {exc.strerror}") from None
        return cls(rows, str(path))

    def units(self) -> dict[Wanted, set[str]]:
        out: dict[Wanted, set[str]] = {}
        for group in self._groups.values():
            for key, (_, _, unit) in group.items():
                out.setdefault(key, set()).add(unit)
        return out

    def poll(self, cycle: int, wanted: Sequence[Wanted]) -> list[TelemetrySample | StaleMarker]:
        if cycle >= len(self.cycle_ids):
            return [StaleMarker(eq, var, cycle, "replay exhausted") for eq, var in wanted]
        cycle_id = self.cycle_ids[cycle]
        group = self._groups[cycle_id]
        out: list[TelemetrySample | StaleMarker] = []
        for eq, var in wanted:
            row = group.get((eq, var))
            if row is None:
                out.append(StaleMarker(eq, var, cycle_id))
                continue
            r1, r2, unit = row
            try:
                out.append(TelemetrySample(eq, var, float(r1), float(r2), unit, cycle_id))
            except ValueError:
                out.append(StaleMarker(eq, var, cycle_id, "unreadable value"))
        return out


# --- synthetic -------------------------------------------------------------


def plateau(f: PiecewiseLinearMembership) -> tuple[float, float]:
    """Interval where the function reaches its maximum."""
    top = max(y for _, y in f.vertices)
    xs = [x for x, y in f.vertices if y == top]
    return min(xs), max(xs)


def _mid(f: PiecewiseLinearMembership) -> float:
    lo, hi = plateau(f)
    return (lo + hi) / 2.0


def _steady(index: int) -> Callable[[VariableSpec, int, random.Random], tuple[float, float]]:
    def gen(v: VariableSpec, cycle: int, rng: random.Random) -> tuple[float, float]:
        x = _mid(v.category_functions[index])
        return x, x

    return gen


def _noisy_normal(v: VariableSpec, cycle: int, rng: random.Random) -> tuple[float, float]:
    lo, hi = plateau(v.category_functions[0])
    return rng.uniform(lo, hi), rng.uniform(lo, hi)


def _conflicting(v: VariableSpec, cycle: int, rng: random.Random) -> tuple[float, float]:
    return _mid(v.category_functions[0]), _mid(v.category_functions[2])


def _ramp(v: VariableSpec, cycle: int, rng: random.Random, steps: int = 12) -> tuple[float, float]:
    start, end = _mid(v.category_functions[0]), _mid(v.category_functions[2])
    x = start + (end - start) * min(cycle / steps, 1.0)
    return x, x


SCENARIOS: dict[str, Callable[[VariableSpec, int, random.Random], tuple[float, float]]] = {
    "steady-normal": _steady(0),
    "steady-undefined": _steady(1),
    "steady-failure": _steady(2),
    "noisy-normal": _noisy_normal,
    "conflicting": _conflicting,
    "ramp-to-failure": _ramp,
}


class SyntheticSource(TelemetrySource):
    """Readings derived from each variable's category plateaus; unbounded."""

    def __init__(
        self,
        scenario: str,
        variables: Mapping[Wanted, VariableSpec],
        seed: int = 0,
    ) -> None:
        if scenario not in SCENARIOS:
            raise SourceError(f"unknown scenario {scenario!r}")
        self.scenario = scenario
        self.variables = dict(variables)
        self.seed = seed
        self.length = None

    def poll(self, cycle: int, wanted: Sequence[Wanted]) -> list[TelemetrySample | StaleMarker]:
        gen = SCENARIOS[self.scenario]
        out: list[TelemetrySample | StaleMarker] = []
        for eq, var in wanted:
            spec = self.variables.get((eq, var))
            if spec is None:
                out.append(StaleMarker(eq, var, cycle, "variable unknown to scenario"))
                continue
            # Per-pair stream so results do not depend on polling order.
            rng = random.Random(f"{self.seed}:{eq}:{var}:{cycle}")
            r1, r2 = gen(spec, cycle, rng)
            out.append(TelemetrySample(eq, var, r1, r2, spec.unit, cycle))
        return out


# --- adapter ---------------------------------------------------------------


class TelemetryAdapter(abc.ABC):
    """Extension point for a real collector (SNMP, IEC 104, ...)."""

    @abc.abstractmethod
    def read_pair(self, equipment: str, variable: str) -> tuple[float, float] | None:
        """Two readings for the variable, or None when unavailable."""

    def unit(self, equipment: str, variable: str) -> str:
        return ""


class AdapterSource(TelemetrySource):
    def __init__(self, adapter: TelemetryAdapter) -> None:
        self.adapter = adapter
        self.length = None

    def poll(self, cycle: int, wanted: Sequence[Wanted]) -> list[TelemetrySample | StaleMarker]:
        out: list[TelemetrySample | StaleMarker] = []
        for eq, var in wanted:
            try:
                pair = self.adapter.read_pair(eq, var)
            except Exception as exc:  # a broken collector must not stop the loop
                log.warning("adapter read failed for %s/%s: %s", eq, var, exc)
                pair = None
            if pair is None:
                out.append(StaleMarker(eq, var, cycle))
            else:
                out.append(TelemetrySample(eq, var, pair[0], pair[1], self.adapter.unit(eq, var), cycle))
        return out


def open_source(
    spec: SourceSpec,
    variables: Mapping[Wanted, VariableSpec] | None = None,
    base: Path | None = None,
) -> TelemetrySource:
    if spec.kind == "replay-file":
        path = Path(spec.params["path"])
        if base is not None and not path.is_absolute():
            path = base / path
        return ReplaySource.from_file(path)
    if spec.kind == "synthetic-scenario":
        seed = int(spec.params.get("seed", "0"))
        return SyntheticSource(spec.params["scenario"], variables or {}, seed)
    module_name, _, attr = spec.params["target"].partition(":")
    try:
        factory = getattr(importlib.import_module(module_name), attr)
    except (ImportError, AttributeError) as exc:
        raise SourceError(f"source {spec.name!r}: cannot load adapter {spec.params['target']!r}: {exc}") from None
    adapter = factory()
    if not isinstance(adapter, TelemetryAdapter):
        raise SourceError(f"source {spec.name!r}: {spec.params['target']} is not a TelemetryAdapter")
    return AdapterSource(adapter)


def poll(
    source: TelemetrySource, wanted: Sequence[Wanted], cycle: int = 0
) -> list[TelemetrySample | StaleMarker]:
    return source.poll(cycle, wanted)


# --- scheduler -------------------------------------------------------------


@dataclass(frozen=True)
class SubsystemBinding:
    """One monitored equipment: its telemetry id, profile and source."""

    equipment: str
    profile: EquipmentProfile
    source: str

    @property
    def kind(self) -> str:
        return self.profile.subsystem

    def wanted(self) -> list[Wanted]:
        return [(self.equipment, v) for v in self.profile.variables]


def run_scheduler(
    sources: Mapping[str, TelemetrySource],
    subsystems: Sequence[SubsystemBinding],
    cycle_seconds: int = DEFAULT_CYCLE_SECONDS,
    cycles: int | None = None,
    *,
    engine: ParaFuzzyEngine | None = None,
    precedence: Sequence[OperatingCondition] = DEFAULT_PRECEDENCE,
    start_time: datetime | None = None,
    realtime: bool = True,
    clock: Callable[[], float] = time.monotonic,
    sleep: Callable[[float], None] = time.sleep,
) -> Iterator[SubsystemReport]:
    """Poll every source, then run every subsystem, once per cycle.

    Cycle n is scheduled at ``start + n * cycle_seconds`` so a slow cycle does
    not push later ones back. With ``cycles=None`` the loop runs until every
    bounded source is exhausted, or forever if all sources are unbounded.
    ``realtime=False`` skips the waits (replays); timestamps still follow the
    schedule.
    """
    if cycle_seconds < 1:
        raise ValueError("cycle_seconds must be at least 1")
    if cycles is not None and cycles < 0:
        raise ValueError("cycles must be non-negative")
    for b in subsystems:
        if b.source not in sources:
            raise SourceError(f"equipment {b.equipment!r} uses unknown source {b.source!r}")
    if cycles is None:
        lengths = [sources[b.source].length for b in subsystems]
        bounded = [n for n in lengths if n is not None]
        if bounded:
            cycles = max(bounded)

    start_wall = start_time or datetime.now().replace(microsecond=0)
    start = clock()
    n = 0
    while cycles is None or n < cycles:
        if realtime:
            delay = start + n * cycle_seconds - clock()
            if delay > 0:
                sleep(delay)
        stamp = start_wall + timedelta(seconds=n * cycle_seconds)
        yield from run_cycle(sources, subsystems, n, stamp, engine, precedence)
        n += 1


def run_cycle(
    sources: Mapping[str, TelemetrySource],
    subsystems: Sequence[SubsystemBinding],
    cycle: int,
    timestamp: datetime | None = None,
    engine: ParaFuzzyEngine | None = None,
    precedence: Sequence[OperatingCondition] = DEFAULT_PRECEDENCE,
) -> list[SubsystemReport]:
    # Poll each source once for everything bound to it.
    polled: dict[Wanted, TelemetrySample | StaleMarker] = {}
    for name, source in sources.items():
        wanted = [w for b in subsystems if b.source == name for w in b.wanted()]
        if not wanted:
            continue
        try:
            entries = source.poll(cycle, wanted)
        except Exception as exc:
            log.error("cycle %d: polling source %s failed: %s", cycle, name, exc)
            entries = [StaleMarker(eq, var, cycle, "source failed") for eq, var in wanted]
        for entry in entries:
            polled[(entry.equipment, entry.variable)] = entry

    reports = []
    number = cycle + 1  # reports count cycles from 1
    for b in subsystems:
        entries = [polled.get(w) or StaleMarker(w[0], w[1], cycle) for w in b.wanted()]
        stale = [e.variable for e in entries if isinstance(e, StaleMarker)]
        if stale:
            reports.append(stale_report(b.kind, b.profile, stale, number, timestamp, b.equipment))
            continue
        samples = {e.variable: e.pair for e in entries if isinstance(e, TelemetrySample)}
        try:
            reports.append(
                run_subsystem(b.kind, b.profile, samples, engine, precedence, number, timestamp, b.equipment)
            )
        except Exception:
            log.exception("cycle %d: subsystem %s (%s) failed", cycle, b.kind, b.equipment)
    return reports
