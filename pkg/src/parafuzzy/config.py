"""Run configuration: sources, monitored equipment and loop settings.

INI layout (JSON with the same nesting under "run", "sources" and
"equipment" is also accepted)::

    [run]
    cycle_seconds = 300
    cycles = 3
    format = csv
    pace = fast
    start_time = 2020-01-01T00:00:00

    [source tables]
    kind = replay-file
    path = tables.csv

    [equipment scatex]
    profile = scatex-server
    source = tables

Relative paths resolve against the configuration file's directory.
"""

from __future__ import annotations

import configparser
import json
import os
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Mapping

from .engine import GeometryError, ParaFuzzyEngine, default_engine
from .pipeline import DEFAULT_PRECEDENCE, OperatingCondition
from .profiles import EquipmentProfile, ProfileError, profile_warnings, resolve_profile
from .telemetry import (
    DEFAULT_CYCLE_SECONDS,
    ReplaySource,
    SourceError,
    SourceSpec,
    SubsystemBinding,
    TelemetrySource,
    open_source,
)

CONFIG_DIR_ENV = "PARAFUZZY_CONFIG_DIR"
DEFAULT_CONFIG_NAME = "parafuzzy.ini"
FORMATS = ("table", "csv", "json")
PACES = ("realtime", "fast")


class ConfigError(ValueError):
    """The configuration cannot be read at all."""


@dataclass
class RunConfig:
    path: Path | None
    sources: dict[str, SourceSpec]
    equipment: dict[str, tuple[str, str]]  # id -> (profile ref, source name)
    cycle_seconds: int = DEFAULT_CYCLE_SECONDS
    cycles: int | None = None
    output_format: str = "table"
    output: str | None = None
    pace: str = "realtime"
    start_time: datetime | None = None
    geometry: str | None = None
    precedence: tuple[OperatingCondition, ...] = DEFAULT_PRECEDENCE
    problems: list[str] = field(default_factory=list)

    @property
    def base(self) -> Path:
        return self.path.parent if self.path else Path.cwd()


def default_config_path() -> Path:
    env = os.environ.get(CONFIG_DIR_ENV)
    return (Path(env) if env else Path.cwd()) / DEFAULT_CONFIG_NAME


def locate_config(arg: str | None) -> Path:
    if arg is None:
        return default_config_path()
    path = Path(arg)
    env = os.environ.get(CONFIG_DIR_ENV)
    if not path.is_absolute() and not path.exists() and env:
        return Path(env) / path
    return path


def load_config(path: str | Path) -> RunConfig:
    """Parse the file; semantic problems are collected in ``problems``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from None
    try:
        data = json.loads(text) if path.suffix.lower() == ".json" else _ini_to_mapping(text)
    except (json.JSONDecodeError, configparser.Error) as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return config_from_mapping(data, path)


def _ini_to_mapping(text: str) -> dict[str, Any]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # type: ignore[assignment]
    parser.read_string(text)
    data: dict[str, Any] = {"run": {}, "sources": {}, "equipment": {}, "unknown": []}
    for section in parser.sections():
        kind, _, name = section.partition(" ")
        items = dict(parser[section])
        if section == "run":
            data["run"] = items
        elif kind == "source" and name.strip():
            data["sources"][name.strip()] = items
        elif kind == "equipment" and name.strip():
            data["equipment"][name.strip()] = items
        else:
            data["unknown"].append(section)
    return data


def config_from_mapping(data: Mapping[str, Any], path: Path | None = None) -> RunConfig:
    where = str(path) if path else "<config>"
    problems: list[str] = [f"{where}: unknown section [{s}]" for s in data.get("unknown", [])]
    run = dict(data.get("run", {}))

    def number(key: str, default: int | None) -> int | None:
        raw = run.get(key)
        if raw in (None, ""):
            return default
        try:
            return int(raw)
        except (TypeError, ValueError):
            problems.append(f"{where}: [run] {key} must be an integer, got {raw!r}")
            return default

    cycle_seconds = number("cycle_seconds", DEFAULT_CYCLE_SECONDS) or DEFAULT_CYCLE_SECONDS
    if cycle_seconds < 1:
        problems.append(f"{where}: [run] cycle_seconds must be at least 1")
    cycles = number("cycles", None)
    if cycles is not None and cycles < 0:
        problems.append(f"{where}: [run] cycles must be non-negative")
    fmt = str(run.get("format", "table"))
    if fmt not in FORMATS:
        problems.append(f"{where}: [run] format must be one of {', '.join(FORMATS)}")
    pace = str(run.get("pace", "realtime"))
    if pace not in PACES:
        problems.append(f"{where}: [run] pace must be one of {', '.join(PACES)}")
    start_time = None
    if run.get("start_time"):
        try:
            start_time = datetime.fromisoformat(str(run["start_time"]))
        except ValueError:
            problems.append(f"{where}: [run] start_time {run['start_time']!r} is not ISO 8601")
    precedence = DEFAULT_PRECEDENCE
    if run.get("precedence"):
        raw = run["precedence"]
        names = raw if isinstance(raw, list) else [p.strip() for p in str(raw).split(",")]
        try:
            precedence = tuple(OperatingCondition(n.upper()) for n in names if n)
        except ValueError as exc:
            problems.append(f"{where}: [run] precedence: {exc}")
        if set(precedence) != set(OperatingCondition) or len(precedence) != len(OperatingCondition):
            problems.append(f"{where}: [run] precedence must list each condition exactly once")
            precedence = DEFAULT_PRECEDENCE

    sources = {}
    for name, params in data.get("sources", {}).items():
        params = {k: str(v) for k, v in params.items()}
        kind = params.pop("kind", "")
        try:
            sources[name] = SourceSpec(kind, params, name)
        except SourceError as exc:
            problems.append(f"{where}: [source {name}] {exc}")

    equipment = {}
    for eq, params in data.get("equipment", {}).items():
        profile = str(params.get("profile", "")).strip()
        source = str(params.get("source", "")).strip()
        if not profile:
            problems.append(f"{where}: [equipment {eq}] missing profile")
        if not source:
            problems.append(f"{where}: [equipment {eq}] missing source")
        elif source not in data.get("sources", {}):
            problems.append(f"{where}: [equipment {eq}] unknown source {source!r}")
        equipment[eq] = (profile, source)
    if not equipment:
        problems.append(f"{where}: no [equipment ...] sections")

    return RunConfig(
        path=path,
        sources=sources,
        equipment=equipment,
        cycle_seconds=cycle_seconds,
        cycles=cycles,
        output_format=fmt,
        output=run.get("output") or None,
        pace=pace,
        start_time=start_time,
        geometry=run.get("geometry") or None,
        precedence=precedence,
        problems=problems,
    )


@dataclass
class Prepared:
    """Everything needed to start the scheduler."""

    engine: ParaFuzzyEngine
    bindings: list[SubsystemBinding]
    sources: dict[str, TelemetrySource]
    warnings: list[str]


def prepare(cfg: RunConfig) -> tuple[Prepared | None, list[str]]:
    """Load profiles, geometry and sources; return (prepared, problems)."""
    problems = list(cfg.problems)
    warnings: list[str] = []

    engine = default_engine()
    if cfg.geometry:
        geo = Path(cfg.geometry)
        geo = geo if geo.is_absolute() else cfg.base / geo
        try:
            engine = ParaFuzzyEngine.from_file(geo)
        except OSError as exc:
            problems.append(f"{geo}: {exc.strerror or exc}")
        except (GeometryError, ValueError) as exc:
            problems.append(f"{geo}: {exc}")

    profiles: dict[str, EquipmentProfile] = {}
    bindings = []
    for eq, (ref, source) in cfg.equipment.items():
        if not ref:
            continue
        try:
            if ref not in profiles:
                profiles[ref] = resolve_profile(ref, cfg.base)
                warnings += profile_warnings(profiles[ref])
        except ProfileError as exc:
            problems += exc.problems
            continue
        except OSError as exc:
            problems.append(f"[equipment {eq}] profile {ref!r}: {exc.strerror or exc}")
            continue
        bindings.append(SubsystemBinding(eq, profiles[ref], source))

    variables = {(b.equipment, v.name): v for b in bindings for v in b.profile.variables.values()}
    sources: dict[str, TelemetrySource] = {}
    for name, spec in cfg.sources.items():
        try:
            sources[name] = open_source(spec, variables, cfg.base)
        except SourceError as exc:
            problems.append(str(exc))
            continue
        src = sources[name]
        if isinstance(src, ReplaySource):
            units = src.units()
            for b in bindings:
                if b.source != name:
                    continue
                for v in b.profile.variables.values():
                    seen = units.get((b.equipment, v.name), set())
                    bad = sorted(u for u in seen if u != v.unit)
                    if bad:
                        problems.append(
                            f"{src.origin}: {b.equipment}/{v.name} unit {bad[0]!r} does not match"
                            f" profile unit {v.unit!r}"
                        )

    if problems:
        return None, problems
    return Prepared(engine, bindings, sources, warnings), []
