"""Equipment profiles: category functions, evidence outputs and association
rules for each monitored device, loaded from INI or JSON files.

INI layout::

    [profile]
    name = scatex-server
    subsystem = A

    [variable proc]
    unit = %
    f1 = (0,0;0,1;15,1;50;0)
    f2 = (15,0;50,1;60,1;70,0)
    f3 = (60,0;70,1;100,1;100,0)

    [outputs]
    fav4 = (0,0;0,1;0,1;0.5;0)
    ...
    unfav6 = (0.5,0;1,1;1,1;1,0)

    [node 1]
    variables = proc, mem
    rule 1 = (proc function 1 AND mem function 1) OR (proc function 2 AND mem function 1) -> 4, 6
    other = 6, 4

Rules read ``<groups> -> <fav>, <unfav>``; groups are joined by OR, literals
inside a group by AND, and each literal is ``<variable> [function] <1..3>``.
"""

from __future__ import annotations

import configparser
import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .evidence import (
    CATEGORY_INDICES,
    OUTPUT_INDICES,
    AssociationRule,
    EvidenceOutputSpec,
    NodeSpec,
    VariableSpec,
)
from .fuzzy import PiecewiseLinearMembership

SUBSYSTEM_KINDS = ("A", "B", "C")
PRESET_DIR = "profiles"


class ProfileError(ValueError):
    """Raised with every problem found, not just the first."""

    def __init__(self, problems: list[str]) -> None:
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass(frozen=True)
class EquipmentProfile:
    name: str
    subsystem: str
    description: str
    variables: Mapping[str, VariableSpec]
    outputs: EvidenceOutputSpec
    nodes: tuple[NodeSpec, ...]

    def variable_names(self) -> list[str]:
        return list(self.variables)


# --- parsing ---------------------------------------------------------------


def parse_vertices(text: str, name: str = "") -> PiecewiseLinearMembership:
    return PiecewiseLinearMembership.parse(text.strip().strip("()"), name)


_LITERAL = re.compile(r"^\s*([A-Za-z_][\w]*)\s+(?:function\s+)?(\d+)\s*$", re.IGNORECASE)


def parse_rule(text: str, label: str = "") -> AssociationRule:
    """Parse ``(a 1 AND b 2) OR (a 2 AND b 1) -> 4, 6``."""
    body, arrow, then = text.partition("->")
    if not arrow:
        raise ValueError(f"rule {label!r}: missing '->'")
    consequent = _parse_consequent(then, label)
    groups = []
    for raw_group in re.split(r"\bOR\b", body, flags=re.IGNORECASE):
        literals = []
        for raw_lit in re.split(r"\bAND\b", raw_group.strip().strip("()"), flags=re.IGNORECASE):
            m = _LITERAL.match(raw_lit.strip("() "))
            if not m:
                raise ValueError(f"rule {label!r}: cannot read literal {raw_lit.strip()!r}")
            literals.append((m.group(1), int(m.group(2))))
        groups.append(tuple(literals))
    return AssociationRule(tuple(groups), consequent, label)


def _parse_consequent(text: str, label: str) -> tuple[int, int]:
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ValueError(f"rule {label!r}: consequent must be '<fav>, <unfav>', got {text.strip()!r}")
    return int(parts[0]), int(parts[1])


def ini_to_mapping(text: str) -> dict[str, Any]:
    """Convert the INI layout into the JSON layout accepted by ``build_profile``."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # type: ignore[assignment]
    parser.read_string(text)
    data: dict[str, Any] = {"profile": {}, "variables": {}, "outputs": {}, "nodes": []}
    for section in parser.sections():
        items = dict(parser[section])
        kind, _, arg = section.partition(" ")
        if section == "profile":
            data["profile"] = items
        elif kind == "variable":
            unit = items.pop("unit", "")
            data["variables"][arg.strip()] = {
                "unit": unit,
                "functions": [items.get(f"f{i}") for i in CATEGORY_INDICES],
                "extra": sorted(k for k in items if k not in ("f1", "f2", "f3")),
            }
        elif section == "outputs":
            data["outputs"] = {
                "favourable": {str(i): items.get(f"fav{i}") for i in OUTPUT_INDICES},
                "unfavourable": {str(i): items.get(f"unfav{i}") for i in OUTPUT_INDICES},
            }
        elif kind == "node":
            node = {
                "id": arg.strip(),
                "variables": [v.strip() for v in items.pop("variables", "").split(",") if v.strip()],
                "other": items.pop("other", None),
                "rules": [{"label": k, "text": v} for k, v in items.items()],
            }
            data["nodes"].append(node)
        else:
            data.setdefault("unknown_sections", []).append(section)
    return data


def build_profile(data: Mapping[str, Any], source: str = "<profile>") -> EquipmentProfile:
    """Build and validate; raises ProfileError listing every violation."""
    problems: list[str] = []
    where = source

    meta = data.get("profile", {})
    name = str(meta.get("name", "")).strip() or Path(source).stem
    subsystem = str(meta.get("subsystem", "")).strip().upper()
    if subsystem not in SUBSYSTEM_KINDS:
        problems.append(f"{where}: [profile] subsystem must be one of A, B, C, got {subsystem!r}")
    for section in data.get("unknown_sections", []):
        problems.append(f"{where}: unknown section [{section}]")

    variables: dict[str, VariableSpec] = {}
    for vname, vdata in data.get("variables", {}).items():
        loc = f"{where}: [variable {vname}]"
        for key in vdata.get("extra", []):
            problems.append(f"{loc} unknown key {key!r}")
        funcs = []
        raw = list(vdata.get("functions", []))
        if len(raw) != 3:
            problems.append(f"{loc} needs exactly 3 category functions f1, f2, f3")
            continue
        for i, text in enumerate(raw, start=1):
            if text is None:
                problems.append(f"{loc} missing f{i}")
                continue
            try:
                funcs.append(_as_membership(text, f"{vname}.f{i}"))
            except ValueError as exc:
                problems.append(f"{loc} f{i}: {exc}")
        if len(funcs) != 3:
            continue
        variables[vname] = VariableSpec(vname, str(vdata.get("unit", "")), tuple(funcs))
    if not data.get("variables"):
        problems.append(f"{where}: no [variable ...] sections")

    outputs = None
    out_data = data.get("outputs") or {}
    sides: dict[str, dict[int, PiecewiseLinearMembership]] = {"favourable": {}, "unfavourable": {}}
    for side, prefix in (("favourable", "fav"), ("unfavourable", "unfav")):
        for idx in OUTPUT_INDICES:
            text = (out_data.get(side) or {}).get(str(idx))
            if text is None:
                problems.append(f"{where}: [outputs] missing {prefix}{idx}")
                continue
            try:
                f = _as_membership(text, f"{prefix}{idx}")
            except ValueError as exc:
                problems.append(f"{where}: [outputs] {prefix}{idx}: {exc}")
                continue
            lo, hi = f.support_hull
            if lo < 0.0 or hi > 1.0:
                problems.append(f"{where}: [outputs] {prefix}{idx}: support [{lo:g}, {hi:g}] leaves [0, 1]")
                continue
            sides[side][idx] = f
    if all(len(s) == 3 for s in sides.values()):
        outputs = EvidenceOutputSpec(sides["favourable"], sides["unfavourable"])

    nodes = []
    for ndata in data.get("nodes", []):
        node = _build_node(ndata, name, variables, outputs, where, problems)
        if node is not None:
            nodes.append(node)
    if not data.get("nodes"):
        problems.append(f"{where}: no [node ...] sections")
    expected = {"A": 2, "B": 1, "C": 1}.get(subsystem)
    if expected is not None and len(data.get("nodes", [])) != expected:
        problems.append(
            f"{where}: subsystem {subsystem} needs {expected} node(s), found {len(data.get('nodes', []))}"
        )

    if problems:
        raise ProfileError(problems)
    assert outputs is not None
    return EquipmentProfile(
        name, subsystem, str(meta.get("description", "")), variables, outputs, tuple(nodes)
    )


def _build_node(ndata, equipment, variables, outputs, where, problems) -> NodeSpec | None:
    nid = str(ndata.get("id", "")).strip() or "?"
    loc = f"{where}: [node {nid}]"
    ok = True
    vnames = list(ndata.get("variables", []))
    if len(vnames) != 2:
        problems.append(f"{loc} needs exactly two variables, got {len(vnames)}")
        ok = False
    for v in vnames:
        if v not in variables:
            problems.append(f"{loc} variable {v!r} is not defined by the profile")
            ok = False

    rules = []
    for rdata in ndata.get("rules", []):
        label = str(rdata.get("label", ""))
        try:
            if "text" in rdata:
                rule = parse_rule(rdata["text"], label)
            else:
                groups = tuple(tuple((str(v), int(i)) for v, i in g) for g in rdata["when"])
                rule = AssociationRule(groups, tuple(rdata["then"]), label)  # type: ignore[arg-type]
        except (ValueError, KeyError, TypeError) as exc:
            problems.append(f"{loc} {label or 'rule'}: {exc}")
            ok = False
            continue
        for var, idx in (lit for g in rule.groups for lit in g):
            if var not in vnames:
                problems.append(f"{loc} {label}: variable {var!r} is not one of the node's variables")
                ok = False
            if idx not in CATEGORY_INDICES:
                problems.append(f"{loc} {label}: category function {idx} not in 1..3")
                ok = False
        ok &= _check_consequent(rule.consequent, f"{loc} {label}", problems)
        rules.append(rule)

    other = ndata.get("other")
    if other is None:
        problems.append(f"{loc} missing catch-all 'other' consequent")
        ok = False
    else:
        try:
            consequent = _parse_consequent(other, "other") if isinstance(other, str) else tuple(other)
        except ValueError as exc:
            problems.append(f"{loc} {exc}")
            ok = False
        else:
            ok &= _check_consequent(consequent, f"{loc} other", problems)
            rules.append(AssociationRule((), consequent, "other"))  # type: ignore[arg-type]

    if not ok or outputs is None:
        return None
    return NodeSpec(
        nid, equipment, (variables[vnames[0]], variables[vnames[1]]), tuple(rules), outputs
    )


def _check_consequent(consequent, loc: str, problems: list[str]) -> bool:
    if len(consequent) != 2 or any(i not in OUTPUT_INDICES for i in consequent):
        problems.append(f"{loc}: consequent {tuple(consequent)} must name output functions 4..6")
        return False
    return True


def _as_membership(value, name: str) -> PiecewiseLinearMembership:
    if isinstance(value, str):
        return parse_vertices(value, name)
    return PiecewiseLinearMembership(tuple(tuple(v) for v in value), name)


def profile_warnings(profile: EquipmentProfile, source: str = "") -> list[str]:
    """Non-fatal findings: readings no category function covers.

    Such readings fall through to the catch-all rule, so evaluation still
    works; the gap usually points at a mistyped breakpoint.
    """
    where = source or profile.name
    warnings = []
    for v in profile.variables.values():
        gap = coverage_gap(v)
        if gap is not None:
            warnings.append(f"{where}: [variable {v.name}] no category function covers reading {gap:g}")
    return warnings


def coverage_gap(v: VariableSpec) -> float | None:
    """First reading in the operating range where all three categories are 0."""
    lo, hi = v.operating_range
    xs = sorted({x for f in v.category_functions for x, _ in f.vertices})
    probes = xs + [(a + b) / 2.0 for a, b in zip(xs, xs[1:])]
    for x in sorted(probes):
        if lo <= x <= hi and max(f(x) for f in v.category_functions) <= 0.0:
            return x
    return None


# --- loading ---------------------------------------------------------------


def load_profile(path: str | Path) -> EquipmentProfile:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return profile_from_text(text, str(path), json_format=path.suffix.lower() == ".json")


def profile_from_text(text: str, source: str, json_format: bool = False) -> EquipmentProfile:
    try:
        data = json.loads(text) if json_format else ini_to_mapping(text)
    except (json.JSONDecodeError, configparser.Error) as exc:
        raise ProfileError([f"{source}: {exc}"]) from None
    return build_profile(data, source)


def preset_names() -> list[str]:
    root = resources.files("parafuzzy").joinpath("data", PRESET_DIR)
    return sorted(p.name[: -len(".ini")] for p in root.iterdir() if p.name.endswith(".ini"))


def load_preset(name: str) -> EquipmentProfile:
    if name not in preset_names():
        raise KeyError(f"unknown equipment preset {name!r}; known: {', '.join(preset_names())}")
    text = resources.files("parafuzzy").joinpath("data", PRESET_DIR, f"{name}.ini").read_text(
        encoding="utf-8"
    )
    return profile_from_text(text, f"preset:{name}")


def resolve_profile(ref: str, base: Path | None = None) -> EquipmentProfile:
    """A preset name, or a path (relative to ``base``) to a profile file."""
    if ref in preset_names():
        return load_preset(ref)
    path = Path(ref)
    if base is not None and not path.is_absolute():
        path = base / path
    return load_profile(path)


def describe_profile(profile: EquipmentProfile) -> str:
    """The effective profile as text, in the INI layout."""
    lines = [
        "[profile]",
        f"name = {profile.name}",
        f"subsystem = {profile.subsystem}",
    ]
    if profile.description:
        lines.append(f"description = {profile.description}")
    for v in profile.variables.values():
        lines += ["", f"[variable {v.name}]", f"unit = {v.unit}"]
        lines += [f"f{i} = ({f.format()})" for i, f in enumerate(v.category_functions, start=1)]
    lines += ["", "[outputs]"]
    lines += [f"fav{i} = ({profile.outputs.favourable[i].format()})" for i in OUTPUT_INDICES]
    lines += [f"unfav{i} = ({profile.outputs.unfavourable[i].format()})" for i in OUTPUT_INDICES]
    for node in profile.nodes:
        lines += ["", f"[node {node.node_id}]", f"variables = {', '.join(node.variable_names)}"]
        for rule in node.rules:
            fav, unfav = rule.consequent
            if rule.is_catch_all:
                lines.append(f"other = {fav}, {unfav}")
                continue
            body = " OR ".join(
                "(" + " AND ".join(f"{var} function {idx}" for var, idx in g) + ")" for g in rule.groups
            )
            lines.append(f"{rule.label} = {body} -> {fav}, {unfav}")
    return "\n".join(lines) + "\n"
