"""Report and sweep serialisation, plus lattice figures.

Text and CSV reports follow the column order of the published test tables:
equipment, test/node, engineering variables read, (mu, lambda; Dc, Dct),
(crisp; logical state), operation condition.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

from .engine import SweepRecord
from .pal2v import LogicalState
from .pipeline import NodeResult, SubsystemReport

CSV_COLUMNS = (
    "equipment",
    "profile",
    "subsystem",
    "cycle",
    "timestamp",
    "node",
    "variables",
    "mu",
    "lambda",
    "dc",
    "dct",
    "crisp",
    "state",
    "state_index",
    "condition",
    "stale",
)
SWEEP_COLUMNS = ("dc", "dct", "crisp", "state_index")
STALE = "STALE"


def _num(x: float, digits: int = 4) -> str:
    s = f"{x:.{digits}f}"
    # No "-0.0000" in reports.
    return s[1:] if s.startswith("-") and float(s) == 0.0 else s


def format_readings(node: NodeResult) -> str:
    return "; ".join(f"{name}=({r1:g},{r2:g})" for name, (r1, r2) in node.readings.items())


def report_rows(reports: Iterable[SubsystemReport]) -> list[dict[str, str]]:
    rows = []
    for rep in reports:
        common = {
            "equipment": rep.equipment,
            "profile": rep.profile,
            "subsystem": rep.subsystem,
            "cycle": str(rep.cycle),
            "timestamp": rep.timestamp.isoformat() if rep.timestamp else "",
        }
        if not rep.nodes:
            rows.append(
                {**{c: "" for c in CSV_COLUMNS}, **common, "condition": STALE, "stale": " ".join(rep.stale)}
            )
            continue
        for node in rep.nodes:
            rows.append(
                {
                    **common,
                    "node": node.node_id,
                    "variables": format_readings(node),
                    "mu": _num(node.evidence.mu),
                    "lambda": _num(node.evidence.lam),
                    "dc": _num(node.point.dc),
                    "dct": _num(node.point.dct),
                    "crisp": _num(node.crisp, 6),
                    "state": node.state_label,
                    "state_index": str(node.state.index),
                    "condition": str(rep.condition),
                    "stale": "",
                }
            )
    return rows


def render_csv(reports: Iterable[SubsystemReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(report_rows(reports))
    return buf.getvalue()


def report_to_dict(rep: SubsystemReport) -> dict:
    return {
        "equipment": rep.equipment,
        "profile": rep.profile,
        "subsystem": rep.subsystem,
        "cycle": rep.cycle,
        "timestamp": rep.timestamp.isoformat() if rep.timestamp else None,
        "condition": str(rep.condition) if rep.condition else STALE,
        "stale": list(rep.stale),
        "nodes": [
            {
                "node": n.node_id,
                "readings": {k: list(v) for k, v in n.readings.items()},
                "mu": round(n.evidence.mu, 10),
                "lambda": round(n.evidence.lam, 10),
                "dc": round(n.point.dc, 10),
                "dct": round(n.point.dct, 10),
                "crisp": round(n.crisp, 10),
                "state": n.state_label,
                "state_index": n.state.index,
                "node_condition": str(n.condition),
            }
            for n in rep.nodes
        ],
    }


def render_json(reports: Iterable[SubsystemReport]) -> str:
    return json.dumps([report_to_dict(r) for r in reports], indent=2, ensure_ascii=False) + "\n"


TABLE_HEADERS = (
    "EQUIPMENT",
    "TEST/NODE",
    "ENGINEERING VARIABLES READ",
    "DEGREES (mu, lambda; Dc, Dct)",
    "CRISP AND LOGICAL STATE",
    "OPERATION CONDITION",
)


def render_table(reports: Iterable[SubsystemReport], header: bool = True) -> str:
    rows = []
    for rep in reports:
        if not rep.nodes:
            rows.append((rep.equipment, f"({rep.cycle},-)", "stale: " + ", ".join(rep.stale), "", "", STALE))
            continue
        for i, n in enumerate(rep.nodes):
            rows.append(
                (
                    rep.equipment if i == 0 else "",
                    f"({rep.cycle},{n.node_id})",
                    format_readings(n),
                    f"({_num(n.evidence.mu)}, {_num(n.evidence.lam)}; {_num(n.point.dc)}, {_num(n.point.dct)})",
                    f"({_num(n.crisp, 6)}; {n.state_label})",
                    str(rep.condition) if i == 0 else "",
                )
            )
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(TABLE_HEADERS)]
    line = "  ".join("-" * w for w in widths)
    out = ["  ".join(h.ljust(w) for h, w in zip(TABLE_HEADERS, widths)).rstrip(), line] if header else []
    out += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(out) + "\n"


RENDERERS = {"table": render_table, "csv": render_csv, "json": render_json}


def render(reports: Sequence[SubsystemReport], fmt: str) -> str:
    try:
        return RENDERERS[fmt](reports)
    except KeyError:
        raise ValueError(f"unknown format {fmt!r}") from None


def render_sweep_csv(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in records:
        writer.writerow((_num(r.dc, 4), _num(r.dct, 4), _num(r.crisp, 6), r.state_index))
    return buf.getvalue()


# --- figures ---------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_sweep_figure(records: Sequence[SweepRecord], path: str | Path) -> Path:
    """Crisp values and state numbers over the (Dc, Dct) grid, side by side."""
    plt = _pyplot()
    dcs = [r.dc for r in records]
    dcts = [r.dct for r in records]
    fig, (ax_c, ax_s) = plt.subplots(1, 2, figsize=(12, 5.5), constrained_layout=True)

    sc = ax_c.scatter(dcs, dcts, c=[r.crisp for r in records], cmap="coolwarm", vmin=-1, vmax=1, s=36)
    fig.colorbar(sc, ax=ax_c, label="crisp")
    ax_c.set_title("Crisp value")

    ax_s.scatter(dcs, dcts, c=[r.state_index for r in records], cmap="tab20", vmin=1, vmax=12, s=36)
    dense = len(records) > 300
    for r in records:
        if not dense or (round(r.dc * 10) == r.dc * 10 and round(r.dct * 10) == r.dct * 10):
            ax_s.annotate(str(r.state_index), (r.dc, r.dct), fontsize=6, ha="center", va="center")
    ax_s.set_title("Logical state (1 = ⊥ ... 12 = Q⊥-t)")

    for ax in (ax_c, ax_s):
        _lattice_outline(ax)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def render_report_figure(reports: Sequence[SubsystemReport], path: str | Path) -> Path:
    """Every node result placed in the lattice, labelled equipment/cycle/node."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6.5, 6.5), constrained_layout=True)
    _lattice_outline(ax)
    markers = {"A": "o", "B": "s", "C": "^"}
    for rep in reports:
        for n in rep.nodes:
            ax.scatter(n.point.dc, n.point.dct, marker=markers.get(rep.subsystem, "o"), s=40)
            ax.annotate(
                f"{rep.equipment} ({rep.cycle},{n.node_id}) {n.state.label}",
                (n.point.dc, n.point.dct),
                fontsize=6,
                xytext=(4, 4),
                textcoords="offset points",
            )
    ax.set_title("Node results in the lattice")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return Path(path)


def _lattice_outline(ax) -> None:
    ax.plot([1, 0, -1, 0, 1], [0, 1, 0, -1, 0], color="black", lw=0.8)
    for v in (-0.5, 0.5):
        ax.axvline(v, color="grey", lw=0.5, ls="--")
        ax.axhline(v, color="grey", lw=0.5, ls="--")
    ax.plot([-1, 1], [-1, 1], color="grey", lw=0.4, ls=":")
    ax.plot([-1, 1], [1, -1], color="grey", lw=0.4, ls=":")
    for state, (x, y) in {
        LogicalState.T: (1, 0),
        LogicalState.F: (-1, 0),
        LogicalState.TOP: (0, 1),
        LogicalState.BOTTOM: (0, -1),
    }.items():
        ax.annotate(state.label, (x, y), xytext=(x * 1.06, y * 1.06), ha="center", va="center")
    ax.set_xlim(-1.15, 1.15)
    ax.set_ylim(-1.15, 1.15)
    ax.set_aspect("equal")
    ax.set_xlabel("Dc (certainty)")
    ax.set_ylabel("Dct (contradiction)")
