from __future__ import annotations

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from parafuzzy.engine import (
    GeometryError,
    ParaFuzzyEngine,
    StepSpec,
    geometry_from_mapping,
    geometry_to_mapping,
    load_geometry,
    project_to_lattice,
    select_state,
)
from parafuzzy.pal2v import CertaintyPoint, EvidencePair, LogicalState, classify_point, compute_degrees, para_analyser

S = LogicalState
axis = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


@pytest.fixture(scope="module")
def sweep(engine):
    return {(r.dc, r.dct): r for r in engine.lattice_sweep(StepSpec.uniform(0.05))}


# --- fuzzification ---------------------------------------------------------


def test_axes_cover_their_universe(engine):
    for i in range(-100, 101):
        x = i / 100
        assert max(engine.fuzzify_certainty(x).values()) > 0
        assert max(engine.fuzzify_contradiction(x).values()) > 0


def test_axis_labels(engine):
    assert list(engine.fuzzify_certainty(0.0)) == ["F", "QF", "RCF", "RCt", "Qt", "t"]
    assert list(engine.fuzzify_contradiction(0.0)) == ["⊥", "Q⊥", "Ri⊥", "Ri⊤", "Q⊤", "⊤"]


def test_axis_values_outside_range_rejected(engine):
    with pytest.raises(ValueError, match="outside"):
        engine.fuzzify_certainty(1.5)
    with pytest.raises(ValueError, match="outside"):
        engine.evaluate(0.0, -1.2)


# --- evaluate ----------------------------------------------------------------


@pytest.mark.parametrize(
    "dc, dct, label, crisp",
    [
        (1, 0, "t", 0.5),
        (-1, 0, "F", -0.5),
        (0.84, 0, "t", 0.5),
        (-0.84, 0, "F", -0.5),
        (0, 1, "⊤", 0.0),
        (0, -1, "⊥", 0.95),
        (-1e-12, -1, "⊥", -0.95),
    ],
)
def test_known_points(engine, dc, dct, label, crisp):
    r = engine.evaluate(dc, dct)
    assert r.state.label == label
    assert r.crisp == pytest.approx(crisp, abs=1e-6)


def test_centre_golden_value(engine):
    # Both halves and both sides tie at the centre; the tie rule reads it
    # like the analyser (F side, ⊥ half, certainty first). Family 1 applies
    # because dc >= 0.
    r = engine.evaluate(0.0, 0.0)
    assert r.state is S.QF_BOTTOM
    assert r.crisp == pytest.approx(0.5, abs=1e-9)


def test_memberships_stay_in_unit_interval(engine):
    r = engine.evaluate(0.2, -0.1)
    assert all(0.0 <= v <= 1.0 for v in r.state_memberships.values())
    assert r.point == CertaintyPoint(0.2, -0.1)


@given(axis, axis)
def test_evaluate_is_pure_and_bounded(dc, dct):
    from parafuzzy.engine import default_engine

    e = default_engine()
    a, b = e.evaluate(dc, dct), e.evaluate(dc, dct)
    assert a == b
    assert -1.0 <= a.crisp <= 1.0
    best = max(a.state_memberships.values())
    assert a.state_memberships[a.state] == pytest.approx(best, abs=1e-12)


def test_infeasible_points_are_projected(engine):
    assert project_to_lattice(1.0, 1.0) == (0.5, 0.5)
    assert project_to_lattice(0.2, 0.3) == (0.2, 0.3)
    assert engine.evaluate(1.0, 1.0).crisp == engine.evaluate(0.5, 0.5).crisp


# --- tie-break ---------------------------------------------------------------


def test_index_tie_break_takes_lowest_index():
    strengths = {s: 0.0 for s in S}
    strengths[S.QT_TOP] = strengths[S.QT_BOTTOM] = 0.7
    assert select_state(strengths, "index") is S.QT_TOP
    assert select_state(strengths) is S.QT_BOTTOM


def test_lattice_tie_break_prefers_extremes_then_bottom_half():
    strengths = {s: 0.0 for s in S}
    strengths[S.T] = strengths[S.QT_BOTTOM] = 0.5
    assert select_state(strengths) is S.T
    strengths = {s: 0.0 for s in S}
    strengths[S.TOP] = strengths[S.BOTTOM] = strengths[S.F] = 0.5
    assert select_state(strengths) is S.BOTTOM
    strengths = {s: 0.0 for s in S}
    strengths[S.QBOTTOM_F] = strengths[S.QF_BOTTOM] = 1.0
    assert select_state(strengths) is S.QF_BOTTOM


def test_float_noise_does_not_break_ties():
    strengths = {s: 0.0 for s in S}
    strengths[S.QT_TOP] = 0.3
    strengths[S.QT_BOTTOM] = 0.3 - 1e-15
    assert select_state(strengths) is S.QT_BOTTOM


def test_index_tie_break_breaks_mirror_symmetry_on_the_axis():
    e = ParaFuzzyEngine.from_file(_shipped(), tie_break="index")
    assert e.evaluate(-0.3, 0.0).state is S.QF_BOTTOM
    assert e.evaluate(0.3, 0.0).state is S.QT_TOP
    with pytest.raises(ValueError):
        ParaFuzzyEngine.from_file(_shipped(), tie_break="random")


def _shipped():
    from importlib import resources

    return resources.files("parafuzzy").joinpath("data", "parafuzzy.ini")


# --- sweep properties --------------------------------------------------------


def test_uniform_grid_size():
    g = StepSpec.uniform(0.05)
    assert len(g.dc_values) == 41 and g.size == 41 * 41
    assert g.dc_values[0] == -1.0 and g.dc_values[-1] == 1.0


def test_paper_grid_has_points_beside_the_centre_line():
    g = StepSpec.paper()
    assert -0.05 in g.dc_values and 0.05 in g.dc_values
    assert len(g.dct_values) == 21 and g.size == 23 * 21


@pytest.mark.parametrize("step", [0, -0.1, 0.3, 3])
def test_bad_steps(step):
    with pytest.raises(ValueError):
        StepSpec.uniform(step)


def test_sweep_corner_states(sweep):
    assert sweep[(1.0, 0.0)].state_index == 10
    assert sweep[(-1.0, 0.0)].state_index == 4
    assert sweep[(0.0, 1.0)].state_index == 7
    assert sweep[(0.0, -1.0)].state_index == 1


def test_sweep_order_and_bounds(engine):
    records = engine.lattice_sweep(StepSpec.uniform(0.5))
    assert [(r.dc, r.dct) for r in records[:3]] == [(-1.0, -1.0), (-0.5, -1.0), (0.0, -1.0)]
    assert all(-1.0 <= r.crisp <= 1.0 for r in records)


def test_threshold_states_on_reachable_points(sweep):
    for (dc, dct), r in sweep.items():
        if abs(dc) + abs(dct) > 1 + 1e-9:
            continue
        state = S.from_index(r.state_index)
        if dc >= 0.75:
            assert state is S.T
        if dc <= -0.75:
            assert state is S.F
        if dct >= 0.75:
            assert state is S.TOP
        if dct <= -0.75:
            assert state is S.BOTTOM


def test_near_state_crisp_ranges(sweep):
    for r in sweep.values():
        label = S.from_index(r.state_index).label
        if label in ("Qt-⊥", "Q⊥-t"):
            assert 0.50 <= r.crisp <= 0.80, r
        if label in ("Qt-⊤", "Q⊤-t"):
            assert 0.20 <= r.crisp <= 0.50, r


def test_mirror_symmetry_off_the_centre_line(sweep):
    for (dc, dct), r in sweep.items():
        if dc == 0.0:
            continue
        assert S.from_index(sweep[(-dc, dct)].state_index) is S.from_index(r.state_index).mirror


def test_crisp_non_decreasing_along_certainty_axis(sweep):
    row = [sweep[(dc, 0.0)].crisp for dc in StepSpec.uniform(0.05).dc_values]
    assert all(b >= a for a, b in zip(row, row[1:]))


def test_agrees_with_analyser_on_evidence_grid(engine):
    agree = 0
    for i in range(21):
        for j in range(21):
            p = compute_degrees(EvidencePair(i / 20, j / 20))
            agree += engine.evaluate(p.dc, p.dct).state is classify_point(p).state
    assert agree / 441 >= 0.95
    assert agree == 441


def test_index_rule_agreement_still_above_floor():
    e = ParaFuzzyEngine.from_file(_shipped(), tie_break="index")
    agree = sum(
        e.evaluate(*_dc_dct(i, j)).state is para_analyser(EvidencePair(i / 20, j / 20)).state
        for i in range(21)
        for j in range(21)
    )
    assert agree / 441 >= 0.95


def _dc_dct(i, j):
    p = compute_degrees(EvidencePair(i / 20, j / 20))
    return p.dc, p.dct


# --- geometry files ----------------------------------------------------------


def test_geometry_round_trips_through_json(engine, tmp_path):
    path = tmp_path / "geometry.json"
    path.write_text(json.dumps(geometry_to_mapping(engine)), encoding="utf-8")
    other = ParaFuzzyEngine.from_file(path)
    for dc, dct in [(0.3, -0.2), (-0.7, 0.1), (0.0, 0.0)]:
        assert other.evaluate(dc, dct) == engine.evaluate(dc, dct)


def test_ascii_labels_accepted(engine):
    data = geometry_to_mapping(engine)
    data["contradiction"] = {k.replace("⊤", "TOP").replace("⊥", "BOT"): v for k, v in data["contradiction"].items()}
    data["table"] = {k.replace("⊤", "TOP").replace("⊥", "BOT"): v for k, v in data["table"].items()}
    e = ParaFuzzyEngine(*geometry_from_mapping(data))
    assert e.evaluate(0.2, 0.3).state == engine.evaluate(0.2, 0.3).state


def test_geometry_problems_are_listed(engine):
    data = geometry_to_mapping(engine)
    del data["table"]["t,⊥"]
    data["certainty"]["QF"] = "-1.5,0;0,1;0,0"
    with pytest.raises(GeometryError) as err:
        ParaFuzzyEngine(*geometry_from_mapping(data))
    assert "missing cell (t, ⊥)" in str(err.value)
    assert "certainty.QF: support" in str(err.value)


def test_missing_section(engine):
    data = geometry_to_mapping(engine)
    del data["output2"]
    with pytest.raises(GeometryError, match="output2"):
        geometry_from_mapping(data)


def test_impossible_cells_are_skipped(engine):
    data = geometry_to_mapping(engine)
    assert data["table"]["Qt,Q⊥"] == "*"
    assert ("Qt", "Q⊥") not in {(c, k) for c, k, _ in engine.table.cells()}


def test_load_shipped_ini():
    axes, table, outputs = load_geometry(_shipped())
    assert len(table.entries) == 36
    assert set(outputs.output_set_1) == set(outputs.output_set_2) == set(S)
