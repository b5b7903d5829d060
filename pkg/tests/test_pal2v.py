from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracle import grid, region_of
from parafuzzy.pal2v import (
    CertaintyPoint,
    ControlValues,
    EvidencePair,
    LogicalState,
    classify_point,
    compute_degrees,
    negate,
    para_analyser,
)

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


# --- types -----------------------------------------------------------------


def test_state_numbering_is_fixed():
    labels = [LogicalState.from_index(i).label for i in range(1, 13)]
    assert labels == ["⊥", "Q⊥-F", "QF-⊥", "F", "QF-⊤", "Q⊤-F", "⊤", "Q⊤-t", "Qt-⊤", "t", "Qt-⊥", "Q⊥-t"]


def test_state_lookup_accepts_ascii_spellings():
    assert LogicalState.from_label("QF-BOT") is LogicalState.QF_BOTTOM
    assert LogicalState.from_label("TOP") is LogicalState.TOP
    with pytest.raises(ValueError):
        LogicalState.from_label("QX-⊥")
    with pytest.raises(ValueError):
        LogicalState.from_index(13)


def test_mirror_is_an_involution_that_swaps_sides():
    for s in LogicalState:
        assert s.mirror.mirror is s
    assert LogicalState.T.mirror is LogicalState.F
    assert LogicalState.QT_BOTTOM.mirror is LogicalState.QF_BOTTOM
    assert LogicalState.TOP.mirror is LogicalState.TOP


@pytest.mark.parametrize("mu, lam", [(-0.01, 0.5), (0.5, 1.01), (float("nan"), 0.0)])
def test_evidence_pair_rejects_out_of_range(mu, lam):
    with pytest.raises(ValueError):
        EvidencePair(mu, lam)


def test_control_values_need_centre_between_limits():
    with pytest.raises(ValueError):
        ControlValues(vcve=-0.1)
    with pytest.raises(ValueError):
        ControlValues(vcpa=0.2)


# --- compute_degrees -------------------------------------------------------


@pytest.mark.parametrize(
    "mu, lam, dc, dct",
    [
        (0.08, 0.92, -0.84, 0.0),
        (0.5331, 0.4669, 0.0662, 0.0),
        (1, 0, 1, 0),
        (0.5, 0.5, 0, 0),
        (0, 1, -1, 0),
        (1, 1, 0, 1),
        (0, 0, 0, -1),
    ],
)
def test_compute_degrees_examples(mu, lam, dc, dct):
    p = compute_degrees(EvidencePair(mu, lam))
    assert p.dc == pytest.approx(dc, abs=1e-12)
    assert p.dct == pytest.approx(dct, abs=1e-12)


@given(unit, unit)
def test_degrees_round_trip(mu, lam):
    p = compute_degrees(EvidencePair(mu, lam))
    assert -1.0 <= p.dc <= 1.0 and -1.0 <= p.dct <= 1.0
    back = p.to_evidence()
    assert back.mu == pytest.approx(mu, abs=1e-12)
    assert back.lam == pytest.approx(lam, abs=1e-12)


# --- negate ----------------------------------------------------------------


def test_negate_examples():
    assert negate(EvidencePair(1, 0)) == EvidencePair(0, 1)
    assert negate(EvidencePair(1, 1)) == EvidencePair(1, 1)
    assert negate(EvidencePair(0.08, 0.92)) == EvidencePair(0.92, 0.08)


@given(unit, unit)
def test_negation_flips_certainty_only(mu, lam):
    e = EvidencePair(mu, lam)
    assert negate(negate(e)) == e
    a = para_analyser(e)
    b = para_analyser(negate(e))
    assert b.point.dc == pytest.approx(-a.point.dc, abs=1e-12)
    assert b.point.dct == pytest.approx(a.point.dct, abs=1e-12)
    if a.state in (LogicalState.T, LogicalState.F):
        assert b.state is a.state.mirror


# --- para_analyser ---------------------------------------------------------


def test_analyser_table_examples():
    r = para_analyser(EvidencePair(0.92, 0.08))
    assert r.state is LogicalState.T
    assert r.point.dc == pytest.approx(0.84)
    assert para_analyser(EvidencePair(1, 1)).state is LogicalState.TOP
    assert para_analyser(EvidencePair(0, 0)).state is LogicalState.BOTTOM


def test_near_false_boundary_row():
    # dc = -0.1217, dct ~ 0: certainty-dominant near-false, read from both halves.
    r = para_analyser(EvidencePair(0.4392, 0.5608))
    assert r.state is LogicalState.QF_BOTTOM
    assert r.boundary
    assert r.label == "QF-⊥/⊤"


def test_signed_comparison_cannot_give_the_printed_state():
    # Under the literal dc >= dct rule a negative dc never wins the comparison,
    # so the point lands in a contradiction-dominant wedge, not the QF family.
    r = para_analyser(EvidencePair(0.4392, 0.5608), tie_break="signed")
    assert r.state is LogicalState.QTOP_F
    with pytest.raises(ValueError):
        para_analyser(EvidencePair(0.5, 0.5), tie_break="sideways")


def test_extreme_checks_last_write_wins_on_overlap():
    # With wide control values t and ⊥ overlap; ⊥ is checked last.
    cv = ControlValues(vcve=0.1, vcfa=-0.1, vcic=0.1, vcpa=-0.1)
    assert classify_point(CertaintyPoint(0.3, -0.3), cv).state is LogicalState.BOTTOM
    assert classify_point(CertaintyPoint(0.3, 0.3), cv).state is LogicalState.TOP
    assert classify_point(CertaintyPoint(0.3, 0.0), cv).state is LogicalState.T


def test_thresholds_are_inclusive():
    assert classify_point(CertaintyPoint(0.5, 0.0)).state is LogicalState.T
    assert classify_point(CertaintyPoint(-0.5, 0.0)).state is LogicalState.F
    assert classify_point(CertaintyPoint(0.0, 0.5)).state is LogicalState.TOP
    assert classify_point(CertaintyPoint(0.0, -0.5)).state is LogicalState.BOTTOM


@pytest.mark.parametrize(
    "dc, dct, label",
    [
        (0.3, 0.1, "Qt-⊤"),
        (0.1, 0.3, "Q⊤-t"),
        (0.3, -0.1, "Qt-⊥"),
        (0.1, -0.3, "Q⊥-t"),
        (-0.3, 0.1, "QF-⊤"),
        (-0.1, 0.3, "Q⊤-F"),
        (-0.3, -0.1, "QF-⊥"),
        (-0.1, -0.3, "Q⊥-F"),
    ],
)
def test_each_near_state_wedge(dc, dct, label):
    assert classify_point(CertaintyPoint(dc, dct)).label == label


def test_analyser_matches_region_oracle_on_grid():
    misses = []
    for mu, lam in grid(20):
        got = para_analyser(EvidencePair(float(mu), float(lam))).state.label
        want = region_of(mu, lam)
        if got != want:
            misses.append((mu, lam, got, want))
    assert misses == []


@given(unit, unit)
def test_analyser_is_total_and_agrees_with_oracle_off_boundaries(mu, lam):
    r = para_analyser(EvidencePair(mu, lam))
    assert isinstance(r.state, LogicalState)
    # Float and exact arithmetic can straddle a boundary; only compare away from them.
    dc, dct = mu - lam, mu + lam - 1
    edges = (abs(dc), abs(dct), abs(abs(dc) - 0.5), abs(abs(dct) - 0.5), abs(abs(dc) - abs(dct)))
    if min(edges) > 1e-6:
        assert r.state.label == region_of(Fraction(mu), Fraction(lam))
