from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from parafuzzy.fuzzy import (
    DegenerateSetError,
    FuzzySet,
    PiecewiseLinearMembership,
    RuleActivation,
    area,
    defuzzify_centroid,
    mamdani_infer,
    membership_at,
    tconorm_max,
    tnorm_min,
)

PROC_F1 = PiecewiseLinearMembership.parse("(0,0;0,1;15,1;50;0)".strip("()"), "proc.f1")
UNIT = (-1.0, 1.0)


def tri(a: float, b: float, c: float, name: str = "") -> PiecewiseLinearMembership:
    return PiecewiseLinearMembership(((a, 0.0), (b, 1.0), (c, 0.0)), name)


def act(f: PiecewiseLinearMembership, s: float, universe=UNIT) -> RuleActivation:
    return RuleActivation(FuzzySet(f, universe), s)


# --- membership ------------------------------------------------------------


@pytest.mark.parametrize("x, y", [(1, 1.0), (0, 1.0), (15, 1.0), (32.5, 0.5), (50, 0.0), (60, 0.0), (-1, 0.0)])
def test_scatex_proc_function_1(x, y):
    assert membership_at(PROC_F1, x) == pytest.approx(y)


def test_printed_last_pair_with_semicolon_parses():
    assert PROC_F1.vertices == ((0, 0), (0, 1), (15, 1), (50, 0))
    assert PROC_F1.format() == "0,0;0,1;15,1;50,0"


def test_vertical_edge_takes_largest_value():
    f = PiecewiseLinearMembership(((0, 0), (0, 1), (1, 0)))
    assert f(0) == 1.0
    assert f.left_limit(0) == 0.0
    assert f.right_limit(0) == 1.0


@pytest.mark.parametrize(
    "verts, message",
    [
        (((0, 0), (2, 1), (1, 0)), "decreases"),
        (((0, 0), (1, 1.5)), "outside"),
        (((0, 0),), "at least 2"),
    ],
)
def test_invalid_vertices_are_named(verts, message):
    with pytest.raises(ValueError, match=message):
        PiecewiseLinearMembership(verts, "bad")


def test_odd_coordinate_count_rejected():
    with pytest.raises(ValueError, match="odd"):
        PiecewiseLinearMembership.parse("0,0;1", "f")


def test_universe_must_contain_support():
    with pytest.raises(ValueError):
        FuzzySet(tri(-2, 0, 1), UNIT)


def test_activation_strength_range():
    with pytest.raises(ValueError):
        act(tri(-1, 0, 1), 1.5)


# --- norms -----------------------------------------------------------------


def test_goedel_norms():
    assert tnorm_min(0.3, 0.7) == 0.3 and tconorm_max(0.3, 0.7) == 0.7
    assert tnorm_min(1, 0.42) == 0.42 and tconorm_max(1, 0.42) == 1
    assert tnorm_min(0, 0) == 0 and tconorm_max(0, 0) == 0


# --- inference -------------------------------------------------------------


def test_full_strength_single_rule_is_identity():
    t = tri(-0.5, 0.0, 0.5)
    out = mamdani_infer([act(t, 1.0)])
    for i in range(-1000, 1001):
        x = i / 1000
        assert out.membership(x) == pytest.approx(t(x), abs=1e-12)


def test_zero_strength_rule_vanishes():
    t, s = tri(-1, -0.5, 0), tri(0, 0.5, 1)
    out = mamdani_infer([act(t, 0.0), act(s, 0.6)])
    for i in range(-1000, 1001):
        x = i / 1000
        assert out.membership(x) == pytest.approx(min(s(x), 0.6), abs=1e-12)


def test_overlapping_triangles_match_dense_grid():
    t, s = tri(-0.6, 0.0, 0.6), tri(-0.2, 0.3, 0.8)
    out = mamdani_infer([act(t, 0.5), act(s, 0.5)])
    for i in range(-1000, 1001):
        x = i / 1000
        assert out.membership(x) == pytest.approx(max(min(t(x), 0.5), min(s(x), 0.5)), abs=1e-12)


def test_no_active_rules():
    with pytest.raises(ValueError, match="no active rules"):
        mamdani_infer([])


# --- defuzzification -------------------------------------------------------


def test_symmetric_triangle_centroid_is_centre():
    assert defuzzify_centroid(tri(-1, 0, 1)) == pytest.approx(0.0, abs=1e-12)


def test_right_triangle_centroid_is_one_sixth():
    f = PiecewiseLinearMembership(((0, 0), (0, 1), (0.5, 0)))
    assert defuzzify_centroid(f) == pytest.approx(1 / 6, abs=1e-12)


@pytest.mark.parametrize("a, b, h", [(0.1, 0.4, 1.0), (-0.9, 0.3, 0.25)])
def test_rectangle_centroid(a, b, h):
    f = PiecewiseLinearMembership(((a, 0), (a, h), (b, h), (b, 0)))
    assert defuzzify_centroid(f) == pytest.approx((a + b) / 2, abs=1e-12)
    assert area(f) == pytest.approx((b - a) * h, abs=1e-12)


def test_zero_area_is_degenerate():
    with pytest.raises(DegenerateSetError, match="degenerate output set"):
        defuzzify_centroid(tri(-1, 0, 1).clip(0.0))


# --- properties ------------------------------------------------------------

coord = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)
strength = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def triangles(draw):
    xs = sorted(draw(st.lists(coord, min_size=3, max_size=3)))
    if xs[2] - xs[0] < 1e-3:
        xs = [xs[0], xs[0] + 5e-4, xs[0] + 1e-3] if xs[0] < 0.99 else [0.997, 0.998, 0.999]
    return tri(*xs)


@given(st.lists(st.tuples(triangles(), strength), min_size=1, max_size=5), st.lists(coord, max_size=20))
def test_aggregate_bounded_by_strongest_rule(rules, probes):
    acts = [act(f, s) for f, s in rules]
    top = max(s for _, s in rules)
    out = mamdani_infer(acts)
    for x in probes:
        y = out.membership(x)
        assert 0.0 <= y <= top + 1e-12
        assert y == pytest.approx(max(min(f(x), s) for f, s in rules), abs=1e-9)


@given(st.lists(st.tuples(triangles(), strength), min_size=1, max_size=5))
def test_centroid_within_support_hull(rules):
    out = mamdani_infer([act(f, s) for f, s in rules])
    if area(out.membership) <= 1e-12:
        return
    lo, hi = out.membership.support_hull
    assert lo - 1e-9 <= defuzzify_centroid(out) <= hi + 1e-9


@given(triangles(), strength, st.lists(coord, max_size=20))
def test_single_rule_clip_then_aggregate(f, s, probes):
    out = mamdani_infer([act(f, s)])
    clipped = f.clip(s)
    for x in probes:
        assert out.membership(x) == pytest.approx(clipped(x), abs=1e-12)


@given(triangles(), st.lists(coord, min_size=2, max_size=2))
def test_membership_is_lipschitz_by_steepest_slope(f, pair):
    (x0, y0), (x1, y1), (x2, y2) = f.vertices
    slopes = [abs(y1 - y0) / (x1 - x0) if x1 > x0 else 0.0, abs(y2 - y1) / (x2 - x1) if x2 > x1 else 0.0]
    if min(x1 - x0, x2 - x1) <= 0:
        return  # vertical edge: discontinuous by design
    a, b = pair
    assert abs(f(a) - f(b)) <= max(slopes) * abs(a - b) + 1e-9
