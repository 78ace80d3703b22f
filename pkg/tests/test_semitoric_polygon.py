from fractions import Fraction as F

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import positive_rationals
from semitoric import hirzebruch_pipeline as hp
from semitoric.acceptance import chop_round_trip, cut_flip_pair
from semitoric.rational_geometry import point, sl2z_length
from semitoric.semitoric_polygon import (
    ChopInfeasibleError,
    CornerClass,
    GroupElement,
    InadmissibleError,
    MarkedWeightedPolygon,
    UnchopInfeasibleError,
    apply_group,
    canonical_form,
    classify_corner,
    corner_chop,
    corner_unchop,
    flip_to,
    group_point_map,
    orbit_equal,
    remove_cut,
    slope_change_audit,
    validate,
)

TRI = MarkedWeightedPolygon.build([(0, 0), (0, 1), (1, 0)])


def test_delzant_square_corner():
    sq = MarkedWeightedPolygon.build([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert classify_corner(sq, (0, 0)) is CornerClass.DELZANT


def test_fake_corner_on_cut():
    left, _ = cut_flip_pair()
    assert classify_corner(left, (2, 2)) is CornerClass.FAKE


def test_hidden_corner_with_flip_oracle():
    mp = MarkedWeightedPolygon.build([(0, 0), (3, 0), (1, 1)], [((1, F(1, 2)), 1)])
    assert classify_corner(mp, (1, 1)) is CornerClass.HIDDEN
    flipped = flip_to(mp, (-1,))
    assert classify_corner(flipped, (1, 1)) is CornerClass.DELZANT
    assert not flipped.on_cuts(point(1, 1))


def test_classify_corner_rejects_non_vertex():
    with pytest.raises(ValueError):
        classify_corner(TRI, (F(1, 2), 0))


def test_validate_examples():
    for n in range(4):
        assert validate(MarkedWeightedPolygon(hp.delta_n0(n, 2, 1))).valid
    left, right = cut_flip_pair()
    rep = validate(left)
    assert rep.valid and rep.fake_or_hidden() == [point(2, 2)]
    assert validate(right).valid
    moved = MarkedWeightedPolygon(left.polygon, (type(left.marks[0])(point(2, 0), 1),))
    bad = validate(moved)
    assert not bad.valid and any("not interior" in v for v in bad.violations)


def test_cut_flip_worked_example():
    left, right = cut_flip_pair()
    g = GroupElement(k=-1, shift=F(2), flips=(-1,))
    assert apply_group(g, left) == right
    assert apply_group(GroupElement(flips=(1,)), left) == left
    back = apply_group(GroupElement(k=1, shift=F(-2), flips=(1,)), right)
    back = apply_group(GroupElement(flips=(-1,)), back)
    assert orbit_equal(back, left)


def test_orbit_equal_examples():
    left, right = cut_flip_pair()
    assert orbit_equal(left, right)
    shifted = apply_group(GroupElement(shift=F(7)), left)
    assert orbit_equal(left, shifted)
    d20 = MarkedWeightedPolygon(hp.delta_n0(2, 1, 1))
    d21 = MarkedWeightedPolygon(hp.delta_n1(2, 1, 1))
    assert not orbit_equal(d20, d21)
    assert not orbit_equal(left, MarkedWeightedPolygon(left.polygon))


def test_chop_examples():
    out = corner_chop(TRI, (0, 1), F(1, 2))
    assert out.polygon.vertices == ((0, 0), (1, 0), (F(1, 2), F(1, 2)), (0, F(1, 2)))
    with pytest.raises(ChopInfeasibleError):
        corner_chop(TRI, (0, 1), 1)


def test_chop_on_marked_polygon_keeps_mark():
    tri = hp.standard_triple(1, 2, 1)
    mp = tri.transition
    q = hp.upper_right_corner(mp.polygon)
    out = corner_chop(mp, q, F(1, 2))
    assert len(out.polygon) == len(mp.polygon) + 1
    assert out.marks == mp.marks
    assert validate(out).valid


def test_unchop_examples():
    chopped = corner_chop(TRI, (0, 1), F(1, 2))
    edge = (point(F(1, 2), F(1, 2)), point(0, F(1, 2)))
    assert corner_unchop(chopped, edge, F(1, 2)) == TRI
    with pytest.raises(UnchopInfeasibleError):
        corner_unchop(chopped, edge, F(1, 3))


def test_remove_cut_examples():
    tri = MarkedWeightedPolygon.build([(-2, 0), (0, 1), (2, 0)], [((0, F(1, 2)), 1)])
    assert remove_cut(tri, 0, 1) == MarkedWeightedPolygon(tri.polygon)
    two = MarkedWeightedPolygon.build([(0, 0), (6, 0), (6, 6), (0, 6)], [((2, 3), 1), ((4, 3), -1)])
    one = remove_cut(two, 1, -1)
    assert one.s == 1 and one.marks[0] == two.marks[0]
    with pytest.raises(IndexError):
        remove_cut(two, 2, 1)
    for n in range(4):
        t = hp.standard_triple(n, 3, 1)
        assert orbit_equal(remove_cut(t.transition, 0, 1), MarkedWeightedPolygon(hp.delta_n0(n, 3, 1)))
        assert orbit_equal(remove_cut(t.transition, 0, -1), MarkedWeightedPolygon(hp.delta_n1(n, 3, 1)))


def test_remove_cut_halves_align():
    t = hp.standard_triple(2, 3, 1)
    up, down = remove_cut(t.transition, 0, 1), remove_cut(t.transition, 0, -1)
    x0 = t.transition.marks[0].c[0]
    for k in range(0, 21):
        x = F(k, 4)
        fu, fd = up.polygon.fiber(x), down.polygon.fiber(x)
        assert fu[1] - fu[0] == fd[1] - fd[0]
        if x <= x0:
            assert fu == fd


def test_slope_audit_examples():
    left, _ = cut_flip_pair()
    entry = [e for e in slope_change_audit(left) if e.vertex == point(2, 2)][0]
    assert (entry.left_slope, entry.right_slope, entry.expected) == (1, 0, -1) and entry.passed
    poly = MarkedWeightedPolygon.build([(0, 0), (3, 0), (2, 1), (0, 1)])
    entry = slope_change_audit(poly, weights={(2, 1): (1, 1)})[0]
    assert entry.right_slope - entry.left_slope == -1 and entry.passed
    t = hp.standard_triple(1, 2, 1)
    entry = [e for e in slope_change_audit(t.transition) if e.vertex == point(1, 1)][0]
    assert entry.passed and entry.expected == -1


# ---------------------------------------------------------------- properties


@st.composite
def marked_polygons(draw):
    n = draw(st.integers(0, 3))
    alpha, beta = draw(positive_rationals(12, 4)), draw(positive_rationals(12, 4))
    lo, hi = hp.mark_interval(n, alpha, beta)
    tri = hp.standard_triple(n, alpha, beta, lo + (hi - lo) * draw(st.integers(1, 7)) / 8)
    mp = tri.regime(draw(st.sampled_from(tri.live_regimes)))
    return mp


group_elements = st.builds(lambda k, s, f: (k, s, f), st.integers(-3, 3),
                           st.builds(F, st.integers(-12, 12), st.integers(1, 4)), st.sampled_from([1, -1]))


def _apply(mp, ge):
    k, s, f = ge
    g = GroupElement(k=k, shift=s, flips=(f,) * mp.s)
    return g, apply_group(g, mp)


@given(marked_polygons(), group_elements)
def test_group_action_preserves_validity_and_corners(mp, ge):
    try:
        g, img = _apply(mp, ge)
    except InadmissibleError:
        assume(False)
    assert validate(img).valid
    f = group_point_map(g, mp)
    for q in mp.polygon.vertices:
        if f(q) in img.polygon.vertices and not mp.on_cuts(q) and not img.on_cuts(f(q)):
            assert classify_corner(img, f(q)) is classify_corner(mp, q)


@given(marked_polygons(), group_elements)
def test_fiber_lengths_invariant(mp, ge):
    try:
        _, img = _apply(mp, ge)
    except InadmissibleError:
        assume(False)
    p = mp.polygon
    for k in range(9):
        x = p.xmin + (p.xmax - p.xmin) * k / 8
        a, b = p.fiber(x), img.polygon.fiber(x)
        assert a[1] - a[0] == b[1] - b[0]


@given(marked_polygons(), group_elements, group_elements)
def test_orbit_equal_is_an_equivalence(mp, g1, g2):
    try:
        _, a = _apply(mp, g1)
        _, b = _apply(a, g2)
    except InadmissibleError:
        assume(False)
    assert orbit_equal(mp, mp)
    assert orbit_equal(mp, a) and orbit_equal(a, mp)
    assert orbit_equal(a, b) and orbit_equal(mp, b)
    assert canonical_form(mp) == canonical_form(b)


@given(marked_polygons(), st.integers(0, 10), st.integers(1, 15))
def test_chop_unchop_round_trip(mp, vi, frac):
    q = mp.polygon.vertices[vi % len(mp.polygon)]
    prev, nxt = mp.polygon.neighbors(q)
    lam = min(sl2z_length(q, prev), sl2z_length(q, nxt)) * F(frac, 16)
    r = chop_round_trip(mp, q, lam)
    assume(r is not None)
    assert r
