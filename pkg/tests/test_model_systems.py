import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semitoric.model_systems import (
    FAMILIES,
    ChartDomainError,
    ChartPoint,
    CoupledAngular,
    ParameterWindowError,
    W1MovingAB,
    W1Switch,
    W2TransB,
    W2TransC,
    W2TwoParam,
    evaluate,
    gradient_residual,
    hirzebruch_lift,
    make_system,
    momentum_image,
    n_residual,
    poisson_bracket,
)

W1 = W1MovingAB(1.0, 2.0, 9 / 40)
W1S = W1Switch(1.0, 3.0, 3 / (8 * math.sqrt(6)))
W2 = W2TwoParam(1.0, 1.0, 9 / 20)


def test_coupled_north_north():
    sys = CoupledAngular(1.0, 2.0)
    for t in (0.0, 0.3, 1.0):
        assert evaluate(sys, (t,), ChartPoint("S2S2", (0, 0, 1, 0, 0, 1))) == pytest.approx((3.0, 1.0), abs=1e-15)


@pytest.mark.parametrize("t", [0.0, 0.2, 0.5, 0.9])
def test_w1_fixed_values(t):
    C = W1.fixed_points((t,)).by_label("C")
    assert (C.J, C.H) == pytest.approx((1.0, (1 - 2 * t) * 2.0), abs=1e-12)
    D = W1S.fixed_points((t,)).by_label("D")
    assert (D.J, D.H) == pytest.approx((4.0, t * 3.0), abs=1e-12)


def test_w1_switch_table():
    b = W1S.beta
    for t in np.linspace(0, 1, 11):
        inv = W1S.fixed_points((float(t),))
        h = {p.label: p.H for p in inv.points}
        assert h["A"] == pytest.approx(t * b, abs=1e-12)
        assert h["B"] == pytest.approx((1 - t) * b, abs=1e-12)
        assert h["C"] == pytest.approx((1 - t) * b, abs=1e-12)
        assert h["D"] == pytest.approx(t * b, abs=1e-12)
    assert abs(W1S.fixed_points((0.5,)).by_label("A").H - W1S.fixed_points((0.5,)).by_label("B").H) < 1e-12


def test_x3_roots_at_half():
    a, b = W1.alpha, W1.beta
    xm, xp = W1.x3_roots(0.5)
    r = math.sqrt(2 / 3 * (a + 2 * b - math.sqrt(a * a + a * b + b * b)))
    assert (xm, xp) == pytest.approx((-r, r), abs=1e-12)


@pytest.mark.parametrize("t", [0.05, 0.3, 0.6, 0.95])
def test_x3_roots_are_fixed_points(t):
    xm, xp = W1.x3_roots(t)
    lim = math.sqrt(2 * W1.beta)
    assert -lim < xm < 0 < xp < lim
    for lab in ("A_t", "B_t"):
        assert gradient_residual(W1, (t,), W1.fixed_points((t,)).by_label(lab).point) < 1e-10


def test_w2_fixed_levels():
    sys = W2TransB(1.0, 2.0, 0.2)
    inv = sys.fixed_points((0.3,))
    js = [inv.by_label(k).J for k in "ABCD"]
    assert js == pytest.approx([0.0, 2.0, 3.0, 5.0], abs=1e-12)


def test_w1_switch_collapse_inventory():
    inv = W1S.fixed_points((0.5,))
    assert len(inv.critical_sets) == 1 and inv.critical_sets[0].max_residual < 1e-10
    assert not W1S.fixed_points((0.4,)).critical_sets


def test_every_inventory_point_is_critical():
    rng = np.random.default_rng(1)
    for fid, cls in FAMILIES.items():
        sys = cls()
        for _ in range(3):
            par = tuple(float(v) for v in rng.uniform(0.05, 0.95, sys.arity))
            for p in sys.fixed_points(par).points:
                assert gradient_residual(sys, par, p.point) < 1e-10, (fid, par, p.label)


def test_lift_examples():
    A = hirzebruch_lift(2, 1.0, 1.0, "U14", (0, 0, 0, 0))
    assert A.representative == pytest.approx((math.sqrt(6), 0, 0, math.sqrt(2)))
    C = hirzebruch_lift(1, 1.0, 2.0, "U23", (0, 0, 0, 0))
    assert C.representative == pytest.approx((0, math.sqrt(2), 2, 0))
    with pytest.raises(ChartDomainError):
        hirzebruch_lift(1, 1.0, 1.0, "U14", (0, 0, 2.0, 0))


def test_parameter_windows():
    with pytest.raises(ParameterWindowError):
        W1MovingAB(1.0, 2.0, 0.3)
    with pytest.raises(ParameterWindowError):
        W1Switch(1.0, 3.0, 1.0)
    with pytest.raises(ParameterWindowError):
        W2TwoParam(1.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        make_system("Nope")
    with pytest.raises(ValueError):
        W1.check_params((1.5,))


def test_coupled_image_at_zero():
    img = momentum_image(CoupledAngular(1.0, 2.0), (0.0,))
    assert (img.J.min(), img.J.max()) == pytest.approx((-3.0, 3.0))
    assert (img.H.min(), img.H.max()) == pytest.approx((-1.0, 1.0))


def test_w1_image_at_zero_is_the_trapezoid():
    img = momentum_image(W1, (0.0,), resolution=16)
    a, b = W1.alpha, W1.beta
    # (J, H) -> (a + b - J, H) carries the image onto the standard trapezoid
    assert np.all(img.H >= -1e-12) and np.all(img.H <= b + 1e-12)
    assert np.all(img.J + img.H <= a + b + 1e-12) and np.all(img.J >= -1e-12)
    assert img.envelope_max.max() == pytest.approx(b)
    assert img.J.max() == pytest.approx(a + b)


def test_w2_array_of_images():
    grid = [0.0, 0.25, 0.5, 0.75, 1.0]
    imgs = [momentum_image(W2, (s1, s2), resolution=8) for s1 in grid for s2 in grid]
    assert len(imgs) == 25
    assert all(np.isfinite(i.H).all() and len(i.fixed) == 4 for i in imgs)
    csv = imgs[7].to_csv().splitlines()
    assert csv[0] == "t,s1,s2,J,H,stratum"


def test_images_are_deterministic():
    a = momentum_image(W1, (0.3,), resolution=8).to_csv()
    b = momentum_image(W1, (0.3,), resolution=8).to_csv()
    assert a == b


def test_two_param_slices():
    B, C = W2TransB(1.0, 1.0, 9 / 20), W2TransC(1.0, 1.0, 9 / 20)
    rng = np.random.default_rng(3)
    for _ in range(20):
        x = rng.uniform(-0.5, 0.5, 4)
        t = float(rng.uniform())
        for chart in W2.charts():
            p = ChartPoint(chart, tuple(x))
            assert evaluate(W2, (t, 1.0), p)[1] == pytest.approx(evaluate(B, (t,), p)[1], abs=1e-12)
            assert evaluate(W2, (0.0, 1 - t), p)[1] == pytest.approx(evaluate(C, (t,), p)[1], abs=1e-12)


# ---------------------------------------------------------------- properties


def _to_chart(rep, n, chart):
    """Chart coordinates of the class of rep: rotate so u_l and u_m are real positive."""
    l, m = int(chart[1]) - 1, int(chart[2]) - 1
    phi = -cmath.phase(rep[l])
    psi = -cmath.phase(rep[3]) if m == 3 else -cmath.phase(rep[2]) - n * phi
    w = [rep[0] * cmath.exp(1j * phi), rep[1] * cmath.exp(1j * phi),
         rep[2] * cmath.exp(1j * (n * phi + psi)), rep[3] * cmath.exp(1j * psi)]
    free = [i for i in range(4) if i not in (l, m)]
    return ChartPoint(chart, (w[free[0]].real, w[free[0]].imag, w[free[1]].real, w[free[1]].imag))


hirzebruch = st.sampled_from([W1, W1S, W2, W2TransB(1.0, 1.0, 9 / 20), FAMILIES["W1Hyperbolic"]()])
coords = st.tuples(*[st.floats(-0.6, 0.6) for _ in range(4)])


@given(hirzebruch, coords, st.sampled_from(["U13", "U14", "U23", "U24"]), st.floats(0, 1))
def test_chart_overlap_consistency(sys, x, chart, t):
    par = (t,) * sys.arity
    p = sys.lift(chart, x)
    assert n_residual(sys.n, sys.alpha, sys.beta, p.representative) < 1e-12
    val = evaluate(sys, par, p)
    for other in sys.charts():
        l, m = int(other[1]) - 1, int(other[2]) - 1
        if abs(p.representative[l]) < 1e-3 or abs(p.representative[m]) < 1e-3:
            continue
        q = _to_chart(p.representative, sys.n, other)
        assert evaluate(sys, par, q) == pytest.approx(val, abs=1e-10)


@given(hirzebruch, coords, st.sampled_from(["U13", "U14", "U23", "U24"]), st.floats(0, 1))
def test_poisson_commutation(sys, x, chart, t):
    par = (t,) * sys.arity
    p = ChartPoint(chart, x)
    assert abs(poisson_bracket(sys, par, p)) < 1e-8
    assert abs(poisson_bracket(sys, par, p, exact=True)) < 1e-12


@given(st.sampled_from(sorted(FAMILIES)), st.tuples(*[st.floats(-0.5, 0.5) for _ in range(4)]), st.floats(0, 1))
def test_poisson_commutation_s2(fid, x, t):
    sys = FAMILIES[fid]()
    if sys.manifold != "S2xS2":
        return
    par = (t,) * sys.arity
    for chart in ("S2:NN", "S2:SN", "S2:NS", "S2:SS"):
        assert abs(poisson_bracket(sys, par, ChartPoint(chart, x))) < 1e-8


@given(hirzebruch, coords, st.floats(0, 1), st.floats(0, 1))
def test_J_does_not_depend_on_t(sys, x, t1, t2):
    p = ChartPoint("U14", x)
    assert evaluate(sys, (t1,) * sys.arity, p)[0] == evaluate(sys, (t2,) * sys.arity, p)[0]


@given(st.floats(0.02, 0.98))
def test_sphere_scan_matches_quartic_roots(t):
    # derivative scan and quartic root-finding are independent routes to A_t, B_t
    scan = W1.sphere_scan((t,), samples=801)
    assert len(scan) == 2
    for a, b in zip(scan, W1.x3_roots(t)):
        assert abs(a - b) < 1e-10
