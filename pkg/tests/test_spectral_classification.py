import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semitoric.model_systems import (
    ChartPoint,
    CoupledAngular,
    DegenBecome,
    DegenCollapse,
    W1Hyperbolic,
    W1MovingAB,
    W1Switch,
    W2TransB,
    W2TransC,
    W2TwoParam,
)
from semitoric.reduced_spaces import Morse
from semitoric.spectral_classification import (
    OMEGA,
    OMEGA_INV,
    NotFixedError,
    RankOneType,
    Williamson,
    charpoly,
    classify_fixed_point,
    classify_point,
    eigenvalue_trajectory,
    fixed_sphere_rank_one,
    hessian_bundle,
    reduced_charpoly,
    region_diagram,
    special_directions,
    transition_times,
    verdict_switch_times,
)

EE, FF, DEG = Williamson.EE, Williamson.FF, Williamson.DEG
W1 = W1MovingAB(1.0, 2.0, 9 / 40)
W1S = W1Switch(1.0, 3.0, 3 / (8 * math.sqrt(6)))
W2 = W2TwoParam(1.0, 1.0, 9 / 20)


def _A(sys, par, label, nu=0.0, mu=1.0):
    p = sys.fixed_points(par).by_label(label).point
    return hessian_bundle(sys, par, p), p


# ---------------------------------------------------------------- Hessian displays


def test_w1_hessian_display_at_C():
    t = 0.3
    hb, p = _A(W1, (t,), "C")
    assert hb.chart == "U23"
    k = t * W1.gamma * math.sqrt(2 * W1.beta)
    e = 1 - 2 * t
    want = np.array([[0, 0, 0, k], [0, 0, k, 0], [0, k, 0, e], [k, 0, -e, 0]])
    np.testing.assert_allclose(hb.A(0, 1), want, atol=1e-12)
    assert hb.fd_gap < 1e-6


@pytest.mark.parametrize("label,chart,sign", [("B", "U13", 1), ("C", "U23", -1)])
def test_w2_hessian_display_at_centre(label, chart, sign):
    par = (0.5, 0.5)
    hb, p = _A(W2, par, label)
    assert hb.chart == chart
    g, e = 0.45, 1 / 3
    want = np.array([[0, 0, 0, g], [0, 0, g, 0], [0, g, 0, sign * e], [g, 0, -sign * e, 0]])
    np.testing.assert_allclose(2 * hb.A(0, 1), want, atol=1e-12)
    assert hb.fd_gap < 1e-6


def test_hessian_bundle_rejects_non_fixed_point():
    with pytest.raises(NotFixedError):
        hessian_bundle(W1, (0.3,), ChartPoint("U23", (0.3, 0.1, 0.2, 0.0)))


# ---------------------------------------------------------------- characteristic polynomials


def test_charpoly_matches_numpy():
    rng = np.random.default_rng(3)
    A = rng.normal(size=(4, 4))
    np.testing.assert_allclose(charpoly(A), np.poly(A), atol=1e-10)


def test_non_hamiltonian_matrix_has_odd_terms():
    A = np.diag([1.0, 2.0, 3.0, 4.0])
    assert reduced_charpoly(A).odd_residual > 0.1


def _sym(v):
    S = np.zeros((4, 4))
    S[np.triu_indices(4)] = v
    return S + np.triu(S, 1).T


@given(st.lists(st.floats(-5, 5), min_size=10, max_size=10))
def test_hamiltonian_matrices_are_even(v):
    S = _sym(v)
    rcp = reduced_charpoly(OMEGA_INV @ S)
    assert rcp.odd_residual < 1e-10


@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.sampled_from("ABCD"),
       st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
def test_w2_pencil_is_even(s1, s2, label, nu, mu):
    hb, _ = _A(W2, (s1, s2), label)
    assert reduced_charpoly(hb.A(nu, mu)).odd_residual < 1e-10


# ---------------------------------------------------------------- verdicts


@pytest.mark.parametrize("t,kind", [(0.1, EE), (0.5, FF), (0.9, FF), (0.95, EE), (10 / 29, DEG), (10 / 11, DEG)])
def test_w1_verdicts_at_C(t, kind):
    assert classify_point(W1, (t,), "C").type is kind


def test_toric_endpoint_is_elliptic():
    for lab in "ABCD":
        assert classify_point(W2, (0.0, 0.0), lab).type is EE
    for lab in ("NN", "NS", "SN", "SS"):
        assert classify_point(CoupledAngular(1, 2), (0.0,), lab).type is EE


def test_verdict_witness_and_stability():
    v = classify_point(W1, (0.5,), "C")
    assert v.stable and not v.marginal
    assert v.witness is not None
    nu, mu = v.witness
    js = v.to_json()
    assert js["type"] == "FocusFocus"
    # roots are in x = lambda^2; a non-real x gives a complex quadruple
    for x in v.roots:
        lam = np.sqrt(complex(x))
        assert abs(lam.real) > 1e-6 and abs(lam.imag) > 1e-6


@pytest.mark.parametrize("sys,label", [
    (CoupledAngular(1, 2), "NS"), (W1, "C"), (W1S, "C"),
    (W2TransB(1, 1, 9 / 20), "B"), (W2TransC(1, 1, 9 / 20), "C"),
])
def test_ee_ff_ee_pattern(sys, label):
    tm, tp = sys.closed_form_times()
    seq = [classify_point(sys, (t,), label).type for t in (tm / 2, (tm + tp) / 2, (tp + 1) / 2)]
    assert seq == [EE, FF, EE]


@pytest.mark.parametrize("sys,labels", [
    (W1, "D"), (W1S, "D"), (W2TransB(1, 1, 9 / 20), "AD"), (W2TransC(1, 1, 9 / 20), "AD"),
])
def test_other_points_stay_elliptic(sys, labels):
    for t in np.linspace(0, 1, 21):
        for lab in labels:
            assert classify_point(sys, (float(t),), lab).type is EE


def test_degenerate_families():
    assert classify_point(DegenBecome(), (0.5,), "NS").type is DEG
    assert classify_point(DegenBecome(), (0.3,), "NS").type is EE
    assert classify_point(DegenCollapse(), (0.5,), "NS").type is DEG
    assert classify_point(DegenCollapse(), (0.2,), "SN").type is FF


def test_special_directions_include_J_and_H():
    d = special_directions(W1)
    assert (1.0, 0.0) in d and (0.0, 1.0) in d


def test_classify_fixed_point_direct():
    hb, _ = _A(W1, (0.5,), "C")
    assert classify_fixed_point(hb, special_directions(W1)).type is FF


# ---------------------------------------------------------------- transition times


@pytest.mark.parametrize("sys,want", [
    (CoupledAngular(1, 2), (2 / (5 + 2 * math.sqrt(2)), 2 / (5 - 2 * math.sqrt(2)))),
    (W1, (10 / 29, 10 / 11)),
    (W1S, (4 / 11, 4 / 5)),
    (W2TransB(1, 1, 9 / 20), (3 / 4.9, 3 / 3.1)),
])
def test_transition_times(sys, want):
    tt = transition_times(sys)
    assert tt.t_minus == pytest.approx(want[0], abs=1e-9)
    assert tt.t_plus == pytest.approx(want[1], abs=1e-9)
    assert tt.gap < 1e-9


def test_verdict_switches_agree_with_discriminant():
    sw, _ = verdict_switch_times(W1, grid=41)
    assert len(sw) == 2
    assert sw[0] == pytest.approx(10 / 29, abs=1e-6)
    assert sw[1] == pytest.approx(10 / 11, abs=1e-6)


def test_hopf_collision_at_entry():
    tm = 10 / 29
    before, after = eigenvalue_trajectory(W1, "C", [tm - 0.03, tm + 0.03])
    # two distinct imaginary pairs before, a complex quadruple after
    assert np.max(np.abs(before.real)) < 1e-12
    assert len({round(abs(z.imag), 8) for z in before}) == 2
    assert np.min(np.abs(after.real)) > 1e-3
    assert np.min(np.abs(after.imag)) > 1e-3


# ---------------------------------------------------------------- region diagram


def test_region_diagram_corners():
    for (s1, s2), want in [((0.0, 1.0), (EE, EE)), ((0.5, 0.5), (FF, FF)), ((0.0, 0.0), (EE, EE))]:
        got = tuple(classify_point(W2, (s1, s2), lab).type for lab in "BC")
        assert got == want


def test_region_slice_matches_transB():
    # the s2 = 1 slice is the one-parameter B family
    tm, tp = W2TransB(1, 1, 9 / 20).closed_form_times()
    for t in np.linspace(0.02, 0.98, 25):
        if min(abs(t - tm), abs(t - tp)) < 1e-3:
            continue
        want = FF if tm < t < tp else EE
        assert classify_point(W2, (float(t), 1.0), "B").type is want


def test_small_region_diagram():
    rd = region_diagram(W2, grid=5)
    cl = rd.classes()
    assert cl[2, 2] == 3
    assert set(np.unique(cl)) <= {0, 1, 2, 3}
    assert rd.to_csv().splitlines()[0] == "s1,s2,B,C"


# ---------------------------------------------------------------- rank one


class _Crit:
    def __init__(self, m):
        self.morse = m


def test_classify_rank_one_from_reduced_point():
    assert classify_rank_one_map(Morse.ELLIPTIC) is RankOneType.ELLIPTIC
    assert classify_rank_one_map(Morse.HYPERBOLIC) is RankOneType.HYPERBOLIC


def classify_rank_one_map(m):
    from semitoric.spectral_classification import classify_rank_one

    return classify_rank_one(W1, (0.3,), 1.0, _Crit(m))


def test_fixed_sphere_rank_one_is_elliptic():
    # points of the J = 0 sphere away from A and B are rank one
    p = ChartPoint("U14", (0.0, 0.0, 0.4, 0.3))
    assert fixed_sphere_rank_one(W1, (0.3,), p) is RankOneType.ELLIPTIC


def test_fixed_sphere_rejects_rank_zero():
    p = W1.fixed_points((0.3,)).by_label("A_t").point
    with pytest.raises(ValueError):
        fixed_sphere_rank_one(W1, (0.3,), p)


def test_omega_is_standard():
    np.testing.assert_array_equal(OMEGA @ OMEGA_INV, np.eye(4))
