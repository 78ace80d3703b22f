import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from semitoric.invariants import (
    ComparisonRefused,
    HeightDomainError,
    gamma_grid,
    height_s2xs2,
    height_w2,
    match_and_compare,
    matched_scalings,
    s2_rho_max,
    w2_rho_bounds,
    w2_window,
)

# frozen from the quadrature route; the jittered-grid oracle agrees to its standard error
H1_W2_2_2_035 = 1.4761904761904763
H1_S2_1_2 = 1.2739589509524687
GAMMA_STAR_3_4 = 0.230887457


def test_w2_height_value():
    r = height_w2(2.0, 2.0, 0.35)
    assert r.h1 == pytest.approx(H1_W2_2_2_035, abs=1e-9)
    assert r.h1 + r.h2 == pytest.approx(2.0, abs=1e-15)


def test_w2_height_conservation_audit():
    r = height_w2(2.0, 2.0, 0.35, audit=True)
    assert abs(r.h1 + r.h2_audit - 2.0) < 1e-8


def test_w2_height_oracle():
    r = height_w2(2.0, 2.0, 0.35, oracle_samples=400_000, seed=1)
    assert abs(r.oracle.h - r.h1) < max(5 * r.oracle.stderr, 1e-4)


def test_s2_height_value_and_oracle():
    r = height_s2xs2(1.0, 2.0, oracle_samples=400_000, seed=2)
    assert r.h1 == pytest.approx(H1_S2_1_2, abs=1e-9)
    assert abs(r.oracle.h - r.h1) < max(5 * r.oracle.stderr, 1e-4)


@given(st.floats(0.5, 4.0), st.floats(0.5, 4.0), st.floats(0.02, 0.98))
def test_w2_height_within_fiber(alpha, beta, frac):
    lo, hi = w2_window(alpha, beta)
    g = lo + (hi - lo) * frac
    try:
        r = height_w2(alpha, beta, g)
    except HeightDomainError:
        return
    assert 0 < r.h1 < beta


@given(st.floats(0.5, 4.0), st.floats(0.5, 4.0), st.floats(0.05, 0.9), st.floats(0.01, 0.09))
def test_w2_height_decreases_in_gamma(alpha, beta, f0, df):
    lo, hi = w2_window(alpha, beta)
    g0, g1 = lo + (hi - lo) * f0, lo + (hi - lo) * (f0 + df)
    assert height_w2(alpha, beta, g1).h1 < height_w2(alpha, beta, g0).h1


def test_rho_bounds_bracket():
    lo, hi = w2_rho_bounds(2.0, 2.0, 0.35)
    assert 0 < lo < hi


def test_comparison_no_crossing_for_1_2():
    c = match_and_compare(1.0, 2.0)
    assert (c.alpha, c.beta) == matched_scalings(1.0, 2.0) == (2.0, 2.0)
    assert c.decreasing
    assert c.gamma_star is None
    assert all(h > c.h1_s2 for _, h, _ in c.rows)
    assert len(c.rows) == 20


def test_comparison_crossing_for_3_4():
    c = match_and_compare(3.0, 4.0)
    assert c.decreasing
    assert c.gamma_star == pytest.approx(GAMMA_STAR_3_4, abs=1e-6)
    assert height_w2(c.alpha, c.beta, c.gamma_star).h1 == pytest.approx(c.h1_s2, abs=1e-7)


def test_comparison_csv_header():
    c = match_and_compare(1.0, 2.0, gammas=gamma_grid(2.0, 2.0, 3))
    assert c.to_csv().splitlines()[0] == "gamma,h1_w2,h1_s2,err_quad,err_mc"


def test_mismatched_scalings_refused():
    with pytest.raises(ComparisonRefused):
        match_and_compare(1.0, 2.0, alpha=3.0, beta=2.0)


def test_domain_errors():
    with pytest.raises(HeightDomainError):
        height_w2(2.0, 2.0, 0.9)
    with pytest.raises(HeightDomainError):
        height_s2xs2(2.0, 1.0)
    with pytest.raises(HeightDomainError):
        s2_rho_max(1.0, 9 + 4 * math.sqrt(5) + 1)
