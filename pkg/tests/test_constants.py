from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from dirichlet_arg.arith import Quadrature, integrate, prime_zeta_bounds, upper_incomplete_gamma
from dirichlet_arg.constants import (
    C0, DOUBLE, DEFAULT_DELTA, DEFAULT_EPS, DEFAULT_ETA, DEFAULT_KAPPA, ConstraintError, a6_constant,
    a6_prime_sum, big_c, big_d, c0_pipeline, check_d_parameters, cin, constants_report, d_bracket,
    eta_constants, extended_precision, f_x_integral_constant, f_x_integral_exact,
    f_x_integral_quadrature, g_delta, h_bracket, h_of_k, mean_square_bound, minimize_scalar,
    mollifier_mean_constant, mollifier_mean_series, optimize_d_parameters, prime_zeta_tail_constant,
    prime_zeta_tail_terms, proportion_lower_bound, sin_square_integral, sqrt_d, window_ratio,
    zero_density_coefficients, zero_density_leading_coefficient, zero_density_prefactor,
)
from dirichlet_arg.arith import DomainError


# -- eta constants -----------------------------------------------------------

def _mp_eta(eta):
    with mpmath.workprec(200):
        e = mpmath.e ** mpmath.mpf(eta)
        w = (1 + 1 / e) ** 2
        a = 5 * w / (6 * mpmath.mpf(eta) ** 2 - 5 * w / e)
        b1 = (5 * w + (5 * mpmath.pi + 1) * 6 * eta**3 * e) / (6 * eta**3 * e - 5 * w * eta)
        return float(a), float(b1)


def test_eta_a_one_high_precision():
    ec = eta_constants(1.0)
    a, b1 = _mp_eta(1.0)
    assert ec.A == pytest.approx(a, rel=1e-12)
    assert ec.B1 == pytest.approx(b1, rel=1e-12)


def test_eta_decay_and_domain():
    assert eta_constants(20.0).A < 1e-2
    with pytest.raises(DomainError):
        eta_constants(0.9)


def test_eta_anchors():
    ec = eta_constants(DEFAULT_ETA)
    a, b1 = _mp_eta(DEFAULT_ETA)
    assert ec.B1 == pytest.approx(b1, rel=1e-12)
    assert ec.A > 0 and ec.B1 > 0 and ec.B2 > 0
    with extended_precision(120) as ops:
        hi = eta_constants(DEFAULT_ETA, ops)
    assert (ec.A, ec.B1, ec.B2) == pytest.approx((hi.A, hi.B1, hi.B2), rel=1e-13)


# -- closed-form constants ---------------------------------------------------

def test_mollifier_mean_constant():
    c = mollifier_mean_constant()
    assert 6.198 < c < 6.200 and c < 6.20
    assert abs(mollifier_mean_series() - c) < 1e-12


def test_f_x_constant():
    assert f_x_integral_exact() == Fraction(29136, 3360)
    assert f_x_integral_constant() < 8.68
    assert f_x_integral_constant() == pytest.approx(8.671428571428571, abs=1e-15)
    assert abs(f_x_integral_quadrature() - f_x_integral_constant()) < 1e-6


def test_prime_zeta_tail():
    terms = prime_zeta_tail_terms()
    total = prime_zeta_tail_constant()
    assert total < 0.53
    assert math.fsum(terms) < total
    assert 0.28 < terms[0] < 0.30
    assert terms[0] == pytest.approx(prime_zeta_bounds(1.5).upper / 3, rel=1e-15)


def test_a6():
    v = a6_constant()
    assert 0.578 < v < 0.58
    assert abs(a6_prime_sum(10 ** (8 / 3)) - v) < 0.02


# -- C, h, D -----------------------------------------------------------------

def test_big_c_v_zero():
    eta, delta, r = DEFAULT_ETA, DEFAULT_DELTA, 1.0
    m = 2 / delta - 2 * r - 3
    pre = 2 * zero_density_prefactor(eta, delta)
    expect = math.exp(2 * eta * r) + pre * (
        math.exp((2 * r + 3 - 2 / delta) * eta) / delta + 2 * r * math.exp(-eta * m) / (delta * m)
    )
    assert big_c(eta, delta, r, 0) == pytest.approx(expect, rel=1e-13)


def test_big_c_quadrature_gamma():
    eta, delta, r, v = DEFAULT_ETA, DEFAULT_DELTA, 0.0, 2.0
    m = 2 / delta - 2 * r - 3
    q = Quadrature(abs_tol=1e-15, rel_tol=1e-13)
    g = integrate(lambda z: z ** (v - 1) * np.exp(-z), eta * m, math.inf, q).value
    pre = 2 ** (v + 1) * zero_density_prefactor(eta, delta)
    expect = (2 * eta) ** v + pre * (
        eta**v * math.exp((3 - 2 / delta) * eta) / delta + v * g / (delta * m**v)
    )
    assert big_c(eta, delta, r, v) == pytest.approx(expect, rel=1e-8)


def test_big_c_monotone_in_r():
    rs = np.linspace(0, 4, 30)
    vals = [big_c(DEFAULT_ETA, 0.1, r, 2) for r in rs]
    assert np.all(np.diff(vals) > 0)


def test_big_c_constraint():
    with pytest.raises(ConstraintError) as exc:
        big_c(DEFAULT_ETA, 0.5, 1, 1)
    assert "2/(2r+3)" in exc.value.inequality


def test_h_of_k_one():
    h, d = h_of_k(1)
    assert 6.38 < h < 6.40 and 0.64 < d < 0.65


def test_h_limits():
    assert float(h_bracket(50.0, 1)) == pytest.approx(8.68, abs=1e-6)
    assert float(g_delta(1e-9)) == pytest.approx(342 / 8, rel=1e-6)
    # closed form and Taylor series agree where both are accurate
    for d in (1.0, 1.5, 1.999):
        closed = ((2 * d * d + 4 * d + 3) - (192 * d**3 + 80 * d * d + 22 * d + 3) * math.exp(-6 * d)) / (8 * d**4)
        assert float(g_delta(d)) == pytest.approx(closed, rel=1e-10)


def test_g_delta_symbolic_limit():
    # numerator vanishes to fourth order with leading coefficient 342; denominator is 8 d^4 + ...
    with mpmath.workprec(200):
        coeffs = mpmath.taylor(
            lambda d: (2 * d**2 + 4 * d + 3) * mpmath.exp(6 * d) - 192 * d**3 - 80 * d**2 - 22 * d - 3, 0, 4
        )
    assert all(abs(c) < 1e-50 for c in coeffs[:4])
    assert abs(coeffs[4] - 342) < 1e-50


def test_h_of_k_domain():
    with pytest.raises(ConstraintError):
        h_of_k(9)


def test_sqrt_d_limit_kappa_eighth():
    vals = [sqrt_d(DEFAULT_ETA, DEFAULT_DELTA, 0.125 - 10.0**-e) for e in (6, 8, 10)]
    assert all(981.3 < v < 981.5 for v in vals)


def test_sqrt_d_default_kappa_value():
    assert sqrt_d(DEFAULT_ETA, DEFAULT_DELTA, DEFAULT_KAPPA) == pytest.approx(981.8010362093157, rel=1e-12)


def test_d_decreasing_in_kappa():
    ks = np.linspace(0.0601, 0.1249, 60)
    ds = [big_d(DEFAULT_ETA, DEFAULT_DELTA, k, 1, 0.25) for k in ks]
    assert np.all(np.diff(ds) < 0)


def test_d_bracket_power():
    for k in (1, 2):
        br = d_bracket(DEFAULT_ETA, 0.05, DEFAULT_KAPPA, k, 0.25)
        d = big_d(DEFAULT_ETA, 0.05, DEFAULT_KAPPA, k, 0.25)
        assert d == pytest.approx(br ** (2 * k) / math.pi ** (2 * k), rel=1e-12)


def test_d_extended_precision_agrees():
    lo = big_d(DEFAULT_ETA, DEFAULT_DELTA, DEFAULT_KAPPA, 1, 0.25)
    with extended_precision(128) as ops:
        hi = big_d(DEFAULT_ETA, DEFAULT_DELTA, DEFAULT_KAPPA, 1, 0.25, ops)
    assert lo == pytest.approx(hi, rel=1e-12)


@pytest.mark.parametrize("args,ineq", [
    ((0.9, 0.16, 0.1, 1, 0.25), "η ≥ 1"),
    ((1.2, 0.16, 0.1, 1, 0.3), "0 < ε ≤ 1/4"),
    ((1.2, 0.16, 0.13, 1, 0.25), "0 < κ < ε/2"),
    ((1.2, 0.2, 0.1, 1, 0.25), "δ < 2/(8k+3)"),
    ((1.2, 0.1, 0.1, 0, 0.25), "k ≥ 1 integer"),
])
def test_d_constraints_named(args, ineq):
    with pytest.raises(ConstraintError) as exc:
        check_d_parameters(*args)
    assert exc.value.inequality == ineq
    assert ineq in str(exc.value)


def test_default_delta_admissible():
    assert DEFAULT_DELTA < 2 / 11
    check_d_parameters(DEFAULT_ETA, DEFAULT_DELTA, DEFAULT_KAPPA, 1, DEFAULT_EPS)


def test_c0_pipeline():
    c = c0_pipeline(DEFAULT_KAPPA, 1e9)
    assert c < C0
    assert c - sqrt_d(DEFAULT_ETA, DEFAULT_DELTA, DEFAULT_KAPPA) < 1e-5
    assert c0_pipeline(0.06, 1e9) > c
    with pytest.raises(ConstraintError):
        c0_pipeline(0.125, 1e9)


def test_constants_deterministic():
    a = [sqrt_d(DEFAULT_ETA, DEFAULT_DELTA, DEFAULT_KAPPA) for _ in range(3)]
    assert a[0] == a[1] == a[2]


# -- zero density ------------------------------------------------------------

def test_window_ratio_and_lead():
    u = window_ratio()
    assert 0.8257 < u < 0.8259
    assert 4.77 < zero_density_leading_coefficient() < 4.79


def test_density_full_below_simplified():
    count = 0
    for kappa in np.linspace(0.02, 0.125, 10):
        lo = max(1.73 / kappa, math.pi / (1.8258 * kappa)) * 1.001
        for tau in np.geomspace(lo, 50 * lo, 10):
            c = zero_density_coefficients(kappa, tau)
            assert c.full <= c.simplified
            assert c.b == pytest.approx(1 / (2 * kappa))
            count += 1
    assert count == 100


def test_density_window_violation():
    with pytest.raises(ConstraintError) as exc:
        zero_density_coefficients(0.1, 10.0)
    assert "τ ≥ 1.73/κ" in str(exc.value)


# -- minimizer ---------------------------------------------------------------

def test_minimize_smooth_and_kink():
    r = minimize_scalar(lambda x: (x - 2) ** 2, 0, 5, tol=1e-9)
    assert abs(r.x - 2) < 1e-8 and not r.flagged
    r = minimize_scalar(lambda x: abs(x - 1), 0, 3, tol=1e-9)
    assert abs(r.x - 1) < 1e-8


def test_minimize_flags_multimodal():
    r = minimize_scalar(lambda x: math.cos(3 * x) + 0.1 * x, 0, 10)
    assert r.flagged
    grid = np.linspace(0, 10, 20001)
    assert r.fx <= np.min(np.cos(3 * grid) + 0.1 * grid) + 1e-9


@given(st.floats(-5, 5), st.floats(0.1, 10))
def test_minimize_quadratic_property(c, scale):
    r = minimize_scalar(lambda x: scale * (x - c) ** 2, -6, 6, tol=1e-9)
    assert abs(r.x - c) < 1e-8


# -- optimizer ---------------------------------------------------------------

def test_optimize_d_recovers_choice():
    res = optimize_d_parameters()
    ref = sqrt_d(DEFAULT_ETA, DEFAULT_DELTA, DEFAULT_KAPPA)
    assert res.value <= ref + 1e-3
    assert abs(res.eta - DEFAULT_ETA) < 0.05 and abs(res.delta - DEFAULT_DELTA) < 0.01
    for de in (-0.01, 0.01):
        assert sqrt_d(res.eta + de, res.delta, DEFAULT_KAPPA) >= res.value


# -- mean square and proportion ----------------------------------------------

def test_mean_square_zero():
    assert mean_square_bound(0) == 3857296.0


def test_cin_series_and_closed_form():
    for z in (0.1, 0.49, 0.51, 3.0, 40.0):
        ref = integrate(lambda w: (1 - np.cos(w)) / w, 1e-300, z, Quadrature(abs_tol=1e-15, rel_tol=1e-13))
        assert cin(z) == pytest.approx(ref.value, rel=1e-11)


def test_sin_square_midpoint_oracle():
    n = 10**6
    y = (np.arange(n) + 0.5) / n
    mid = float(np.sum(np.sin(2 * np.pi * y) ** 2 / y) / n)
    assert abs(sin_square_integral(3 * (50 / 3) / 50) - mid) < 1e-8


def test_mean_square_growth():
    lo, hi = mean_square_bound(1e3), mean_square_bound(1e6)
    assert hi > lo
    # sqrt of the integral grows like sqrt(log beta); the increment tracks that trend
    s = lambda b: math.sqrt(sin_square_integral(3 * b / 50))
    ratio = (s(1e6) ** 2 - s(1e3) ** 2) / (0.5 * math.log(1e3))
    assert ratio == pytest.approx(1.0, abs=0.01)


def test_proportion_limits():
    assert proportion_lower_bound(982.001) < 1e-6
    assert proportion_lower_bound(1e6) > 0.99
    with pytest.raises(ConstraintError):
        proportion_lower_bound(982)


def test_proportion_denominator_identity():
    for beta in np.linspace(1000, 1e6, 10):
        num = (2 * beta - 2 * C0) ** 2
        den = 4 * beta**2 - 8 * C0 * beta + mean_square_bound(beta)
        assert den == pytest.approx(num + (mean_square_bound(beta) - (2 * C0) ** 2), rel=1e-13)
        assert proportion_lower_bound(beta) == pytest.approx(num / den, rel=1e-12)


# -- report ------------------------------------------------------------------

def test_constants_report_rows():
    rep = constants_report()
    names = [r["name"] for r in rep.rows()]
    assert "sqrt(D)" in names and "c0_bound" in names
    assert rep.c0_bound < C0
    ext = constants_report(prec_bits=100)
    assert ext.precision == "extended:100"
    assert ext.d_value == pytest.approx(rep.d_value, rel=1e-12)
