from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_arg import lfunc
from dirichlet_arg.arith import DomainError, Quadrature, sieve
from dirichlet_arg.characters import PreconditionError, build_family
from dirichlet_arg.lfunc import (
    NearZeroError, completed_zero_counts, critical_zeros, dirichlet_remainder,
    explicit_formula_residual, family_arguments, family_zeros, l_value, l_values,
    littlewood_identity_check, log_deriv, n_formula, s_of_t, sigma_t_chi, z_function, z_values,
    zero_count_region,
)
from dirichlet_arg.mollifier import smoothed_lambda


@pytest.fixture(scope="module")
def zeros_q5():
    return family_zeros(build_family(5), 60.0, t_lo=-60.0)


# -- L values ----------------------------------------------------------------

def test_l_conjugation():
    fam = build_family(7)
    s = 0.7 + 3j
    for ch in fam.characters():
        assert abs(np.conj(l_value(np.conj(s), ch.conj())) - l_value(s, ch)) < 1e-11


def test_l_two_mod_three_series():
    n = np.arange(1, 10**7 + 1, dtype=np.float64)
    chi = np.array([0.0, 1.0, -1.0])[(np.arange(1, 10**7 + 1) % 3)]
    direct = math.fsum(chi / n**2)
    # alternating blocks: the tail is below the first omitted term
    tail = 1.0 / 10**14
    assert abs(l_value(2, build_family(3).character(1)) - direct) < 1e-12 + tail


def test_l_euler_product():
    fam = build_family(7)
    primes = sieve(10**7).primes
    s = 2 + 1.5j
    logp = np.log(primes.astype(float))
    for ch in fam.characters():
        vals = ch(primes)
        prod = np.exp(-np.sum(np.log1p(-vals * np.exp(-s * logp))))
        assert abs(l_value(s, ch) - prod) < 1e-8


def test_l_family_matches_single():
    fam = build_family(101)
    s = 0.5 + 17.3j
    vals = l_values(s, fam)
    for j in (1, 2, 50, 99):
        assert abs(vals[j] - l_value(s, fam.character(j))) < 1e-11


def test_l_against_mpmath():
    import mpmath

    fam = build_family(11)
    for s in (0.5 + 25j, -0.5 + 3j, 2.5 - 60j):
        for ch in fam.characters():
            chi = [complex(ch(a)) for a in range(11)]
            ref = complex(mpmath.dirichlet(s, chi))
            assert abs(l_value(s, ch) - ref) < 1e-10


def test_principal_pole():
    with pytest.raises(DomainError):
        l_value(1, build_family(5).character(0))


# -- L'/L --------------------------------------------------------------------

def _series_log_deriv(s, ch, limit=10**6):
    t = sieve(limit)
    n = np.nonzero(t.von_mangoldt)[0]
    return -np.sum(t.von_mangoldt[n] * ch(n) * np.exp(-s * np.log(n.astype(float))))


def test_log_deriv_series():
    fam = build_family(5)
    for ch in fam.characters():
        assert abs(log_deriv(3.0, ch) - _series_log_deriv(3.0, ch)) < 1e-8
        assert abs(log_deriv(2.5 + 4j, ch) - _series_log_deriv(2.5 + 4j, ch)) < 1e-8


def test_log_deriv_conjugation_and_difference():
    fam = build_family(7)
    s, h = 2 + 1j, 1e-6
    for ch in fam.characters():
        assert abs(np.conj(log_deriv(np.conj(s), ch.conj())) - log_deriv(s, ch)) < 1e-11
        fd = (np.log(l_value(s + h, ch)) - np.log(l_value(s - h, ch))) / (2 * h)
        assert abs(fd - log_deriv(s, ch)) < 1e-6


def test_log_deriv_at_zero(zeros_q5, monkeypatch):
    ch = build_family(5).character(1)
    g = zeros_q5[1].first
    # a double-rounded ordinate leaves |L| near 1e-11, so L'/L is large but finite
    assert abs(log_deriv(0.5 + 1j * g, ch)) > 1e8
    monkeypatch.setattr(lfunc, "NEAR_ZERO", 1e-8)
    with pytest.raises(NearZeroError) as exc:
        log_deriv(0.5 + 1j * g, ch)
    assert exc.value.magnitude < 1e-8


# -- rotated Z and zeros -----------------------------------------------------

@pytest.mark.parametrize("q", [5, 7, 11])
def test_z_reality(q):
    fam = build_family(q)
    rng = np.random.default_rng(q)
    for t in rng.uniform(-100, 100, 100):
        assert np.max(np.abs(z_values(t, fam)[1:].imag)) < 1e-9
    ch = fam.character(1)
    assert abs(z_function(3.3, ch).imag) < 1e-9


def test_first_zero_q3():
    z = critical_zeros(build_family(3).character(1), 30)
    assert z.validated and z.discrepancy == 0
    assert 8.03 < z.first < 8.05
    assert z.first == pytest.approx(8.03973715568006, abs=1e-9)


def test_first_zero_against_mpmath():
    import mpmath

    g = critical_zeros(build_family(3).character(1), 30).first
    val = mpmath.dirichlet(mpmath.mpc(0.5, g), [0, 1, -1])
    assert abs(complex(val)) < 1e-9


def test_zero_list_invariants(zeros_q5):
    for z in zeros_q5.values():
        assert z.validated and z.discrepancy == 0 and z.argument_count == z.count
        assert np.all(np.diff(z.ordinates) > 0)
        assert np.all(z.widths <= 1e-9)
        assert z.suspects == ()


def test_count_q7_against_contour():
    fam = build_family(7)
    zl = family_zeros(fam, 50.0)
    w = completed_zero_counts(fam, 0.0, 50.0)
    counts = w.counts
    for k, j in enumerate(range(1, 6)):
        assert zl[j].count == counts[k]


def test_principal_zero_request():
    with pytest.raises(DomainError):
        critical_zeros(build_family(5).character(0), 10)


@pytest.mark.parametrize("q", [3, 5, 7, 11, 13, 17, 23, 29, 31, 37, 41, 43, 47])
def test_conjugate_reflection(q):
    fam = build_family(q)
    zl = family_zeros(fam, 30.0, t_lo=-30.0)
    for j in fam.nonprincipal:
        mine = zl[j].ordinates
        other = -zl[fam.conj_index(j)].ordinates[::-1]
        assert mine.size == other.size
        assert np.max(np.abs(mine - other), initial=0.0) < 1e-8


# -- S(t, chi) ---------------------------------------------------------------

def test_s_zero_q3():
    ch = build_family(3).character(1)
    sig = np.linspace(0.5, 10, 2000)
    vals = np.array([l_value(s, ch) for s in sig])
    assert np.all(vals.real > 0) and np.max(np.abs(vals.imag)) < 1e-12
    assert zero_count_region(ch, 0.4, -0.5, 0.5) == 0
    assert abs(s_of_t(0.0, ch).value) < 1e-12


@pytest.mark.parametrize("q", [5, 7])
def test_s_conjugation(q):
    fam = build_family(q)
    for ch in fam.characters():
        for t in (0.5, 1.0):
            a, b = s_of_t(t, ch), s_of_t(-t, ch.conj())
            assert a.converged and b.converged
            assert abs(a.value + b.value) < 1e-8


def test_family_tracking_matches_integral():
    fam = build_family(11)
    for t in (0.3, 2.7, 9.1):
        tracked = family_arguments(t, fam)
        for j in (1, 4, 7):
            assert abs(tracked[j] - s_of_t(t, fam.character(j)).value) < 1e-8


def test_n_formula_pair_count_q11():
    fam = build_family(11)
    zl = family_zeros(fam, 10.0, t_lo=-10.0)
    t = 5.0
    nf = n_formula(t, fam)
    for j in fam.nonprincipal:
        pairs = zl[j].count_upto(t) + zl[fam.conj_index(j)].count_upto(t)
        assert abs(nf[j] - pairs) < 1e-6


@pytest.mark.parametrize("q", [5, 7])
def test_s_jump_across_zeros(q):
    fam = build_family(q)
    ch = fam.character(1)
    z = critical_zeros(ch, 30)
    h = 1e-3

    def d(step, g):
        return s_of_t(g + step, ch).value - s_of_t(g - step, ch).value

    for g in z.ordinates[:3]:
        # Richardson: the smooth drift of S is odd in the offset and cancels
        assert abs(2 * d(h, g) - d(2 * h, g) - 1) < 1e-6


def test_s_collision_average(zeros_q5):
    ch = build_family(5).character(1)
    g = zeros_q5[1].first
    mid = s_of_t(g, ch)
    lo, hi = s_of_t(g - 1e-6, ch), s_of_t(g + 1e-6, ch)
    assert mid.averaged
    assert abs(mid.value - 0.5 * (lo.value + hi.value)) < 1e-8


# -- contour counts ----------------------------------------------------------

def test_region_no_off_critical_q11():
    fam = build_family(11)
    for ch in fam.characters():
        assert zero_count_region(ch, 0.6, 0.0, 30.0) == 0


def test_region_single_critical_zero(zeros_q5):
    ch = build_family(5).character(2)
    z = zeros_q5[2]
    pos = z.ordinates[z.ordinates > 0]
    g0, g1 = pos[0], pos[1]
    assert zero_count_region(ch, 0.5 - 1e-3, 0.5 * g0, 0.5 * (g0 + g1)) == 1
    assert zero_count_region(ch, 0.5 - 1e-3, g0 + 0.1, g0 + 0.1 + 1e-6) == 0


# -- sigma_{t,chi} and r(x, t) ------------------------------------------------

def test_sigma_empty_list():
    assert sigma_t_chi(3.0, [], 100.0, 1.2) == pytest.approx(0.5 + 2 * 1.2 / math.log(100.0))


def test_sigma_synthetic_zero():
    assert sigma_t_chi(5.0, [(0.6, 5.0)], 10**6, 1.0) == pytest.approx(0.7)


@given(st.floats(-50, 50), st.floats(2, 1e6), st.floats(1, 3))
def test_sigma_critical_zeros(t, x, eta):
    zeros = [(0.5, g) for g in np.linspace(-60, 60, 40)]
    assert sigma_t_chi(t, zeros, x, eta) == pytest.approx(0.5 + 2 * eta / math.log(x))


def test_sigma_preconditions():
    with pytest.raises(PreconditionError):
        sigma_t_chi(0, [], 10, 0.5)


def test_remainder_smallest_x():
    # x = 2 is the smallest admissible length; the sum runs over n < 8
    ch = build_family(5).character(1)
    s = complex(sigma_t_chi(1.0, [], 2.0, 1.0), 1.0)
    direct = sum(smoothed_lambda(n, 2.0) * ch(n) * n**-s for n in range(2, 8))
    assert abs(dirichlet_remainder(1.0, ch, 2.0, 1.0) - direct) < 1e-14
    with pytest.raises(PreconditionError):
        dirichlet_remainder(1.0, ch, 2 ** (1 / 3), 1.0)


def test_remainder_conjugation():
    fam = build_family(11)
    for ch in fam.characters():
        r1 = dirichlet_remainder(1.3, ch, 10.0, 1.156)
        r2 = dirichlet_remainder(-1.3, ch.conj(), 10.0, 1.156)
        assert abs(np.conj(r1) - r2) < 1e-12


def test_remainder_prime_power_oracle():
    ch = build_family(11).character(3)
    x, eta, t = 10.0, 1.156, 1.0
    s = complex(sigma_t_chi(t, [], x, eta), t)
    total = 0j
    for p in sieve(1000).primes:
        pk = int(p)
        while pk < x**3:
            total += smoothed_lambda(pk, x) * ch(pk) * pk**-s
            pk *= int(p)
    assert abs(dirichlet_remainder(t, ch, x, eta) - total) < 1e-12


# -- explicit formula --------------------------------------------------------

def test_explicit_formula_residual(zeros_q5):
    fam = build_family(5)
    ch = fam.character(1)
    z, zc = zeros_q5[1], zeros_q5[fam.conj_index(1)]
    r = explicit_formula_residual(2.0, ch, 10.0, z, zc)
    assert r.residual < r.truncation_bound


def test_explicit_formula_truncation_monotone():
    fam = build_family(5)
    ch = fam.character(2)
    res = []
    for T in (55.0, 100.0):
        zl = family_zeros(fam, T)
        res.append(explicit_formula_residual(2.0 + 1j, ch, 10.0, zl[2], zl[fam.conj_index(2)]).residual)
    assert res[1] < res[0]


def test_explicit_formula_height_precondition(zeros_q5):
    fam = build_family(5)
    with pytest.raises(PreconditionError):
        explicit_formula_residual(2.0 + 20j, fam.character(1), 10.0, zeros_q5[1], zeros_q5[3])


def test_smoothed_sum_tends_to_log_deriv():
    ch = build_family(7).character(2)
    s = 3.0 + 0.5j
    from dirichlet_arg.mollifier import smoothed_lambda_table

    tab = smoothed_lambda_table(300.0)
    approx = -np.sum(tab.values * ch(tab.n) * np.exp(-s * np.log(tab.n.astype(float))))
    assert abs(approx - log_deriv(s, ch)) < 1e-6


# -- Littlewood --------------------------------------------------------------

def test_littlewood_zero_free():
    r = littlewood_identity_check(1.5, 1.0, -3.0, 3.0)
    assert r.zeros == () and r.lhs == 0
    assert abs(r.rhs) < 1e-8


def test_littlewood_one_zero():
    r = littlewood_identity_check(4.0, 1.0, -3.0, 3.0)
    assert len(r.zeros) == 1 and r.zeros[0] == pytest.approx((2.0, 0.0))
    assert r.difference < 1e-6


def test_littlewood_refinement():
    coarse = littlewood_identity_check(4.0, 1.0, -3.0, 3.0, Quadrature(abs_tol=1e-11, rel_tol=1e-11))
    fine = littlewood_identity_check(4.0, 1.0, -3.0, 3.0, Quadrature(abs_tol=1e-14, rel_tol=1e-14))
    assert abs(coarse.rhs - fine.rhs) < 1e-8


@settings(max_examples=25)
@given(st.floats(0.2, 30), st.floats(-1, 2), st.floats(-20, 20), st.floats(4.6, 12))
def test_littlewood_property(a, sp, t1, width):
    r = littlewood_identity_check(a, sp, t1, t1 + width)
    assert r.difference < 1e-6


def test_littlewood_narrow_window():
    with pytest.raises(PreconditionError):
        littlewood_identity_check(4.0, 1.0, -1.0, 1.0)
