"""Explicit constants and bound formulas, with the parameter optimization.

Every formula is written once against a small math backend so that it runs
either in IEEE double (numpy, vectorized over parameter grids) or in mpmath
at a chosen significand width.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from types import SimpleNamespace

import mpmath
import numpy as np
from scipy import optimize, special

from .arith import EULER_GAMMA, DomainError, Quadrature, integrate, prime_zeta_bounds, sieve
from .report import Report

C0 = 982
DEFAULT_ETA = 1.156
DEFAULT_DELTA = 0.16
DEFAULT_KAPPA = 0.1249
DEFAULT_EPS = 0.25
ZERO_DENSITY_LEAD = 4.79
ZERO_DENSITY_SECOND = 4.12
ZERO_DENSITY_SHIFT = 1.73
MEAN_SQUARE_CONSTANT = 6.20
H_DOMAIN = (1e-6, 50.0)


class ConstraintError(DomainError):
    """A parameter violates one of the stated inequalities; ``inequality`` names it."""

    def __init__(self, inequality: str, detail: str = ""):
        self.inequality = inequality
        msg = f"constraint violated: {inequality}"
        super().__init__(f"{msg} ({detail})" if detail else msg)


def _require(ok: bool, inequality: str, detail: str = "") -> None:
    if not ok:
        raise ConstraintError(inequality, detail)


# ---------------------------------------------------------------------------
# Math backends
# ---------------------------------------------------------------------------


def _np_gamma_upper(v, u):
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(v == 0, special.exp1(u), special.gammaincc(np.maximum(v, 1e-300), u) * special.gamma(v))
    return out[()] if out.ndim == 0 else out


DOUBLE = SimpleNamespace(
    exp=np.exp, log=np.log, sqrt=np.sqrt, sin=np.sin, pi=math.pi, gamma_upper=_np_gamma_upper,
    num=float, name="double",
)


def _mp_backend() -> SimpleNamespace:
    return SimpleNamespace(
        exp=mpmath.exp, log=mpmath.log, sqrt=mpmath.sqrt, sin=mpmath.sin, pi=mpmath.pi,
        gamma_upper=lambda v, u: mpmath.gammainc(v, u), num=mpmath.mpf,
        name=f"extended:{mpmath.mp.prec}",
    )


@contextmanager
def extended_precision(bits: int):
    """Run the enclosed constant evaluations in mpmath with ``bits`` significand bits."""
    if bits < 53:
        raise DomainError("extended precision needs at least 53 significand bits")
    with mpmath.workprec(int(bits)):
        yield _mp_backend()


# ---------------------------------------------------------------------------
# A(eta), B1(eta), B2(eta)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EtaConstants:
    eta: float
    A: float
    B1: float
    B2: float


def _eta_formulas(eta, ops=DOUBLE):
    e = ops.exp(eta)
    w = (1 + 1 / e) ** 2
    a = 5 * w / (6 * eta**2 - 5 * w / e)
    b1 = (5 * w + (5 * ops.pi + 1) * 6 * eta**3 * e) / (6 * eta**3 * e - 5 * w * eta)
    b2 = (5 * w * (1 + eta) + 30 * ops.pi * eta**3 * e) / (12 * eta**3 * e - 10 * w * eta)
    return a, b1, b2


def eta_constants(eta: float, ops=DOUBLE) -> EtaConstants:
    if not eta >= 1:
        raise DomainError(f"need eta >= 1, got {eta}")
    eta_n = ops.num(eta)
    w = (1 + ops.exp(-eta_n)) ** 2
    # positivity of both denominators
    _require(6 * eta_n**2 * ops.exp(eta_n) > 5 * w, "6 eta^2 e^eta > 5(1+e^-eta)^2")
    _require(6 * eta_n**2 > 5 * w * ops.exp(-eta_n), "6 eta^2 > 5(1+e^-eta)^2 e^-eta")
    a, b1, b2 = _eta_formulas(eta_n, ops)
    return EtaConstants(float(eta), float(a), float(b1), float(b2))


# ---------------------------------------------------------------------------
# Closed-form constants
# ---------------------------------------------------------------------------


def mollifier_mean_constant(ops=DOUBLE) -> float:
    """e^(1/4)(e-1)(-3/(2(e-1)) + 4e/(e-1)^2) = 6.199..."""
    e = ops.exp(ops.num(1))
    return float(ops.exp(ops.num(1) / 4) * (e - 1) * (-3 / (2 * (e - 1)) + 4 * e / (e - 1) ** 2))


def mollifier_mean_series(terms: int = 200) -> float:
    """The same constant summed as e^(1/4)(e-1) sum_{l>=1} e^-l (4l - 3/2)."""
    ell = np.arange(1, terms + 1, dtype=float)
    s = math.fsum(np.exp(-ell) * (4 * ell - 1.5))
    return math.exp(0.25) * (math.e - 1) * s


def f_x_integral_exact() -> Fraction:
    return Fraction(17, 12) + Fraction(6899, 1120) + Fraction(3679, 3360)


def f_x_integral_constant() -> float:
    """(1/log^4 x) int_1^{x^3} f_x(y) dy = 29136/3360 = 8.6714..."""
    return float(f_x_integral_exact())


def _f_x_weight(u):
    u = np.asarray(u, dtype=float)
    mid = ((3 - u) ** 2 - 2 * (2 - u) ** 2) / 2
    top = (3 - u) ** 2 / 2
    return np.where(u <= 1, 1.0, np.where(u <= 2, mid, top))


def f_x_integral_quadrature(quad: Quadrature = Quadrature(abs_tol=1e-13, rel_tol=1e-13)) -> float:
    """Piecewise quadrature of the same integral after y = x^u.

    With Lambda_x(y) = w(u) log y the integrand becomes w(u)^2 u (1+u)^2 du on
    [0, 3], independent of x.
    """
    res = integrate(lambda u: _f_x_weight(u) ** 2 * u * (1 + u) ** 2, 0.0, 3.0, quad, points=(1.0, 2.0))
    return float(res.value)


def prime_zeta_tail_terms(ell_max: int = 500, prime_limit: int = 10**6) -> np.ndarray:
    """Upper bounds for zeta_P(l/2)/l, l = 3..ell_max."""
    return np.array([prime_zeta_bounds(l / 2, prime_limit).upper / l for l in range(3, ell_max + 1)])


def prime_zeta_tail_constant(ell_max: int = 500, prime_limit: int = 10**6) -> float:
    """sum_{l=3}^{500} zeta_P(l/2)/l plus the tail bound 1/499 + 1/500."""
    partial = math.fsum(prime_zeta_tail_terms(ell_max, prime_limit))
    return partial + 1 / (ell_max - 1) + 1 / ell_max


def a6_constant() -> float:
    """log 3 - (3/4) log 2 = 0.57875..."""
    return math.log(3) - 0.75 * math.log(2)


def a6_prime_sum(x: float) -> float:
    """sum_{x<=p<x^2} 1/(4p) + sum_{x^2<=p<x^3} 1/p, which tends to a6_constant()."""
    top = math.ceil(x**3)
    p = sieve(top).primes.astype(float)
    low = p[(p >= x) & (p < x * x)]
    high = p[(p >= x * x) & (p < x**3)]
    return math.fsum(0.25 / low) + math.fsum(1.0 / high)


# ---------------------------------------------------------------------------
# C(eta, delta, r, v), h(k), D
# ---------------------------------------------------------------------------


def zero_density_prefactor(eta, delta, ops=DOUBLE):
    """4.79 + 4.12/(4 e^(3 eta)/delta - 1.73)."""
    return ZERO_DENSITY_LEAD + ZERO_DENSITY_SECOND / (4 * ops.exp(3 * eta) / delta - ZERO_DENSITY_SHIFT)


def f_eta_kappa_delta(eta: float, kappa: float, delta: float) -> float:
    """f(eta, kappa, delta) = 2 kappa (4.79 + 4.12/(4 e^(3 eta)/delta - 1.73))."""
    return float(2 * kappa * zero_density_prefactor(eta, delta))


def _big_c(eta, delta, r, v, ops=DOUBLE):
    m = 2 / delta - 2 * r - 3
    pre = 2 ** (v + 1) * zero_density_prefactor(eta, delta, ops)
    bracket = eta**v * ops.exp((2 * r + 3 - 2 / delta) * eta) / delta
    if v:
        bracket = bracket + v * ops.gamma_upper(v, eta * m) / (delta * m**v)
    if r:
        bracket = bracket + 2 * r * ops.gamma_upper(v + 1, eta * m) / (delta * m ** (v + 1))
    return (2 * eta) ** v * ops.exp(2 * eta * r) + pre * bracket


def big_c(eta: float, delta: float, r: float, v: float, ops=DOUBLE) -> float:
    """C(eta, delta, r, v) of the sigma_{t,chi} moment bound."""
    _require(eta >= 1, "eta >= 1", f"eta={eta}")
    _require(r >= 0 and v >= 0, "r >= 0 and v >= 0", f"r={r}, v={v}")
    _require(0 < delta < 2 / (2 * r + 3), "0 < δ < 2/(2r+3)", f"delta={delta}, r={r}")
    n = ops.num
    return float(_big_c(n(eta), n(delta), n(r), n(v), ops))


def _g_series_coeffs(terms: int = 80) -> np.ndarray:
    # coefficient of D^(m) in the numerator, m >= 4, as c_m
    out = np.empty(terms)
    for i in range(terms):
        m = i + 4
        t0 = 6.0**m / math.factorial(m)
        t1 = 6.0 ** (m - 1) / math.factorial(m - 1)
        t2 = 6.0 ** (m - 2) / math.factorial(m - 2)
        out[i] = 3 * t0 + 4 * t1 + 2 * t2
    return out


_G_COEFFS = _g_series_coeffs()


def g_delta(d):
    """((2D^2+4D+3)e^(6D) - 192D^3 - 80D^2 - 22D - 3)/(8 D^4 e^(6D)); limit 342/8 at 0."""
    d = np.asarray(d, dtype=float)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        closed = ((2 * d * d + 4 * d + 3) - (192 * d**3 + 80 * d * d + 22 * d + 3) * np.exp(-6 * d)) / (8 * d**4)
    small = d < 2
    if np.any(small):
        ds = np.where(small, d, 0.0)
        series = np.polynomial.polynomial.polyval(ds, _G_COEFFS) / (8 * np.exp(6 * ds))
        closed = np.where(small, series, closed)
    return closed[()] if closed.ndim == 0 else closed


def h_bracket(d, k: int):
    """(1-e^-D) 8.68^(2k) + e^-D g(D)^(2k), raised to 1/(2k)."""
    d = np.asarray(d, dtype=float)
    inner = (1 - np.exp(-d)) * 8.68 ** (2 * k) + np.exp(-d) * g_delta(d) ** (2 * k)
    return inner ** (1.0 / (2 * k))


@dataclass(frozen=True)
class ScalarMin:
    x: float
    fx: float
    flagged: bool = False
    evaluations: int = 0


def minimize_scalar(f, lo: float, hi: float, tol: float = 1e-10, scan: int = 64) -> ScalarMin:
    """Golden-section refinement of the best cell of a ``scan``-point grid.

    If the grid shows more than one interior local minimum the function is not
    unimodal on [lo, hi]; every candidate cell is then refined and the result
    is flagged.
    """
    if not lo < hi:
        raise DomainError("need lo < hi")
    if tol <= 0:
        raise DomainError("need tol > 0")
    xs = np.linspace(lo, hi, scan)
    ys = np.array([float(f(x)) for x in xs])
    evals = scan
    interior = [i for i in range(1, scan - 1) if ys[i] <= ys[i - 1] and ys[i] <= ys[i + 1]]
    flagged = len(interior) > 1
    starts = interior if flagged else [int(np.argmin(ys))]
    invphi = (math.sqrt(5) - 1) / 2
    best = None
    for i in starts:
        a, b = xs[max(i - 1, 0)], xs[min(i + 1, scan - 1)]
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc, fd = float(f(c)), float(f(d))
        evals += 2
        while b - a > tol:
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = float(f(c))
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = float(f(d))
            evals += 1
        x = 0.5 * (a + b)
        cand = (float(f(x)), x)
        evals += 1
        if ys[i] < cand[0]:
            cand = (float(ys[i]), float(xs[i]))
        if best is None or cand[0] < best[0]:
            best = cand
    return ScalarMin(float(best[1]), float(best[0]), flagged, evals)


_H_CACHE: dict[int, ScalarMin] = {}


def h_of_k(k: int) -> tuple[float, float]:
    """(h(k), Delta*): minimum over Delta of the bracket and its minimizer."""
    if not (isinstance(k, (int, np.integer)) and 1 <= k <= 8):
        raise ConstraintError("1 <= k <= 8", f"k={k}")
    k = int(k)
    if k not in _H_CACHE:
        _H_CACHE[k] = minimize_scalar(lambda d: h_bracket(d, k), *H_DOMAIN, tol=1e-11)
    res = _H_CACHE[k]
    return res.fx, res.x


def check_d_parameters(eta: float, delta: float, kappa: float, k: int, eps: float) -> None:
    _require(eta >= 1, "η ≥ 1", f"eta={eta}")
    _require(isinstance(k, (int, np.integer)) and k >= 1, "k ≥ 1 integer", f"k={k}")
    _require(0 < eps <= 0.25, "0 < ε ≤ 1/4", f"eps={eps}")
    _require(0 < kappa < eps / 2, "0 < κ < ε/2", f"kappa={kappa}, eps={eps}")
    _require(0 < delta < 2 / (8 * k + 3), "δ < 2/(8k+3)", f"delta={delta}, k={k}")


def _d_bracket(eta, delta, kappa, k, eps, hk, ops=DOUBLE):
    _, b1, b2 = _eta_formulas(eta, ops)
    c4 = _big_c(eta, delta, 4 * k, 4 * k, ops) ** (ops.num(1) / (4 * k))
    c2 = _big_c(eta, delta, 0, 2 * k, ops) ** (ops.num(1) / (2 * k))
    return (
        (b1 + ops.exp(-2 * eta)) * c4 * ops.sqrt(hk)
        + ops.num(3) / 2 * (1 + b1) * c2
        + b2 * c2 * (ops.num(5) / 4 - eps) / (delta * kappa)
        + ops.sqrt(ops.num("0.12")) + ops.num("0.53") + ops.sqrt(ops.num("0.58"))
    )


def d_bracket(eta: float, delta: float, kappa: float, k: int, eps: float, ops=DOUBLE) -> float:
    """The bracket whose 2k-th power over pi^(2k) is D."""
    check_d_parameters(eta, delta, kappa, k, eps)
    hk, _ = h_of_k(k)
    n = ops.num
    return float(_d_bracket(n(eta), n(delta), n(kappa), k, n(eps), n(hk), ops))


def big_d(eta: float, delta: float, kappa: float, k: int, eps: float, ops=DOUBLE) -> float:
    """D(eta, delta, kappa, k, eps), taken without the o(1) in (5/4 - eps)/(delta kappa)."""
    check_d_parameters(eta, delta, kappa, k, eps)
    hk, _ = h_of_k(k)
    n = ops.num
    br = _d_bracket(n(eta), n(delta), n(kappa), k, n(eps), n(hk), ops)
    return float((br / ops.pi) ** (2 * k))


def sqrt_d(eta: float, delta: float, kappa: float, k: int = 1, eps: float = 0.25, ops=DOUBLE) -> float:
    return math.sqrt(big_d(eta, delta, kappa, k, eps, ops))


def c0_pipeline(kappa: float, q: float, eta: float = DEFAULT_ETA, delta: float = DEFAULT_DELTA) -> float:
    """(2/pi) q^(3/88 - 1) + sqrt(D(eta, delta, kappa, 1, 1/4))."""
    _require(0 < kappa < 0.125, "0 < κ < 1/8", f"kappa={kappa}")
    _require(q >= 3, "q ≥ 3", f"q={q}")
    return 2 / math.pi * q ** (3 / 88 - 1) + math.sqrt(big_d(eta, delta, kappa, 1, 0.25))


# ---------------------------------------------------------------------------
# Zero-density coefficients
# ---------------------------------------------------------------------------


def _window_objective(u: float) -> float:
    return (1 + u) / math.sin(math.pi * u / (2 * (1 + u)))


def window_ratio() -> float:
    """u = 2a/tau minimizing (1+u)/sin(pi u/(2(1+u))) over 0 < u < 1; 0.82579..."""
    return minimize_scalar(_window_objective, 1e-3, 1.0, tol=1e-12).x


def zero_density_leading_coefficient(u: float | None = None) -> float:
    """Coefficient of kappa in C(kappa, a, b, tau) at 2 b kappa = 1 with the tau^-1 term dropped."""
    u = window_ratio() if u is None else u
    return MEAN_SQUARE_CONSTANT * math.e * (1 + u) / (math.pi**2 * math.sin(math.pi * u / (2 * (1 + u))))


@dataclass(frozen=True)
class ZeroDensityCoefficients:
    full: float
    simplified: float
    a: float
    b: float


def zero_density_coefficients(kappa: float, tau: float, u: float | None = None) -> ZeroDensityCoefficients:
    """C(kappa, a, b, tau) with b = 1/(2 kappa), a = u tau / 2, and 4.79 kappa + 4.12/(2 tau - 1.73/kappa)."""
    _require(0 < kappa <= 0.125, "0 < κ ≤ 1/8", f"kappa={kappa}")
    _require(tau >= ZERO_DENSITY_SHIFT / kappa, "τ ≥ 1.73/κ", f"tau={tau}, kappa={kappa}")
    _require(1.8258 * tau > math.pi / kappa, "1.8258τ > π/κ", f"tau={tau}, kappa={kappa}")
    u = window_ratio() if u is None else u
    b = 1 / (2 * kappa)
    a = u * tau / 2
    w = tau + 2 * a
    pre = MEAN_SQUARE_CONSTANT * math.exp(2 * b * kappa) / (2 * math.pi * b * math.sin(math.pi / 2 * 2 * a / w))
    full = pre * (w / (math.pi * tau) + 1 / (2 * (2 - math.pi / (kappa * w)) * kappa * tau))
    simplified = ZERO_DENSITY_LEAD * kappa + ZERO_DENSITY_SECOND / (2 * tau - ZERO_DENSITY_SHIFT / kappa)
    return ZeroDensityCoefficients(full, simplified, a, b)


def zero_density_bound(q: int, kappa: float, sigma: float, t1: float, t2: float, eps: float = 0.25) -> float:
    """Right side of the zero-density estimate for sum over chi of N(sigma; t1, t2; chi)."""
    lq = math.log(q)
    check_density_parameters(q, kappa, sigma, t1, t2, eps)
    tau = (t2 - t1) * lq
    coeff = ZERO_DENSITY_LEAD * kappa + ZERO_DENSITY_SECOND / (2 * tau - ZERO_DENSITY_SHIFT / kappa)
    return coeff * q ** (1 - 2 * kappa * (sigma - 0.5)) * tau


def check_density_parameters(q: int, kappa: float, sigma: float, t1: float, t2: float, eps: float = 0.25) -> None:
    lq = math.log(q)
    _require(0 < eps <= 0.25, "0 < ε ≤ 1/4", f"eps={eps}")
    _require(0 < kappa < eps / 2, "0 < κ < ε/2", f"kappa={kappa}, eps={eps}")
    _require(sigma >= 0.5 + 5 / (8 * kappa * lq), "σ ≥ 1/2 + 5/(8κ log q)",
             f"sigma={sigma}, need >= {0.5 + 5 / (8 * kappa * lq):.6g}")
    _require(t2 - t1 >= ZERO_DENSITY_SHIFT / (kappa * lq), "t₂ − t₁ ≥ 1.73/(κ log q)",
             f"t2-t1={t2 - t1:g}, need >= {ZERO_DENSITY_SHIFT / (kappa * lq):.6g}")
    cap = q ** (0.25 - eps)
    _require(max(abs(t1), abs(t2)) <= cap, "|t₁|, |t₂| ≤ q^(1/4−ε)", f"cap={cap:g}")


# ---------------------------------------------------------------------------
# Mean square and proportion
# ---------------------------------------------------------------------------


def cin(z: float) -> float:
    """Cin(z) = int_0^z (1 - cos w)/w dw."""
    if z < 0:
        raise DomainError("need z >= 0")
    if z < 0.5:
        total, term, k = 0.0, 1.0, 1
        while True:
            term_k = (-1) ** (k + 1) * z ** (2 * k) / (2 * k * math.factorial(2 * k))
            total += term_k
            if abs(term_k) < 1e-18:
                return total
            k += 1
    si, ci = special.sici(z)
    return EULER_GAMMA + math.log(z) - float(ci)


def sin_square_integral(upper: float) -> float:
    """int_0^Y sin(2 pi y)^2 / y dy = Cin(4 pi Y)/2."""
    if upper < 0:
        raise DomainError("need upper >= 0")
    return 0.5 * cin(4 * math.pi * upper)


def mean_square_bound(beta: float, c0: float = C0) -> float:
    """(2 C0 + (sqrt 2/pi) sqrt(int_0^{3 beta/50} sin(2 pi y)^2/y dy))^2."""
    if beta < 0:
        raise DomainError(f"need beta >= 0, got {beta}")
    if beta == 0:
        return float((2 * c0) ** 2)
    return (2 * c0 + math.sqrt(2) / math.pi * math.sqrt(sin_square_integral(3 * beta / 50))) ** 2


def proportion_lower_bound(beta: float, c0: float = C0) -> float:
    """(2 beta - 2 C0)^2 / (4 beta^2 - 8 C0 beta + mean_square_bound(beta))."""
    _require(beta > c0, "β > C₀ = 982", f"beta={beta}")
    num = (2 * beta - 2 * c0) ** 2
    return num / (num + (mean_square_bound(beta, c0) - 4 * c0**2))


# ---------------------------------------------------------------------------
# Parameter search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DOptimum:
    eta: float
    delta: float
    value: float
    grid_value: float
    evaluations: int


def _sqrt_d_grid(eta, delta, kappa: float, k: int, eps: float):
    hk, _ = h_of_k(k)
    br = _d_bracket(eta, delta, kappa, k, eps, hk)
    return (br / math.pi) ** k


def optimize_d_parameters(
    k: int = 1, eps: float = DEFAULT_EPS, kappa: float = DEFAULT_KAPPA,
    grid: tuple[int, int] = (100, 50), eta_range: tuple[float, float] = (1.0, 3.0),
) -> DOptimum:
    """Minimize sqrt(D) over (eta, delta): grid scan then Nelder-Mead refinement."""
    check_d_parameters(eta_range[0], 0.5 * 2 / (8 * k + 3), kappa, k, eps)
    dmax = 2 / (8 * k + 3)
    etas = np.linspace(eta_range[0], eta_range[1], grid[0])
    deltas = np.linspace(dmax / grid[1], dmax * (1 - 1e-3), grid[1])
    E, Dl = np.meshgrid(etas, deltas, indexing="ij")
    with np.errstate(over="ignore", invalid="ignore"):
        vals = _sqrt_d_grid(E, Dl, kappa, k, eps)
    vals = np.where(np.isfinite(vals), vals, np.inf)
    i, j = np.unravel_index(int(np.argmin(vals)), vals.shape)
    start = np.array([etas[i], deltas[j]])

    def obj(p):
        e, d = p
        if not (eta_range[0] <= e and 0 < d < dmax):
            return 1e300
        return float(_sqrt_d_grid(e, d, kappa, k, eps))

    res = optimize.minimize(obj, start, method="Nelder-Mead",
                            options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 4000})
    e, d = (float(v) for v in res.x)
    return DOptimum(e, d, float(res.fun), float(vals[i, j]), int(vals.size + res.nfev))


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantsReport:
    eta: float
    delta: float
    kappa: float
    k: int
    eps: float
    delta_star: float
    c_values: tuple
    f_value: float
    h_value: float
    d_value: float
    sqrt_d: float
    c0_bound: float
    q: float
    a: float
    b1: float
    b2: float
    density_lead: float
    density_second: float
    window_ratio: float
    mollifier_constant: float
    f_x_constant: float
    prime_zeta_tail: float
    a6: float
    precision: str
    notes: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        out = []

        def add(name, value, anchor, note):
            out.append({"name": name, "value": float(value), "anchor": anchor, "note": note})

        add("A", self.a, "", self.notes.get("eta", ""))
        add("B1", self.b1, "", self.notes.get("eta", ""))
        add("B2", self.b2, "", self.notes.get("eta", ""))
        for r, v, val in self.c_values:
            add(f"C(r={r:g},v={v:g})", val, "", "includes the 4.79/4.12 prefactor")
        add("f(eta,kappa,delta)", self.f_value, "", "2 kappa (4.79 + 4.12/(4e^(3 eta)/delta - 1.73))")
        add("h(k)", self.h_value, "6.390 (k=1)", f"minimizer Delta*={self.delta_star!r}")
        add("D", self.d_value, "", self.notes.get("D", ""))
        add("sqrt(D)", self.sqrt_d, "981.4 as kappa -> 1/8", self.notes.get("D", ""))
        add("c0_bound", self.c0_bound, "< 982", f"q={self.q:g}")
        add("density_lead", self.density_lead, "4.79", "leading coefficient at 2b kappa = 1")
        add("density_second", self.density_second, "4.12", "6.20 e / (2 pi sin(pi u/(2(1+u))))")
        add("window_ratio", self.window_ratio, "0.82579", "argmin of (1+u)/sin(pi u/(2(1+u)))")
        add("mollifier_constant", self.mollifier_constant, "6.199", "< 6.20")
        add("f_x_constant", self.f_x_constant, "< 8.68", "29136/3360")
        add("prime_zeta_tail", self.prime_zeta_tail, "< 0.53", "partial sum to l=500 plus 1/499+1/500")
        add("a6", self.a6, "< 0.58", "log 3 - (3/4) log 2")
        return out

    def meta(self) -> dict:
        return {
            "eta": self.eta, "delta": self.delta, "kappa": self.kappa, "k": self.k, "eps": self.eps,
            "delta_star": self.delta_star, "q": self.q, "precision": self.precision,
            "c0_bound": self.c0_bound, "notes": dict(self.notes),
        }

    def to_report(self) -> Report:
        return Report("constants", self.meta(), self.rows(), ("name", "value", "anchor", "note"))


def constants_report(
    eta: float = DEFAULT_ETA, delta: float = DEFAULT_DELTA, kappa: float = DEFAULT_KAPPA, k: int = 1,
    eps: float = DEFAULT_EPS, q: float = 1e9, c_entries=None, prec_bits: int | None = None,
) -> ConstantsReport:
    """All constants for one parameter block; ``prec_bits`` switches to mpmath."""
    check_d_parameters(eta, delta, kappa, k, eps)
    entries = c_entries if c_entries is not None else ((0, 2 * k), (4 * k, 4 * k))
    hk, dstar = h_of_k(k)

    def compute(ops):
        ec = eta_constants(eta, ops)
        cvals = tuple((float(r), float(v), big_c(eta, delta, r, v, ops)) for r, v in entries)
        d = big_d(eta, delta, kappa, k, eps, ops)
        return ec, cvals, d, mollifier_mean_constant(ops)

    if prec_bits is None:
        ec, cvals, d, mconst = compute(DOUBLE)
        precision = "double"
    else:
        with extended_precision(prec_bits) as ops:
            ec, cvals, d, mconst = compute(ops)
        precision = f"extended:{int(prec_bits)}"
    u = window_ratio()
    lead = zero_density_leading_coefficient(u)
    second = MEAN_SQUARE_CONSTANT * math.e / (2 * math.pi * math.sin(math.pi * u / (2 * (1 + u))))
    sd = math.sqrt(d)
    c0b = 2 / math.pi * q ** (3 / 88 - 1) + sd if (0 < kappa < 0.125 and q >= 3) else math.nan
    notes = {
        "eta": "closed forms in eta",
        "D": "(5/4 - eps)/(delta kappa) taken without its o(1); kappa < 1/8 strictly",
    }
    return ConstantsReport(
        eta, delta, kappa, int(k), eps, dstar, cvals, f_eta_kappa_delta(eta, kappa, delta), hk,
        d, sd, c0b, float(q), ec.A, ec.B1, ec.B2, lead, second, u, mconst,
        f_x_integral_constant(), prime_zeta_tail_constant(), a6_constant(), precision, notes,
    )
