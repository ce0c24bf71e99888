"""Arithmetic tables and the special-function kernel.

Everything here is a pure function of its inputs.  Sieved tables are cached
and returned read-only, so they can be shared freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

EULER_GAMMA = 0.57721566490153286061

SIEVE_CAPACITY = 10**8


class CapacityError(ValueError):
    """Requested table exceeds what the sieve is allowed to build."""


class DivergenceError(ValueError):
    """Series or integral diverges at the requested parameters."""


class DomainError(ValueError):
    """Argument outside the function's domain."""


# ---------------------------------------------------------------------------
# Sieve
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SievedTables:
    """Multiplicative tables for 1..limit.

    Arrays are indexed by n directly; index 0 is padding.
    """

    limit: int
    mobius: np.ndarray
    von_mangoldt: np.ndarray
    totient: np.ndarray
    smallest_prime_factor: np.ndarray

    primes: np.ndarray

    def is_prime(self, n: int) -> bool:
        return n >= 2 and int(self.smallest_prime_factor[n]) == n


def _spf_table(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64 if limit > 2**31 - 1 else np.int32)
    root = math.isqrt(limit)
    for p in range(2, root + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    n = np.arange(limit + 1, dtype=spf.dtype)
    unset = spf == 0
    spf[unset] = n[unset]
    spf[0] = 0
    spf[1] = 1
    return spf


@lru_cache(maxsize=4)
def sieve(limit: int) -> SievedTables:
    """Möbius, von Mangoldt, totient and smallest-prime-factor tables up to ``limit``."""
    limit = int(limit)
    if limit < 1 or limit > SIEVE_CAPACITY:
        raise CapacityError(f"sieve limit must satisfy 1 <= limit <= {SIEVE_CAPACITY}, got {limit}")
    spf = _spf_table(limit)
    mobius = np.zeros(limit + 1, dtype=np.int8)
    totient = np.zeros(limit + 1, dtype=np.int64)
    lam = np.zeros(limit + 1, dtype=np.float64)
    mobius[1] = 1
    totient[1] = 1
    # n / spf(n) <= n / 2, so processing dyadic blocks in order only reads finished entries.
    lo = 2
    while lo <= limit:
        hi = min(2 * lo - 1, limit)
        n = np.arange(lo, hi + 1)
        p = spf[lo : hi + 1].astype(np.int64)
        m = n // p
        repeated = spf[m] == p
        mobius[lo : hi + 1] = np.where(repeated, 0, -mobius[m])
        totient[lo : hi + 1] = totient[m] * np.where(repeated, p, p - 1)
        prime_power = (m == 1) | (repeated & (lam[m] > 0))
        lam[lo : hi + 1] = np.where(prime_power, np.log(p), 0.0)
        lo = hi + 1
    primes = np.nonzero(spf == np.arange(limit + 1))[0][2:]
    for arr in (spf, mobius, totient, lam, primes):
        arr.setflags(write=False)
    return SievedTables(limit, mobius, lam, totient, spf, primes)


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; independent of the sieve."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_divisors(n: int, tables: SievedTables | None = None) -> list[int]:
    if tables is not None and n <= tables.limit:
        out = []
        spf = tables.smallest_prime_factor
        while n > 1:
            p = int(spf[n])
            out.append(p)
            while n % p == 0:
                n //= p
        return out
    return sorted(factorize(n))


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


# ---------------------------------------------------------------------------
# Prime zeta
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrimeZetaBounds:
    lower: float
    upper: float

    @property
    def value(self) -> float:
        return self.upper


def prime_zeta_bounds(s: float, prime_limit: int = 10**6) -> PrimeZetaBounds:
    """Enclosure of sum_p p^-s from a partial sum over p <= prime_limit.

    The tail over p > P is at most the tail of sum_n n^-s, i.e. the
    integral P^(1-s)/(s-1).
    """
    if s <= 1:
        raise DivergenceError(f"prime zeta diverges for s <= 1 (s={s})")
    if prime_limit < 2:
        raise DomainError("prime_limit must be >= 2")
    primes = sieve(int(prime_limit)).primes.astype(np.float64)
    partial = float(np.sum(np.exp(-s * np.log(primes[::-1]))))
    tail = math.exp((1.0 - s) * math.log(prime_limit)) / (s - 1.0)
    return PrimeZetaBounds(partial, partial + tail)


def prime_zeta(s: float, prime_limit: int = 10**6) -> float:
    """Upper bound for the prime zeta function (partial sum plus tail bound)."""
    return prime_zeta_bounds(s, prime_limit).upper


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------


def upper_incomplete_gamma(v: float, u: float) -> float:
    """Gamma(v, u) = int_u^inf z^(v-1) e^-z dz for v >= 0, u >= 0."""
    if v < 0 or u < 0:
        raise DomainError(f"need v >= 0 and u >= 0, got v={v}, u={u}")
    if v == 0:
        if u == 0:
            raise DivergenceError("Gamma(0, 0) diverges")
        return float(special.exp1(u))
    if u == 0:
        return float(special.gamma(v))
    return float(special.gammaincc(v, u) * special.gamma(v))


_EM_TERMS = 12
_BERNOULLI = special.bernoulli(2 * _EM_TERMS)
# B_{2j} / (2j)! for j = 1..12
_EM_COEFFS = np.array(
    [_BERNOULLI[2 * j] / math.factorial(2 * j) for j in range(1, _EM_TERMS + 1)]
)


def _em_cutoff(s: complex) -> int:
    return max(20, math.ceil(2 * abs(s.imag)), math.ceil(abs(s)))


def hurwitz_zeta_array(s: complex, a: np.ndarray, want_derivative: bool = False,
                        drop_pole: bool = False):
    """Euler-Maclaurin Hurwitz zeta for a vector of shifts ``a`` at one ``s``.

    Returns zeta(s, a) (and d/ds zeta(s, a) when asked) as complex arrays.
    The formula is an analytic continuation, so it stays valid for
    Re(s) > 1 - 2*12 as long as s != 1; callers keep Re(s) >= -2.

    With ``drop_pole`` the constant 1/(s-1) is removed from every entry, which
    leaves a function analytic at s = 1 (used when the shifts are combined
    with weights summing to zero).
    """
    s = complex(s)
    a = np.asarray(a, dtype=np.float64)
    n_terms = _em_cutoff(s)
    k = np.arange(n_terms, dtype=np.float64)
    logs = np.log(a[:, None] + k[None, :])
    terms = np.exp(-s * logs)
    head = terms.sum(axis=1)
    w = a + n_terms
    logw = np.log(w)
    w_s = np.exp(-s * logw)
    if drop_pole:
        pole, dpole = _pole_free_tail(s, logw, want_derivative)
    else:
        pole = w * w_s / (s - 1.0)
        dpole = -logw * pole - pole / (s - 1.0) if want_derivative else None
    tail = pole + 0.5 * w_s
    # poch = s (s+1) ... (s+2j-2), power = w^(-s-2j+1)
    poch = s
    dpoch = 1.0 + 0j  # d/ds of poch
    power = w_s / w
    corr = np.zeros_like(head)
    dcorr = np.zeros_like(head)
    for j in range(_EM_TERMS):
        c = _EM_COEFFS[j]
        corr += c * poch * power
        if want_derivative:
            dcorr += c * (dpoch - poch * logw) * power
        # advance to j+1: multiply poch by (s+2j+1)(s+2j+2)... careful with indices
        f1 = s + 2 * j + 1
        f2 = s + 2 * j + 2
        if want_derivative:
            dpoch = dpoch * f1 * f2 + poch * (f1 + f2)
        poch = poch * f1 * f2
        power = power / (w * w)
    value = head + tail + corr
    if not want_derivative:
        return value
    dhead = -(logs * terms).sum(axis=1)
    dtail = dpole - 0.5 * logw * w_s
    return value, dhead + dtail + dcorr


def _pole_free_tail(s: complex, logw: np.ndarray, want_derivative: bool):
    """(w^(1-s) - 1)/(s - 1) and its s-derivative, stable near s = 1."""
    h = s - 1.0
    if abs(h) > 1e-3:
        val = np.expm1(-h * logw) / h
        if not want_derivative:
            return val, None
        return val, (-logw * np.exp(-h * logw) - val) / h
    x = -logw
    val = np.zeros_like(logw, dtype=complex)
    dval = np.zeros_like(val)
    term = np.ones_like(val)  # x^k h^(k-1) / k! built incrementally
    for k in range(1, 16):
        term = term * x / k
        val += term * h ** (k - 1)
        if k >= 2:
            dval += (k - 1) * term * h ** (k - 2)
    return val, dval


def hurwitz_zeta(s: complex, a: float, want_derivative: bool = False):
    """Hurwitz zeta(s, a) for 0 < a <= 1, with optional s-derivative."""
    s = complex(s)
    if s == 1:
        raise DivergenceError("Hurwitz zeta has a pole at s = 1")
    if not 0 < a <= 1:
        raise DomainError(f"shift a must lie in (0, 1], got {a}")
    if s.real <= -2:
        raise DomainError("Hurwitz zeta evaluated only for Re(s) > -2")
    out = hurwitz_zeta_array(s, np.array([a]), want_derivative)
    if want_derivative:
        return complex(out[0][0]), complex(out[1][0])
    return complex(out[0])


_PSI_SHIFT = 15.0
_PSI_COEFFS = [_BERNOULLI[2 * j] / (2 * j) for j in range(1, 11)]


def digamma(z: complex) -> complex:
    """Gamma'/Gamma for Re(z) > 0 by upward recurrence and the asymptotic series."""
    z = complex(z)
    if z.real <= 0:
        raise DomainError(f"digamma implemented for Re(z) > 0 only, got {z}")
    acc = 0j
    while z.real < _PSI_SHIFT:
        acc -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0j
    p = inv2
    for c in _PSI_COEFFS:
        series += c * p
        p *= inv2
    return acc + np.log(z) - 0.5 / z - series


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (non-negative half).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_WEIGHTS_FULL = np.zeros(15)
_gauss_pos = [1, 3, 5, 7]  # positions in _XGK carrying Gauss nodes
for _i, _w in zip(_gauss_pos, _WG):
    _G_WEIGHTS_FULL[_i] = _w
    _G_WEIGHTS_FULL[14 - _i] = _w
G_WEIGHTS = _G_WEIGHTS_FULL


@dataclass(frozen=True)
class Quadrature:
    scheme: str = "gk15"
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_depth: int = 60
    max_intervals: int = 50_000
    stall_rounds: int = 4

    def __post_init__(self):
        if self.scheme != "gk15":
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


@dataclass(frozen=True)
class QuadResult:
    value: complex | float
    error: float
    converged: bool
    evaluations: int
    intervals: int


def _gk_batch(f, lo: np.ndarray, hi: np.ndarray):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = mid[:, None] + half[:, None] * GK_NODES[None, :]
    y = np.asarray(f(x.ravel())).reshape(x.shape)
    k = half * (y @ GK_WEIGHTS)
    g = half * (y @ G_WEIGHTS)
    return k, np.abs(k - g)


def _transform(f, a: float, b: float):
    """Map (semi-)infinite intervals onto finite ones."""
    if math.isinf(a) and math.isinf(b):
        def g(u):
            x = u / (1.0 - u * u)
            return f(x) * (1.0 + u * u) / (1.0 - u * u) ** 2
        return g, -1.0, 1.0
    if math.isinf(b):
        def g(u):
            x = a + u / (1.0 - u)
            return f(x) / (1.0 - u) ** 2
        return g, 0.0, 1.0
    if math.isinf(a):
        def g(u):
            x = b - (1.0 - u) / u
            return f(x) / (u * u)
        return g, 0.0, 1.0
    return f, a, b


def integrate(f, a: float, b: float, quad: Quadrature = Quadrature(), points=()) -> QuadResult:
    """Globally adaptive Gauss-Kronrod quadrature of a vectorized ``f``.

    ``f`` must accept a 1-d numpy array and return values of the same shape
    (real or complex).  Infinite endpoints are handled by a rational change of
    variables.  ``points`` are interior breakpoints (finite intervals only).
    Each round bisects every interval whose error estimate exceeds an equal
    share of the tolerance; the loop stops once the summed estimate is below
    max(abs_tol, rel_tol * |I|), or unconverged when the estimate stalls.
    """
    if a == b:
        return QuadResult(0.0, 0.0, True, 0, 0)
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    g, lo0, hi0 = _transform(f, a, b)
    edges = [lo0] + sorted(p for p in points if lo0 < p < hi0) + [hi0]
    lo = np.array(edges[:-1], dtype=np.float64)
    hi = np.array(edges[1:], dtype=np.float64)
    vals, errs = _gk_batch(g, lo, hi)
    evals = 15 * lo.size
    converged = False
    best, stalled = math.inf, 0
    for _ in range(quad.max_depth):
        total = vals.sum()
        err = float(errs.sum())
        tol = max(quad.abs_tol, quad.rel_tol * abs(total))
        if err <= tol:
            converged = True
            break
        # roundoff floor: the estimate stops shrinking under bisection
        if err < 0.5 * best:
            best, stalled = err, 0
        else:
            stalled += 1
            if stalled >= quad.stall_rounds:
                break
        split = (errs > tol / lo.size) & (hi - lo > 1e-15 * max(1.0, abs(lo0), abs(hi0)))
        if not np.any(split) or lo.size + split.sum() > quad.max_intervals:
            break
        keep = ~split
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        v2, e2 = _gk_batch(g, new_lo, new_hi)
        evals += 15 * new_lo.size
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        vals = np.concatenate([vals[keep], v2])
        errs = np.concatenate([errs[keep], e2])
    total = vals.sum()
    err = float(errs.sum())
    value = complex(total) if np.iscomplexobj(total) else float(total)
    return QuadResult(sign * value, err, converged, evals, int(lo.size))
