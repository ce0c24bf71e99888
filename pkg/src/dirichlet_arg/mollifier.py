"""Mollifier coefficients, Moebius sums and the smoothed von Mangoldt weight."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .arith import EULER_GAMMA, CapacityError, SIEVE_CAPACITY, prime_divisors, sieve
from .characters import Character, CharacterFamily

DIRECT_LIMIT = 10**5


# ---------------------------------------------------------------------------
# lambda_n
# ---------------------------------------------------------------------------


def lambda_weight(u):
    """Weight of lambda_n as a function of u = log n / log xi (1 below u=1, linear to 0 at u=2)."""
    u = np.asarray(u, dtype=float)
    return np.where(u <= 1.0, 1.0, np.clip(2.0 - u, 0.0, None))


def _strict_cutoff(bound: float) -> int:
    """Largest integer n with n < bound."""
    n = math.ceil(bound) - 1
    return max(n, 0)


@dataclass(frozen=True, eq=False)
class MollifierTable:
    """Coefficients lambda_n(xi) for 1 <= n < xi^2; ``coefficients[n]`` (index 0 unused)."""

    xi: float
    coefficients: np.ndarray

    @property
    def size(self) -> int:
        return self.coefficients.size - 1

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, self.coefficients.size)

    def __getitem__(self, n: int) -> float:
        if not 1 <= n <= self.size:
            raise IndexError(n)
        return float(self.coefficients[n])


def build_mollifier(xi: float) -> MollifierTable:
    if xi < 2:
        raise ValueError(f"need xi >= 2, got {xi}")
    top = _strict_cutoff(xi * xi)
    if top > SIEVE_CAPACITY:
        raise CapacityError(f"xi^2 = {xi * xi:.4g} exceeds sieve capacity")
    mu = sieve(max(top, 1)).mobius[: top + 1].astype(float)
    n = np.arange(top + 1, dtype=float)
    lam = mu.copy()
    upper = n > xi
    lam[upper] = mu[upper] * np.log(xi * xi / n[upper]) / math.log(xi)
    lam[0] = 0.0
    lam.setflags(write=False)
    return MollifierTable(float(xi), lam)


# ---------------------------------------------------------------------------
# Moebius sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MSum:
    exact: float
    main_term: float


def m_ell_sum(ell: int, r: int, x: float) -> MSum:
    """M_ell(r, x) = sum_{n < x, (n, r) = 1} mu(n)/n log(x/n)^ell and its predicted main term."""
    if ell not in (1, 2):
        raise ValueError("ell must be 1 or 2")
    if x <= 1:
        raise ValueError("need x > 1")
    top = _strict_cutoff(x)
    if top > SIEVE_CAPACITY:
        raise CapacityError(f"x = {x} exceeds sieve capacity")
    tables = sieve(max(top, 1))
    ps = prime_divisors(r, tables if r <= tables.limit else None)
    n = np.arange(1, top + 1)
    mu = tables.mobius[1 : top + 1].astype(float)
    keep = np.ones(top, dtype=bool)
    for p in ps:
        keep[p - 1 :: p] = False
    terms = mu[keep] / n[keep] * np.log(x / n[keep]) ** ell
    exact = math.fsum(terms)
    euler = 1.0
    shift = 0.0
    for p in ps:
        euler /= 1.0 - 1.0 / p
        shift += math.log(p) / (p - 1)
    main = math.factorial(ell) * (math.log(x) - EULER_GAMMA - shift) ** (ell - 1) * euler
    return MSum(exact, main)


# ---------------------------------------------------------------------------
# gcd double sums
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GcdSums:
    s_gcd: float
    s_log_n: float
    s_log_gcd: float
    method: str


@numba.njit(cache=True)
def _direct_rows(idx, coef, logs, log_table, spf):
    # Row-wise partial sums over n2 > n1, the diagonal and the symmetric
    # half folded in.  For squarefree a, gcd(a, b) = g[b mod a] where g is a
    # per-row table built from the primes of a.
    m = idx.size
    rows = np.zeros((m, 3))
    g = np.ones(idx[m - 1] + 1, dtype=np.int64)
    for i in range(m):
        a = idx[i]
        ci = coef[i]
        g[:a] = 1
        rest = a
        while rest > 1:
            p = spf[rest]
            for r in range(0, a, p):
                g[r] *= p
            rest //= p
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        for j in range(i + 1, m):
            x = g[idx[j] % a]
            w = coef[j] * x
            s0 += w
            s1 += w * logs[j]
            s2 += w * log_table[x]
        diag = ci * a
        rows[i, 0] = ci * (diag + 2.0 * s0)
        rows[i, 1] = ci * (diag * logs[i] + logs[i] * s0 + s1)
        rows[i, 2] = ci * (diag * log_table[a] + 2.0 * s2)
    return rows


def _gcd_direct(table: MollifierTable) -> GcdSums:
    lam = table.coefficients
    idx = np.nonzero(lam)[0].astype(np.int64)
    coef = lam[idx] / idx
    logs = np.log(idx.astype(float))
    log_table = np.log(np.maximum(np.arange(table.size + 1, dtype=float), 1.0))
    spf = sieve(max(table.size, 1)).smallest_prime_factor.astype(np.int64)
    rows = _direct_rows(idx, coef, logs, log_table, spf)
    return GcdSums(*(math.fsum(rows[:, c]) for c in range(3)), method="direct")


def divisor_sums(values: np.ndarray) -> np.ndarray:
    """T[r] = sum over multiples n of r (n < len(values)) of values[n]; T[0] = 0."""
    size = values.size
    top = size - 1
    out = np.zeros(size, dtype=values.dtype)
    if top < 1:
        return out
    split = max(1, math.isqrt(top))
    for r in range(1, split + 1):
        out[r] = values[r::r].sum()
    # r > split: the multiples are r*m with m <= top // (split + 1)
    for m in range(1, top // (split + 1) + 1):
        hi = top // m
        if hi <= split:
            break
        out[split + 1 : hi + 1] += values[m * (split + 1) : m * hi + 1 : m]
    return out


def _gcd_rearranged(table: MollifierTable) -> GcdSums:
    lam = table.coefficients
    top = table.size
    n = np.arange(top + 1, dtype=float)
    n[0] = 1.0
    c = lam / n
    t = divisor_sums(c)
    t_log = divisor_sums(c * np.log(n))
    tables = sieve(max(top, 1))
    phi = tables.totient[: top + 1].astype(float)
    phi_p = phi_prime_table(top)
    s_gcd = math.fsum(phi[1:] * t[1:] ** 2)
    s_log_n = math.fsum(phi[1:] * t[1:] * t_log[1:])
    s_log_gcd = math.fsum(phi_p[1:] * t[1:] ** 2)
    return GcdSums(s_gcd, s_log_n, s_log_gcd, method="rearranged")


def gcd_double_sums(xi: float, method: str = "auto") -> GcdSums:
    """The three lambda-weighted gcd double sums over n1, n2 < xi^2.

    ``method`` is "direct" (pairwise gcd loop), "rearranged" (sum over r of
    phi(r) or phi'(r) times squared divisor sums) or "auto".
    """
    table = build_mollifier(xi)
    if method == "auto":
        method = "direct" if table.size <= DIRECT_LIMIT else "rearranged"
    if method == "direct":
        if table.size > DIRECT_LIMIT:
            raise CapacityError(f"direct double loop limited to xi^2 <= {DIRECT_LIMIT}")
        return _gcd_direct(table)
    if method == "rearranged":
        return _gcd_rearranged(table)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# phi'
# ---------------------------------------------------------------------------


def phi_prime(r: int, form: str = "closed") -> float:
    """phi'(r) = r sum_{d|r} mu(d)/d log(r/d), by the closed form or the definition."""
    if r < 1:
        raise ValueError("r must be positive")
    if form == "closed":
        ps = prime_divisors(r)
        phi = r
        for p in ps:
            phi = phi // p * (p - 1)
        return phi * (math.log(r) + sum(math.log(p) / (p - 1) for p in ps))
    if form == "definition":
        ps = prime_divisors(r)
        total = []
        for mask in range(1 << len(ps)):
            d = 1
            sign = 1
            for i, p in enumerate(ps):
                if mask >> i & 1:
                    d *= p
                    sign = -sign
            m = r // d
            total.append(sign * m * math.log(m))
        return math.fsum(total)
    raise ValueError(f"unknown form {form!r}")


def phi_prime_table(limit: int, form: str = "closed") -> np.ndarray:
    """phi'(r) for r = 0..limit (entry 0 is 0)."""
    out = np.zeros(limit + 1)
    if limit < 1:
        return out
    tables = sieve(limit)
    r = np.arange(limit + 1, dtype=float)
    if form == "closed":
        shift = np.zeros(limit + 1)
        for p in tables.primes:
            shift[p::p] += math.log(p) / (p - 1)
        out[1:] = tables.totient[1:] * (np.log(r[1:]) + shift[1:])
        return out
    if form == "definition":
        mu = tables.mobius
        for d in np.nonzero(mu[: limit + 1])[0]:
            if d == 0:
                continue
            m = np.arange(1, limit // d + 1, dtype=float)
            out[d::d] += mu[d] * m * np.log(m)
        return out
    raise ValueError(f"unknown form {form!r}")


# ---------------------------------------------------------------------------
# psi(s, chi)
# ---------------------------------------------------------------------------


def _powers(n: np.ndarray, s: complex) -> np.ndarray:
    return np.exp(-complex(s) * np.log(n))


def psi_value(s: complex, character: Character, table: MollifierTable) -> complex:
    """psi(s, chi) = sum_{n < xi^2} lambda_n chi(n) n^-s."""
    n = table.n
    terms = table.coefficients[1:] * character(n) * _powers(n.astype(float), s)
    return complex(np.sum(terms))


def psi_values(s: complex, family: CharacterFamily, table: MollifierTable) -> np.ndarray:
    """psi(s, chi_j) for every character of the family (one FFT)."""
    n = table.n
    return family.character_sums(n, table.coefficients[1:] * _powers(n.astype(float), s))


# ---------------------------------------------------------------------------
# Lambda_x
# ---------------------------------------------------------------------------


def smoothed_weight(u):
    """Lambda_x(n) / Lambda(n) as a function of u = log n / log x."""
    u = np.asarray(u, dtype=float)
    mid = ((3.0 - u) ** 2 - 2.0 * (2.0 - u) ** 2) / 2.0
    high = (3.0 - u) ** 2 / 2.0
    return np.where(u <= 1.0, 1.0, np.where(u <= 2.0, mid, np.where(u < 3.0, high, 0.0)))


def smoothed_lambda(n: int, x: float) -> float:
    if n < 1:
        raise ValueError("n must be >= 1")
    if x < 2:
        raise ValueError("need x >= 2")
    if n >= x**3:
        return 0.0
    lam = _von_mangoldt(n)
    if lam == 0.0:
        return 0.0
    return lam * float(smoothed_weight(math.log(n) / math.log(x)))


def _von_mangoldt(n: int) -> float:
    if n < 2:
        return 0.0
    ps = prime_divisors(n)
    return math.log(ps[0]) if len(ps) == 1 else 0.0


@dataclass(frozen=True, eq=False)
class SmoothedVonMangoldt:
    """Lambda_x(n) on the prime powers n < x^3 (all other n carry weight 0)."""

    x: float
    n: np.ndarray
    values: np.ndarray

    def __call__(self, n: int) -> float:
        i = np.searchsorted(self.n, n)
        if i < self.n.size and self.n[i] == n:
            return float(self.values[i])
        return 0.0


def smoothed_lambda_table(x: float) -> SmoothedVonMangoldt:
    if x < 2:
        raise ValueError("need x >= 2")
    top = _strict_cutoff(x**3)
    if top > SIEVE_CAPACITY:
        raise CapacityError(f"x^3 = {x**3:.4g} exceeds sieve capacity")
    tables = sieve(max(top, 2))
    lam = tables.von_mangoldt[: top + 1]
    n = np.nonzero(lam)[0]
    w = smoothed_weight(np.log(n) / math.log(x))
    vals = lam[n] * w
    keep = vals > 0
    n, vals = n[keep], vals[keep]
    n.setflags(write=False)
    vals.setflags(write=False)
    return SmoothedVonMangoldt(float(x), n, vals)


# ---------------------------------------------------------------------------
# sum mu^2/phi
# ---------------------------------------------------------------------------


def prime_log_constant(prime_limit: int = 10**7) -> float:
    """sum_p log p / (p (p - 1)) from a partial sum plus the tail log(P/(P-1))."""
    p = sieve(prime_limit).primes.astype(float)
    partial = math.fsum(np.log(p) / (p * (p - 1.0)))
    return partial + math.log(prime_limit / (prime_limit - 1.0))


@dataclass(frozen=True)
class TotientSum:
    exact: float
    asymptotic: float


def totient_reciprocal_sum(x: float) -> TotientSum:
    """sum_{r <= x} mu(r)^2 / phi(r) and log x + gamma + sum_p log p/(p(p-1))."""
    if x < 1:
        raise ValueError("need x >= 1")
    top = int(math.floor(x))
    if top > SIEVE_CAPACITY:
        raise CapacityError(f"x = {x} exceeds sieve capacity")
    tables = sieve(max(top, 1))
    mu2 = tables.mobius[1 : top + 1].astype(float) ** 2
    exact = math.fsum(mu2 / tables.totient[1 : top + 1])
    return TotientSum(exact, math.log(x) + EULER_GAMMA + prime_log_constant())
