"""Dirichlet characters modulo a prime, Gauss sums and a prime-sum moment.

Characters are indexed through a discrete logarithm to a primitive root g:
chi_j(g^m) = exp(2 pi i j m / (q - 1)).  Values are kept as integer exponents
mod q - 1 and only turned into complex numbers at the point of use.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .arith import DomainError, factorize, sieve

MAX_MODULUS = 10**5
TABLE_LIMIT = 5000


class PreconditionError(ValueError):
    """Inputs violate a stated hypothesis."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def primitive_root(q: int) -> int:
    """Smallest primitive root of the prime q."""
    if q == 2:
        return 1
    cofactors = [(q - 1) // p for p in factorize(q - 1)]
    for g in range(2, q):
        if all(pow(g, c, q) != 1 for c in cofactors):
            return g
    raise DomainError(f"no primitive root mod {q}")


def unit_roots(numerators: np.ndarray, order: int) -> np.ndarray:
    """exp(2 pi i r / order) with exact values where r/order is a multiple of 1/4."""
    r = np.asarray(numerators) % order
    out = np.exp(2j * np.pi * r / order)
    quarter = (4 * r) % order == 0
    if np.any(quarter):
        exact = np.array([1, 1j, -1, -1j])
        out[quarter] = exact[(4 * r[quarter]) // order]
    return out


@dataclass(frozen=True, eq=False)
class CharacterFamily:
    """All q - 1 Dirichlet characters modulo a prime q.

    ``dlog[a]`` is the discrete log of a to base ``generator`` (``dlog[0] = -1``);
    ``powers[m] = generator**m mod q``.
    """

    q: int
    generator: int
    dlog: np.ndarray
    powers: np.ndarray
    parity: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return self.q - 1

    @property
    def indices(self) -> range:
        return range(self.q - 1)

    @property
    def nonprincipal(self) -> range:
        return range(1, self.q - 1)

    def conj_index(self, j: int) -> int:
        return (-j) % (self.q - 1)

    def is_real(self, j: int) -> bool:
        return (2 * j) % (self.q - 1) == 0

    def exponents(self, j: int, n) -> np.ndarray:
        """Exponent e with chi_j(n) = exp(2 pi i e/(q-1)); -1 where q | n."""
        d = self.dlog[np.asarray(n) % self.q]
        return np.where(d < 0, -1, (j * d) % (self.q - 1))

    def value(self, j: int, n) -> np.ndarray | complex:
        """chi_j(n) for an integer or integer array n."""
        scalar = np.ndim(n) == 0
        e = self.exponents(j, np.atleast_1d(n))
        out = np.where(e < 0, 0.0, unit_roots(np.maximum(e, 0), self.q - 1))
        return complex(out[0]) if scalar else out

    def residue_values(self, j: int) -> np.ndarray:
        """chi_j(a) for a = 0..q-1."""
        return self.value(j, np.arange(self.q))

    def value_table(self) -> np.ndarray:
        """(q-1) x (q-1) table: row j, column a-1 holds chi_j(a)."""
        if self.q > TABLE_LIMIT:
            raise DomainError(f"full value table only built for q <= {TABLE_LIMIT}")
        j = np.arange(self.q - 1)[:, None]
        d = self.dlog[1:][None, :]
        return unit_roots(j * d, self.q - 1)

    def character(self, j: int) -> "Character":
        if not 0 <= j < self.q - 1:
            raise DomainError(f"character index must lie in [0, {self.q - 2}]")
        return Character(self, j)

    def characters(self, include_principal: bool = False) -> list["Character"]:
        start = 0 if include_principal else 1
        return [Character(self, j) for j in range(start, self.q - 1)]

    def sums_by_residue(self, residue_weights: np.ndarray) -> np.ndarray:
        """For weights w[a] (a = 0..q-1), return sum_a w[a] chi_j(a) for every j.

        One FFT over the cyclic group; the a = 0 entry is ignored.
        """
        w = np.asarray(residue_weights)
        x = w[self.powers]
        return (self.q - 1) * np.fft.ifft(x)

    def character_sums(self, n: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
        """sum_n c_n chi_j(n) for every character j (length q - 1 array)."""
        n = np.asarray(n)
        coeffs = np.asarray(coeffs)
        bins = np.zeros(self.q, dtype=np.complex128)
        np.add.at(bins, n % self.q, coeffs)
        bins[0] = 0.0
        return self.sums_by_residue(bins)


@dataclass(frozen=True)
class Character:
    family: CharacterFamily
    index: int

    @property
    def q(self) -> int:
        return self.family.q

    @property
    def parity(self) -> int:
        return int(self.family.parity[self.index])

    @property
    def is_principal(self) -> bool:
        return self.index == 0

    @property
    def is_real(self) -> bool:
        return self.family.is_real(self.index)

    def conj(self) -> "Character":
        return Character(self.family, self.family.conj_index(self.index))

    def __call__(self, n):
        return self.family.value(self.index, n)

    def residue_values(self) -> np.ndarray:
        return self.family.residue_values(self.index)


def build_family(q: int) -> CharacterFamily:
    q = int(q)
    if q < 3 or q > MAX_MODULUS or not is_prime(q):
        raise DomainError(f"modulus must be an odd prime <= {MAX_MODULUS}, got {q}")
    g = primitive_root(q)
    powers = np.empty(q - 1, dtype=np.int64)
    acc = 1
    for m in range(q - 1):
        powers[m] = acc
        acc = acc * g % q
    dlog = np.full(q, -1, dtype=np.int64)
    dlog[powers] = np.arange(q - 1)
    # chi_j(-1) = exp(pi i j), so parity is j mod 2
    parity = (np.arange(q - 1) % 2).astype(np.int8)
    for arr in (powers, dlog, parity):
        arr.setflags(write=False)
    return CharacterFamily(q, g, dlog, powers, parity)


@dataclass(frozen=True)
class GaussData:
    tau: complex
    epsilon: complex


def gauss_sums(family: CharacterFamily) -> np.ndarray:
    """tau(chi_j) for every j, via one FFT (entry 0 is the principal sum, -1)."""
    a = np.arange(family.q)
    return family.sums_by_residue(np.exp(2j * np.pi * a / family.q))


def root_numbers(family: CharacterFamily) -> np.ndarray:
    """epsilon(chi_j) = tau / (i^a sqrt q); entry 0 is meaningless and set to nan."""
    tau = gauss_sums(family)
    i_pow = np.where(family.parity == 1, 1j, 1.0)
    eps = tau / (i_pow * math.sqrt(family.q))
    eps[0] = np.nan
    return eps


def gauss_sum(family: CharacterFamily, j: int) -> GaussData:
    if j % (family.q - 1) == 0:
        raise DomainError("Gauss data is only provided for non-principal characters")
    chi = family.residue_values(j)
    a = np.arange(family.q)
    tau = complex(np.sum(chi * np.exp(2j * np.pi * a / family.q)))
    i_pow = 1j if family.parity[j] else 1.0
    return GaussData(tau, tau / (i_pow * math.sqrt(family.q)))


@dataclass(frozen=True)
class MomentResult:
    """``rhs`` is (sum |a_p|^2 p^-2sigma)^k; ``rhs_factorial`` is k! times it.

    For k >= 2 the multinomial multiplicities of the k-th power can push the
    average above ``rhs``.  Even for k = 1 the average equals
    (q-1)/(q-2) * rhs - |principal sum|^2/(q-2), which exceeds ``rhs`` whenever
    the principal sum is small.  ``rhs_corrected`` = (q-1)/(q-2) * k! * rhs
    dominates for every coefficient sequence once y^k <= q.
    """

    lhs: float
    rhs: float
    rhs_factorial: float
    rhs_corrected: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def holds_factorial(self) -> bool:
        return self.lhs <= self.rhs_factorial

    @property
    def holds_corrected(self) -> bool:
        # relative slack absorbs roundoff in the equality cases
        return self.lhs <= self.rhs_corrected * (1 + 1e-12)


def _prime_tuples(primes: np.ndarray, coeffs: np.ndarray, k: int):
    idx = np.array(list(itertools.product(range(primes.size), repeat=k)), dtype=np.int64)
    if idx.size == 0:
        return np.zeros(0, dtype=object), np.zeros(0, dtype=np.complex128)
    n = np.prod(primes[idx].astype(object), axis=1)
    a = np.prod(coeffs[idx], axis=1)
    return n, a


def twisted_prime_moment(
    family: CharacterFamily,
    coefficients,
    sigma: float,
    k: int = 1,
    ell: int = 1,
    y: float | None = None,
) -> MomentResult:
    """Average over non-principal chi of |sum_{p<=y} a_p chi(p^ell) p^-sigma|^(2k).

    ``coefficients`` is either a mapping prime -> a_p or a sequence aligned
    with the primes up to y.  The average is evaluated through orthogonality:
    sum_chi |S|^2k = (q-1) * (pairs of k-tuples with congruent products)
    - |principal sum|^2, with each pair weight formed as (n n')^-sigma so that
    single-prime inputs come out exact.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if ell not in (1, 2):
        raise PreconditionError("power ell must be 1 or 2")
    q = family.q
    if isinstance(coefficients, dict):
        primes = np.array(sorted(coefficients), dtype=np.int64)
        coeffs = np.array([coefficients[p] for p in primes], dtype=np.complex128)
        if y is None:
            y = float(primes.max()) if primes.size else 2.0
        if primes.size and primes.max() > y:
            raise PreconditionError("coefficient supplied for a prime above y")
    else:
        if y is None:
            raise PreconditionError("y is required when coefficients are a sequence")
        primes = sieve(max(2, int(y))).primes.astype(np.int64)
        coeffs = np.asarray(coefficients, dtype=np.complex128)
        if coeffs.size != primes.size:
            raise PreconditionError(f"expected {primes.size} coefficients for primes <= {y}")
    if y < 2:
        raise PreconditionError("need y >= 2")
    if y > q ** (1.0 / k) * (1 + 1e-12):
        raise PreconditionError(f"need y <= q^(1/k): y={y}, q={q}, k={k}")
    keep = primes % q != 0
    primes, coeffs = primes[keep], coeffs[keep]
    rhs = float(np.sum((coeffs * coeffs.conj()).real * np.power(primes.astype(float), -2.0 * sigma))) ** k
    rhs_k = math.factorial(k) * rhs
    corrected = (q - 1) / (q - 2) * rhs_k
    n, a = _prime_tuples(primes, coeffs, k)
    if n.size == 0:
        return MomentResult(0.0, rhs, rhs_k, corrected)
    residues = np.array([pow(int(v), ell, q) for v in n], dtype=np.int64)
    nf = np.array([float(v) for v in n])
    order = np.argsort(residues, kind="stable")
    residues, nf, a = residues[order], nf[order], a[order]
    same = 0.0
    total = 0.0
    for chunk in range(0, nf.size, 512):
        sl = slice(chunk, chunk + 512)
        w = np.power(np.outer(nf[sl], nf), -sigma) * np.outer(a[sl], a.conj()).real
        total += float(w.sum())
        same += float(w[residues[sl][:, None] == residues[None, :]].sum())
    lhs = ((q - 1) * same - total) / (q - 2)
    return MomentResult(lhs, rhs, rhs_k, corrected)
