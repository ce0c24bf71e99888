"""Twisted prime moments: where the plain power bound fails and what replaces it.

Run: python3 demos/moment_lemma.py
"""

from __future__ import annotations

import numpy as np

from dirichlet_arg.arith import sieve
from dirichlet_arg.characters import build_family, twisted_prime_moment


def main() -> None:
    fam = build_family(101)
    r = twisted_prime_moment(fam, {2: 1.0, 3: -(1.5**0.5)}, 0.5, k=1)
    print(f"cancelling phases: lhs/rhs = {r.lhs / r.rhs:.6f} (100/99 = {100 / 99:.6f})")

    rng = np.random.default_rng(0)
    for k, y in ((1, 100), (2, 10)):
        n = sieve(y).primes.size
        ratios, ok = [], 0
        for _ in range(50):
            res = twisted_prime_moment(fam, np.exp(2j * np.pi * rng.random(n)), 0.5, k=k, y=y)
            ratios.append(res.lhs / res.rhs)
            ok += res.holds_corrected
        print(f"k = {k}: max lhs/rhs = {max(ratios):.4f}, plain bound fails {sum(x > 1 for x in ratios)}/50, "
              f"(q-1)/(q-2) k! bound holds {ok}/50")


if __name__ == "__main__":
    main()
