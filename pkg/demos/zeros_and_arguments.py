"""Locate zeros of L(s, chi) mod 11, then watch S(t, chi) jump by one at each.

Run: python3 demos/zeros_and_arguments.py
"""

from __future__ import annotations

import numpy as np

from dirichlet_arg.characters import build_family
from dirichlet_arg.lfunc import critical_zeros, family_zeros, n_formula, s_of_t


def main() -> None:
    fam = build_family(11)
    zl = family_zeros(fam, 20.0)
    for j in fam.nonprincipal:
        z = zl[j]
        print(f"chi_{j}: {z.count} zeros on (0, 20], validated={z.validated}, first = {z.first:.8f}")

    t = 12.5
    nf = n_formula(t, fam)
    j = 1
    pairs = zl[j].count_upto(t) + zl[fam.conj_index(j)].count_upto(t)
    print(f"counting formula at t = {t}: {nf[j]:.10f} against {pairs} zeros of chi_1 and its conjugate")

    ch = fam.character(1)
    g = critical_zeros(ch, 20.0).first
    for dt in (-1e-2, -1e-3, 1e-3, 1e-2):
        print(f"S({g:.6f} {dt:+.0e}, chi_1) = {s_of_t(g + dt, ch).value:+.6f}")
    print(f"at the zero itself S is the average of both sides: {s_of_t(g, ch).value:+.6f}")
    print(np.round([s_of_t(x, ch).value for x in np.linspace(0.5, 10, 6)], 4))


if __name__ == "__main__":
    main()
