"""Walk through the explicit constants behind the mean-value bound for S(t, chi).

Run: python3 demos/constants_tour.py
"""

from __future__ import annotations

from dirichlet_arg.constants import (
    DEFAULT_DELTA, DEFAULT_EPS, DEFAULT_ETA, DEFAULT_KAPPA, c0_pipeline, eta_constants, h_of_k, mean_square_bound,
    mollifier_mean_constant, optimize_d_parameters, proportion_lower_bound, sqrt_d,
)


def main() -> None:
    ec = eta_constants(DEFAULT_ETA)
    print(f"eta = {DEFAULT_ETA}: A = {ec.A:.5f}, B1 = {ec.B1:.5f}, B2 = {ec.B2:.5f}")
    print(f"mollifier mean constant = {mollifier_mean_constant():.6f}")
    h, d = h_of_k(1)
    print(f"h(1) = {h:.6f} attained at Delta* = {d:.5f}")

    for kappa in (0.10, 0.12, DEFAULT_KAPPA, 0.125 - 1e-9):
        print(f"sqrt(D) at kappa = {kappa:.10f}: {sqrt_d(DEFAULT_ETA, DEFAULT_DELTA, kappa, 1, DEFAULT_EPS):.4f}")

    opt = optimize_d_parameters(1, DEFAULT_EPS, DEFAULT_KAPPA, grid=(100, 50))
    print(f"optimizer: eta* = {opt.eta:.4f}, delta* = {opt.delta:.4f}, sqrt(D) = {opt.value:.4f}")
    print(f"C0 pipeline at q = 1e9: {c0_pipeline(DEFAULT_KAPPA, 1e9):.6f}")

    print(f"mean-square bound at beta = 0: {mean_square_bound(0.0):.0f}")
    for beta in (1000.0, 1e4, 1e6):
        print(f"beta = {beta:g}: proportion of characters with small S >= {proportion_lower_bound(beta):.4f}")


if __name__ == "__main__":
    main()
