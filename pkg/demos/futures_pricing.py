"""Futures pricing walkthrough.

Prices are exponential-affine in the convenience yield: log F = x + A + B*delta,
where B depends only on time to maturity and the yield's mean-reversion speed,
and A collects the rate, risk-premium and volatility contributions.  This
script prints the coefficient curves, shows how the futures curve reacts to
the yield level, and cross-checks the closed forms against an independent
Runge-Kutta integration and a finite-difference residual of the pricing PDE.

Run from the repository root:  python3 demos/futures_pricing.py
"""

import math
import os

import numpy as np

from futuresopt import (ModelParams, a_coeff, affine_coeffs, b_coeff,
                        futures_price, pde_residual, rk4_affine_coeffs)

OUT_DIR = os.path.join(os.path.dirname(__file__), "out")

params = ModelParams(mu=0.010, kappa=0.800, alpha=0.0, eta=0.450,
                     eta_bar=0.500, rho=0.750, lam=0.050, r=0.001)


def coefficient_table():
    print("affine coefficients at t = 0 (per maturity, years):")
    print(f"  {'maturity':>9s} {'A':>14s} {'B':>14s}")
    for maturity in (0.25, 0.5, 13.0 / 12.0, 14.0 / 12.0, 2.0, 5.0):
        c = affine_coeffs(0.0, maturity, params)
        print(f"  {maturity:9.4f} {c.a:14.8f} {c.b:14.8f}")
    # B tends to -1/kappa for long maturities
    print(f"  long-maturity B limit: {-1.0 / params.kappa:.8f}")


def curve_vs_yield():
    spot = 100.0
    x = math.log(spot)
    taus = np.linspace(0.05, 2.0, 40)
    print("\nfutures curve for three convenience-yield levels (spot = 100):")
    curves = {}
    for delta in (-0.10, 0.05, 0.20):
        curves[delta] = np.array([futures_price(0.0, x, delta, t, params)
                                  for t in taus])
        head = ", ".join(f"{v:.2f}" for v in curves[delta][:4])
        print(f"  delta = {delta:+.2f}: F({taus[0]:.2f}y) .. = {head}, "
              f"F(2y) = {curves[delta][-1]:.2f}")
    print("  high yield pushes the curve into backwardation, negative yield"
          " into contango")
    return taus, curves


def closed_form_checks():
    maturity = 13.0 / 12.0
    grid = np.linspace(0.0, maturity, 1000)
    a_rk, b_rk = rk4_affine_coeffs(params, maturity, grid)
    gap_a = float(np.max(np.abs(a_coeff(grid, maturity, params) - a_rk)))
    gap_b = float(np.max(np.abs(b_coeff(grid, maturity, params) - b_rk)))
    print("\nclosed form vs Runge-Kutta on a 1000-point grid:")
    print(f"  max |A gap| = {gap_a:.3e}, max |B gap| = {gap_b:.3e}")

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        t = rng.uniform(0.0, 0.9 * maturity)
        x = rng.uniform(math.log(50.0), math.log(150.0))
        d = rng.uniform(-0.2, 0.4)
        worst = max(worst, abs(pde_residual(t, x, d, maturity, params)))
    print(f"  max scaled PDE residual over 50 random points = {worst:.3e}")


def maybe_plot(taus, curves):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("\nmatplotlib not installed, skipping the plot")
        return
    os.makedirs(OUT_DIR, exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for delta, curve in sorted(curves.items()):
        ax.plot(taus, curve, label=f"yield = {delta:+.2f}")
    ax.axhline(100.0, color="gray", lw=0.8, ls=":")
    ax.set_xlabel("time to maturity (years)")
    ax.set_ylabel("futures price")
    ax.set_title("Term structure vs convenience-yield level (spot = 100)")
    ax.legend()
    fig.tight_layout()
    dest = os.path.join(OUT_DIR, "term_structure.png")
    fig.savefig(dest, dpi=120)
    print(f"\nplot saved to {dest}")


if __name__ == "__main__":
    coefficient_table()
    taus, curves = curve_vs_yield()
    closed_form_checks()
    maybe_plot(taus, curves)
