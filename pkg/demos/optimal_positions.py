"""Optimal futures positions, single contract and two contracts.

With exponential utility the optimal futures holdings are independent of
wealth and of the futures price level times position (the dollar exposure
pi * F is what the formulas pin down).  Trading one contract leaves the
investor exposed to both risk factors through a single instrument; adding a
second maturity completes the market and the optimal pair takes a large
long/short spread position.

Run from the repository root:  python3 demos/optimal_positions.py
"""

import os

import numpy as np

from futuresopt import (ModelParams, RiskPrefs, pair_position, single_position)

OUT_DIR = os.path.join(os.path.dirname(__file__), "out")

T1, T2 = 13.0 / 12.0, 14.0 / 12.0
params = ModelParams(mu=0.010, kappa=0.800, alpha=0.0, eta=0.450,
                     eta_bar=0.500, rho=0.750, lam=0.050, r=0.001)
prefs = RiskPrefs(gamma=0.01, horizon=1.0)


def positions_today():
    f1 = f2 = 100.0
    single = single_position(0.0, f1, T1, params, prefs)
    pair = pair_position(0.0, f1, f2, T1, T2, params, prefs)
    print("positions at t = 0 with both futures quoted at 100:")
    print(f"  single contract: pi = {single.positions[0]:+.6f}"
          f"  (dollar exposure {single.cash[0]:+.2f})")
    print(f"  two contracts:   pi1 = {pair.positions[0]:+.6f},"
          f" pi2 = {pair.positions[1]:+.6f}")
    print(f"                   net exposure {pair.cash[0] + pair.cash[1]:+.2f}"
          f" = {pair.cash[0]:+.2f} long near leg, {pair.cash[1]:+.2f} short far leg")


def positions_through_time():
    ts = np.linspace(0.0, 0.95, 20)
    rows = []
    for t in ts:
        s = single_position(t, 100.0, T1, params, prefs).positions[0]
        p1, p2 = pair_position(t, 100.0, 100.0, T1, T2, params, prefs).positions
        rows.append((t, s, p1, p2))
    print("\npositions through the year (prices held at 100):")
    print(f"  {'t':>5s} {'single':>10s} {'pair leg 1':>11s} {'pair leg 2':>11s}")
    for t, s, p1, p2 in rows[::4]:
        print(f"  {t:5.2f} {s:10.5f} {p1:11.4f} {p2:11.4f}")
    print("  the spread legs ease off gently through the year while the"
          " single-contract bet decays toward zero as its drift edge fades")
    return np.array(rows)


def sweep_yield_vol():
    vols = np.linspace(0.25, 0.75, 11)
    legs = []
    for v in vols:
        p = ModelParams(mu=params.mu, kappa=params.kappa, alpha=params.alpha,
                        eta=params.eta, eta_bar=float(v), rho=params.rho,
                        lam=params.lam, r=params.r)
        legs.append(pair_position(0.0, 100.0, 100.0, T1, T2, p, prefs).positions)
    legs = np.array(legs)
    print("\nspread size vs convenience-yield volatility:")
    for v, (p1, p2) in zip(vols[::5], legs[::5]):
        print(f"  eta_bar = {v:.2f}: pi1 = {p1:+.4f}, pi2 = {p2:+.4f}")
    print("  noisier yield -> wider hedging margin -> both legs shrink"
          " toward zero")
    return vols, legs


def maybe_plot(rows, vols, legs):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("\nmatplotlib not installed, skipping the plot")
        return
    os.makedirs(OUT_DIR, exist_ok=True)
    fig, axes = plt.subplots(1, 2, figsize=(11, 4.2))
    axes[0].plot(rows[:, 0], rows[:, 2], label="near leg")
    axes[0].plot(rows[:, 0], rows[:, 3], label="far leg")
    axes[0].plot(rows[:, 0], rows[:, 1], "--", label="single contract")
    axes[0].set_xlabel("time (years)")
    axes[0].set_ylabel("contracts held")
    axes[0].set_title("Optimal positions over the year")
    axes[0].legend()
    axes[1].plot(vols, legs[:, 0], label="near leg")
    axes[1].plot(vols, legs[:, 1], label="far leg")
    axes[1].axhline(0.0, color="gray", lw=0.8)
    axes[1].set_xlabel("convenience-yield volatility")
    axes[1].set_title("Spread legs vs yield volatility")
    axes[1].legend()
    fig.tight_layout()
    dest = os.path.join(OUT_DIR, "positions.png")
    fig.savefig(dest, dpi=120)
    print(f"\nplot saved to {dest}")


if __name__ == "__main__":
    positions_today()
    rows = positions_through_time()
    vols, legs = sweep_yield_vol()
    maybe_plot(rows, vols, legs)
