"""Closed-form optimal futures strategies under exponential utility, their
value functions, certainty equivalents and wealth statistics.

Positions are measured in contracts; positive means long.  The optimal
cash exposure (position times price) never depends on the price level,
so positions scale as 1/F.

Single contract:

    pi(t) = mu_1(t) / (gamma F_1 sigma_1(t)^2)

implemented through the expanded numerator/denominator in q = 1 -
exp(-kappa (T1 - t)), which is algebraically identical and avoids
stacked intermediate quotients.

Two contracts: the production formulas are the fully expanded solutions
of the two-asset first-order conditions (see pair_position); the
equivalent form in terms of (mu_i, sigma_i, rho_12),

    pi_1 = (mu_1/sigma_1 - rho_12 mu_2/sigma_2)
           / (gamma (1 - rho_12^2) sigma_1 F_1),

suffers a 1 - rho_12^2 near-cancellation for close maturities and is
kept only as a cross-check (pair_from_dynamics, and the debug_check
flag of pair_position).

The value function is -exp(-gamma w - Phi(t)) with

    Phi_pair(t)   = (T - t) [ (r-mu)^2 eta_bar^2
                    + 2 lambda (r-mu) rho eta_bar eta + lambda^2 eta^2 ]
                    / (2 (1-rho^2) eta_bar^2 eta^2)
    Phi_single(t) = integral_t^T mu_1(s)^2 / (2 sigma_1(s)^2) ds

and the certainty equivalent is w + Phi/gamma.  Phi_pair, and the
two-contract wealth drift and volatility, do not involve kappa or alpha
at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import corr_rho12, drift_mu, vol_sigma
from .model import ModelParams, RiskPrefs, validate, validate_prefs
from .numerics import adaptive_simpson
from .pricing import _maturity_of, b_coeff

# Below this maturity gap the two-contract system is numerically singular.
MIN_MATURITY_GAP = 1e-6

PHI_TOL = 1e-12      # adaptive Simpson absolute tolerance for Phi_single
PHI_MAX_DEPTH = 40


@dataclass(frozen=True)
class StrategyOutput:
    t: float
    positions: tuple   # contracts held, one entry per traded future
    cash: tuple        # position * price, independent of the price level
    components: dict   # drift/vol/correlation inputs used


@dataclass(frozen=True)
class ValueReport:
    w: float
    phi: float
    value: float
    certainty_equivalent: float


@dataclass(frozen=True)
class WealthMoments:
    mu_w: float     # optimal wealth drift, per unit time
    sigma_w: float  # optimal wealth volatility, per sqrt unit time


@dataclass(frozen=True)
class SingularityReport:
    matrix: np.ndarray
    det: float
    scaled_det: float   # det / product of the diagonal
    singular_values: np.ndarray
    rank: int


def _descalar(v):
    """0-d numpy results of scalar inputs come back as plain floats."""
    return float(v) if np.ndim(v) == 0 else v


def _check_entry(t, prices, maturities, prefs: RiskPrefs) -> None:
    validate_prefs(prefs)
    limit = min([prefs.horizon] + list(maturities))
    if np.any(np.asarray(t) > limit):
        raise ValueError(f"t must not exceed min(horizon, maturities) = {limit!r}")
    for f in prices:
        if np.any(np.asarray(f) <= 0.0):
            raise ValueError("futures prices must be positive")


def single_position(t, f1, contract, params: ModelParams, prefs: RiskPrefs) -> StrategyOutput:
    """Optimal number of contracts when trading a single future."""
    validate(params)
    maturity = _maturity_of(contract)
    _check_entry(t, (f1,), (maturity,), prefs)
    k, eta, eb, rho = params.kappa, params.eta, params.eta_bar, params.rho
    q = -np.expm1(-k * (maturity - np.asarray(t, dtype=float)))
    den = q * q * eb * eb - 2.0 * q * k * rho * eta * eb + k * k * eta * eta
    cash = _descalar(k * (k * (params.mu - params.r) - params.lam * q) / (prefs.gamma * den))
    pi = _descalar(cash / np.asarray(f1, dtype=float))
    return StrategyOutput(
        t=t, positions=(pi,), cash=(cash,),
        components={"mu1": drift_mu(t, maturity, params),
                    "sigma1": vol_sigma(t, maturity, params)},
    )


def pair_from_dynamics(gamma: float, f1, f2, mu1, mu2, sigma1, sigma2, rho12):
    """Two-contract first-order-condition solution from raw dynamics inputs.

    Verification form only: the (1 - rho12^2) factor cancels catastrophically
    when the maturities nearly coincide.
    """
    c = 1.0 / (gamma * (1.0 - rho12 * rho12))
    pi1 = c * (mu1 / sigma1 - rho12 * mu2 / sigma2) / (sigma1 * f1)
    pi2 = c * (mu2 / sigma2 - rho12 * mu1 / sigma1) / (sigma2 * f2)
    return pi1, pi2


def pair_position(t, f1, f2, contract_1, contract_2, params: ModelParams,
                  prefs: RiskPrefs, debug_check: bool = False) -> StrategyOutput:
    """Optimal contract counts when trading two futures on the same spot.

    Expanded closed form; with debug_check=True the result is recomputed
    through pair_from_dynamics and each position must agree to 1e-10
    relative, else a RuntimeError flags an internal inconsistency.
    """
    validate(params)
    t1, t2 = _maturity_of(contract_1), _maturity_of(contract_2)
    if abs(t1 - t2) < MIN_MATURITY_GAP:
        raise ValueError(
            f"contract maturities must differ by at least {MIN_MATURITY_GAP:g}, "
            f"got {t1!r} and {t2!r}")
    _check_entry(t, (f1, f2), (t1, t2), prefs)
    k, eta, eb, rho = params.kappa, params.eta, params.eta_bar, params.rho
    mu, lam, r, gamma = params.mu, params.lam, params.r, prefs.gamma
    ek1, ek2 = math.exp(k * t1), math.exp(k * t2)
    ekt = np.exp(k * np.asarray(t, dtype=float))
    den = gamma * (1.0 - rho * rho) * eb * eb * eta * eta * (ek1 - ek2)
    num1 = ((ekt - ek2) * (r - mu) * eb * eb
            + (ekt * lam + ek2 * (r * k - lam - k * mu)) * rho * eb * eta
            + ek2 * k * lam * eta * eta)
    num2 = ((ekt - ek1) * (r - mu) * eb * eb
            + (ekt * lam + ek1 * (r * k - lam - k * mu)) * rho * eb * eta
            + ek1 * k * lam * eta * eta)
    cash1 = _descalar(-(ek1 / ekt) * num1 / den)
    cash2 = _descalar(+(ek2 / ekt) * num2 / den)
    pi1 = _descalar(cash1 / np.asarray(f1, dtype=float))
    pi2 = _descalar(cash2 / np.asarray(f2, dtype=float))
    comp = {"mu1": drift_mu(t, t1, params), "sigma1": vol_sigma(t, t1, params),
            "mu2": drift_mu(t, t2, params), "sigma2": vol_sigma(t, t2, params),
            "rho12": corr_rho12(t, t1, t2, params)}
    if debug_check:
        q1, q2 = pair_from_dynamics(gamma, f1, f2, comp["mu1"], comp["mu2"],
                                    comp["sigma1"], comp["sigma2"], comp["rho12"])
        scale = max(np.max(np.abs(np.asarray(q1))), np.max(np.abs(np.asarray(q2))), 1e-300)
        gap = max(np.max(np.abs(pi1 - q1)), np.max(np.abs(pi2 - q2))) / scale
        if gap > 1e-10:
            raise RuntimeError(
                f"pair strategy cross-check failed: forms disagree by {gap:.3e} relative")
    return StrategyOutput(t=t, positions=(pi1, pi2), cash=(cash1, cash2), components=comp)


def phi_single_rate(t, contract, params: ModelParams):
    """Integrand of Phi_single: mu_1(t)^2 / (2 sigma_1(t)^2)."""
    m = drift_mu(t, contract, params)
    s = vol_sigma(t, contract, params)
    return m * m / (2.0 * s * s)


def phi_single(t: float, contract, params: ModelParams, prefs: RiskPrefs) -> float:
    """Exponent Phi of the single-contract value function at time t.

    Adaptive Simpson quadrature of phi_single_rate over [t, horizon]
    (absolute tolerance 1e-12, depth cap 40); the integrand is smooth and
    bounded, so the quadrature is exact for practical purposes.
    """
    validate(params)
    validate_prefs(prefs)
    maturity = _maturity_of(contract)
    if prefs.horizon > maturity:
        raise ValueError(f"horizon {prefs.horizon!r} exceeds contract maturity {maturity!r}")
    if t > prefs.horizon:
        raise ValueError(f"t={t!r} must not exceed the horizon {prefs.horizon!r}")
    return adaptive_simpson(lambda s: phi_single_rate(s, maturity, params),
                            t, prefs.horizon, tol=PHI_TOL, max_depth=PHI_MAX_DEPTH)


def phi_pair_rate(params: ModelParams) -> float:
    """Constant -dPhi/dt of the two-contract value function."""
    num = ((params.r - params.mu) ** 2 * params.eta_bar**2
           + 2.0 * params.lam * (params.r - params.mu) * params.rho * params.eta_bar * params.eta
           + params.lam**2 * params.eta**2)
    return num / (2.0 * (1.0 - params.rho**2) * params.eta_bar**2 * params.eta**2)


def phi_pair(t: float, params: ModelParams, prefs: RiskPrefs) -> float:
    """Exponent Phi of the two-contract value function at time t.

    Closed form, linear in remaining time; independent of the contract
    maturities, of kappa and of alpha.  Nonnegative.
    """
    validate(params)
    validate_prefs(prefs)
    if t > prefs.horizon:
        raise ValueError(f"t={t!r} must not exceed the horizon {prefs.horizon!r}")
    return (prefs.horizon - t) * phi_pair_rate(params)


def phi_pair_rate_from_dynamics(t, contract_1, contract_2, params: ModelParams):
    """-dPhi/dt assembled from per-contract drift, vol and correlation.

    Pre-simplified route used by verification: must agree with
    phi_pair_rate even though every input depends on kappa and the
    maturities.
    """
    m1 = drift_mu(t, contract_1, params)
    m2 = drift_mu(t, contract_2, params)
    s1 = vol_sigma(t, contract_1, params)
    s2 = vol_sigma(t, contract_2, params)
    p = corr_rho12(t, contract_1, contract_2, params)
    return ((m1 * m1 * s2 * s2 + m2 * m2 * s1 * s1 - 2.0 * p * m1 * m2 * s1 * s2)
            / (2.0 * s1 * s1 * s2 * s2 * (1.0 - p * p)))


def value_and_ce(w: float, phi: float, prefs: RiskPrefs) -> ValueReport:
    """Exponential-utility value -exp(-gamma w - phi) and its cash equivalent."""
    validate_prefs(prefs)
    if not math.isfinite(w) or not math.isfinite(phi):
        raise ValueError("w and phi must be finite")
    return ValueReport(w=w, phi=phi, value=-math.exp(-prefs.gamma * w - phi),
                       certainty_equivalent=w + phi / prefs.gamma)


def wealth_moments(params: ModelParams, prefs: RiskPrefs) -> WealthMoments:
    """Drift and volatility rates of optimally managed two-contract wealth.

    Wealth is arithmetic Brownian: mean grows at mu_w per year and
    variance at sigma_w^2 per year, with sigma_w^2 = mu_w / gamma exactly.
    """
    validate(params)
    validate_prefs(prefs)
    mu_w = 2.0 * phi_pair_rate(params) / prefs.gamma
    return WealthMoments(mu_w=mu_w, sigma_w=math.sqrt(mu_w / prefs.gamma))


def single_wealth_stats(t: float, contract, params: ModelParams,
                        prefs: RiskPrefs) -> tuple:
    """Mean and variance of terminal wealth (net of w0) for the
    single-contract strategy started at time t: (2 Phi/gamma, 2 Phi/gamma^2)."""
    phi = phi_single(t, contract, params, prefs)
    return 2.0 * phi / prefs.gamma, 2.0 * phi / (prefs.gamma * prefs.gamma)


def three_futures_singularity(t: float, prices, maturities,
                              params: ModelParams) -> SingularityReport:
    """First-order-condition matrix for three futures on one spot.

    Entry (i, j) is F_i F_j (eta^2 + eta_bar^2 B_i B_j
    + rho eta eta_bar (B_i + B_j)).  Only two Brownian drivers exist, so
    the matrix is at most rank 2 and its determinant vanishes: a third
    contract adds no attainable payoff direction, and the three-contract
    first-order conditions pin down no unique solution.
    """
    validate(params)
    prices = np.asarray(prices, dtype=float)
    mats = [_maturity_of(m) for m in maturities]
    if prices.shape != (3,) or len(mats) != 3:
        raise ValueError("need exactly three prices and three maturities")
    if np.any(prices <= 0.0):
        raise ValueError("futures prices must be positive")
    if any(t > m for m in mats):
        raise ValueError("t must not exceed any maturity")
    b = np.array([b_coeff(t, m, params) for m in mats])
    eta, eb, rho = params.eta, params.eta_bar, params.rho
    cov = (eta * eta + eb * eb * np.outer(b, b)
           + rho * eta * eb * (b[:, None] + b[None, :]))
    matrix = np.outer(prices, prices) * cov
    det = float(np.linalg.det(matrix))
    svals = np.linalg.svd(matrix, compute_uv=False)
    rank = int(np.sum(svals > 1e-10 * svals[0]))
    return SingularityReport(matrix=matrix, det=det,
                             scaled_det=det / float(np.prod(np.diag(matrix))),
                             singular_values=svals, rank=rank)
