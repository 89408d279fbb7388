"""Closed-form futures prices for the two-factor model.

The futures price is exponential affine in the state,

    F(t, x, delta; Ti) = exp(x + A(t) + B(t) * delta),

where the deterministic coefficients solve, in forward time t,

    B' = kappa * B + 1,                         B(Ti) = 0
    A' = -r - (eta_bar^2 / 2) * B^2
         - B * (alpha_tilde * kappa + rho * eta * eta_bar),   A(Ti) = 0

with alpha_tilde = alpha - lambda/kappa.  Both have explicit solutions,
used everywhere below; numerical ODE integration appears only in the
verification suite as an independent cross-check.

Functions accept scalars or numpy arrays for t, x and delta.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ContractSpec, ModelParams


def _maturity_of(contract) -> float:
    return contract.maturity if isinstance(contract, ContractSpec) else float(contract)


def _check_not_past(t, maturity: float) -> None:
    if np.any(np.asarray(t) > maturity):
        raise ValueError(f"t must not exceed the contract maturity {maturity!r}")


@dataclass(frozen=True)
class AffineCoeffs:
    t: float
    maturity: float
    a: float  # level coefficient A(t)
    b: float  # convenience-yield loading B(t), in (-1/kappa, 0]


def b_coeff(t, contract, params: ModelParams):
    """Convenience-yield loading B(t) = -(1 - exp(-kappa (Ti - t))) / kappa."""
    maturity = _maturity_of(contract)
    _check_not_past(t, maturity)
    tau = maturity - np.asarray(t, dtype=float)
    out = np.expm1(-params.kappa * tau) / params.kappa
    return out if out.ndim else float(out)


def a_coeff(t, contract, params: ModelParams):
    """Level coefficient A(t) of the affine futures price."""
    maturity = _maturity_of(contract)
    _check_not_past(t, maturity)
    k = params.kappa
    at = params.alpha_tilde
    ee = params.eta * params.eta_bar * params.rho
    tau = maturity - np.asarray(t, dtype=float)
    q = -np.expm1(-k * tau)        # 1 - exp(-kappa tau)
    q2 = -np.expm1(-2.0 * k * tau)  # 1 - exp(-2 kappa tau)
    out = ((params.r - at + params.eta_bar**2 / (2.0 * k * k) - ee / k) * tau
           + params.eta_bar**2 / 4.0 * q2 / k**3
           + (at * k + ee - params.eta_bar**2 / k) * q / (k * k))
    return out if out.ndim else float(out)


def affine_coeffs(t: float, contract, params: ModelParams) -> AffineCoeffs:
    return AffineCoeffs(t=float(t), maturity=_maturity_of(contract),
                        a=a_coeff(t, contract, params), b=b_coeff(t, contract, params))


def futures_price(t, x, delta, contract, params: ModelParams):
    """Futures price exp(x + A(t) + B(t) delta); positive and finite."""
    out = np.exp(np.asarray(x, dtype=float)
                 + a_coeff(t, contract, params)
                 + b_coeff(t, contract, params) * np.asarray(delta, dtype=float))
    return out if out.ndim else float(out)


def pde_residual(t: float, x: float, delta: float, contract, params: ModelParams,
                 bump: float = 1e-4, t_bump: float = 1e-6) -> float:
    """Relative residual of the pricing equation at one interior point.

    All partials of futures_price come from central differences: ``bump``
    is relative for x and delta (scaled by max(1, |value|)), ``t_bump``
    absolute.  The time difference falls back to one-sided next to t = 0
    or t = maturity.  The residual is scaled by the price itself.

    The equation checked is

        eta^2/2 F_xx + rho eta eta_bar F_xd + eta_bar^2/2 F_dd
        + (r - delta - eta^2/2) F_x + kappa (alpha_tilde - delta) F_d + F_t = 0.
    """
    maturity = _maturity_of(contract)
    if not t < maturity:
        raise ValueError(f"t={t!r} must lie strictly before maturity {maturity!r}")
    hx = bump * max(1.0, abs(x))
    hd = bump * max(1.0, abs(delta))

    def fp(tt, xx, dd):
        return futures_price(tt, xx, dd, maturity, params)

    f0 = fp(t, x, delta)
    f_x = (fp(t, x + hx, delta) - fp(t, x - hx, delta)) / (2.0 * hx)
    f_xx = (fp(t, x + hx, delta) - 2.0 * f0 + fp(t, x - hx, delta)) / (hx * hx)
    f_d = (fp(t, x, delta + hd) - fp(t, x, delta - hd)) / (2.0 * hd)
    f_dd = (fp(t, x, delta + hd) - 2.0 * f0 + fp(t, x, delta - hd)) / (hd * hd)
    f_xd = (fp(t, x + hx, delta + hd) - fp(t, x + hx, delta - hd)
            - fp(t, x - hx, delta + hd) + fp(t, x - hx, delta - hd)) / (4.0 * hx * hd)
    if t + t_bump > maturity:
        f_t = (3.0 * f0 - 4.0 * fp(t - t_bump, x, delta)
               + fp(t - 2.0 * t_bump, x, delta)) / (2.0 * t_bump)
    elif t - t_bump < 0.0:
        f_t = (-3.0 * f0 + 4.0 * fp(t + t_bump, x, delta)
               - fp(t + 2.0 * t_bump, x, delta)) / (2.0 * t_bump)
    else:
        f_t = (fp(t + t_bump, x, delta) - fp(t - t_bump, x, delta)) / (2.0 * t_bump)

    eta, eb, rho, k = params.eta, params.eta_bar, params.rho, params.kappa
    residual = (0.5 * eta * eta * f_xx + rho * eta * eb * f_xd + 0.5 * eb * eb * f_dd
                + (params.r - delta - 0.5 * eta * eta) * f_x
                + k * (params.alpha_tilde - delta) * f_d + f_t)
    return float(residual / f0)
