"""Optimal futures trading under a two-factor convenience-yield model.

The spot commodity has a stochastic convenience yield that mean reverts;
futures prices are exponential-affine in the yield.  For an investor with
exponential utility of terminal wealth the optimal positions in one or
two futures contracts are available in closed form, along with the value
function, certainty equivalents and the distribution of optimally managed
wealth.  A verification module rechecks every closed form against an
independent numerical route, and the command-line tool (``futuresopt``)
exposes backtesting, parameter sweeps, simulation and the verification
suite.
"""

from .model import (ContractSpec, MarketState, ModelParams, RiskPrefs,
                    alpha_tilde, check_horizon, config_from_params,
                    config_text, load_config, params_from_config,
                    parse_config, prefs_from_config, validate,
                    validate_contract, validate_prefs, validate_state)
from .numerics import adaptive_simpson, central_diff, grid_derivative
from .pricing import (AffineCoeffs, a_coeff, affine_coeffs, b_coeff,
                      futures_price, pde_residual)
from .dynamics import (FuturesDynamics, PathSet, SimConfig, corr_rho12,
                       drift_mu, futures_dynamics, simulate_state,
                       simulate_wealth, vol_sigma)
from .strategy import (SingularityReport, StrategyOutput, ValueReport,
                       WealthMoments, pair_from_dynamics, pair_position,
                       phi_pair, phi_pair_rate, phi_pair_rate_from_dynamics,
                       phi_single, phi_single_rate, single_position,
                       single_wealth_stats, three_futures_singularity,
                       value_and_ce, wealth_moments)
from .verification import (CheckResult, rk4_affine_coeffs, run_all,
                           run_hjb_checks, run_identity_checks, run_mc_checks,
                           run_ode_checks, write_report_csv, write_report_json)

__version__ = "1.0.0"

__all__ = [
    "ModelParams", "ContractSpec", "RiskPrefs", "MarketState",
    "validate", "validate_prefs", "validate_contract", "validate_state",
    "alpha_tilde", "check_horizon",
    "parse_config", "load_config", "params_from_config", "prefs_from_config",
    "config_from_params", "config_text",
    "adaptive_simpson", "central_diff", "grid_derivative",
    "AffineCoeffs", "a_coeff", "b_coeff", "affine_coeffs",
    "futures_price", "pde_residual",
    "FuturesDynamics", "futures_dynamics", "drift_mu", "vol_sigma",
    "corr_rho12", "SimConfig", "PathSet", "simulate_state", "simulate_wealth",
    "StrategyOutput", "ValueReport", "WealthMoments", "SingularityReport",
    "single_position", "pair_position", "pair_from_dynamics",
    "phi_single", "phi_single_rate", "phi_pair", "phi_pair_rate",
    "phi_pair_rate_from_dynamics", "value_and_ce", "wealth_moments",
    "single_wealth_stats", "three_futures_singularity",
    "CheckResult", "rk4_affine_coeffs", "run_ode_checks", "run_hjb_checks",
    "run_identity_checks", "run_mc_checks", "run_all",
    "write_report_csv", "write_report_json",
    "__version__",
]
