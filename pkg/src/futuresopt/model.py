"""Parameter and state containers for the two-factor futures model.

The model tracks a log spot price X and a convenience yield delta:

    dX     = (mu - eta^2/2 - delta) dt + eta dZ_s
    ddelta = kappa (alpha - delta) dt + eta_bar dZ_d,   corr(dZ_s, dZ_d) = rho dt

Under the pricing measure the drift of X uses the risk-free rate r and the
convenience yield mean reverts to ``alpha_tilde = alpha - lambda/kappa``,
where lambda is the convenience-yield risk premium.

All times are absolute year fractions on a single clock; t = 0 is "now".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from datetime import date

# Mean reversion below this floor makes 1/kappa terms meaningless.
KAPPA_MIN = 1e-8

# Keys accepted in flat key-value config files.  "lambda" is a Python keyword,
# so the dataclass field is named "lam"; everything else matches one to one.
CONFIG_FLOAT_KEYS = (
    "mu", "kappa", "alpha", "eta", "eta_bar", "rho", "lambda", "r",
    "gamma", "horizon", "T1", "T2",
)
CONFIG_DATE_KEYS = ("T1_date", "T2_date")


@dataclass(frozen=True)
class ModelParams:
    mu: float        # drift of the spot under the physical measure
    kappa: float     # mean-reversion speed of the convenience yield
    alpha: float     # long-run convenience yield under the physical measure
    eta: float       # spot volatility
    eta_bar: float   # convenience-yield volatility
    rho: float       # correlation of the two Brownian drivers
    lam: float       # convenience-yield risk premium (config key "lambda")
    r: float         # risk-free rate

    @property
    def alpha_tilde(self) -> float:
        """Risk-neutral long-run convenience yield, alpha - lambda/kappa."""
        return self.alpha - self.lam / self.kappa


@dataclass(frozen=True)
class ContractSpec:
    maturity: float  # contract maturity (year fraction, absolute)
    label: str = ""


@dataclass(frozen=True)
class RiskPrefs:
    gamma: float   # absolute risk aversion of the exponential utility
    horizon: float  # end of the trading interval (year fraction, absolute)


@dataclass(frozen=True)
class MarketState:
    t: float      # current time
    x: float      # log spot price
    delta: float  # convenience yield


def _require_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


def validate(params: ModelParams) -> ModelParams:
    """Check parameter constraints; returns the input for chaining."""
    for f in fields(params):
        _require_finite(f.name, getattr(params, f.name))
    if params.kappa <= KAPPA_MIN:
        raise ValueError(f"kappa must exceed {KAPPA_MIN:g}, got {params.kappa!r}")
    if params.eta <= 0.0:
        raise ValueError(f"eta must be positive, got {params.eta!r}")
    if params.eta_bar <= 0.0:
        raise ValueError(f"eta_bar must be positive, got {params.eta_bar!r}")
    if not (-1.0 < params.rho < 1.0):
        raise ValueError(f"rho must lie strictly in (-1, 1), got {params.rho!r}")
    return params


def alpha_tilde(params: ModelParams) -> float:
    return params.alpha_tilde


def validate_prefs(prefs: RiskPrefs) -> RiskPrefs:
    _require_finite("gamma", prefs.gamma)
    _require_finite("horizon", prefs.horizon)
    if prefs.gamma <= 0.0:
        raise ValueError(f"gamma must be positive, got {prefs.gamma!r}")
    if prefs.horizon <= 0.0:
        raise ValueError(f"horizon must be positive, got {prefs.horizon!r}")
    return prefs


def validate_contract(contract: ContractSpec) -> ContractSpec:
    _require_finite("maturity", contract.maturity)
    if contract.maturity <= 0.0:
        raise ValueError(f"maturity must be positive, got {contract.maturity!r}")
    return contract


def validate_state(state: MarketState) -> MarketState:
    _require_finite("t", state.t)
    _require_finite("x", state.x)
    _require_finite("delta", state.delta)
    if state.t < 0.0:
        raise ValueError(f"t must be nonnegative, got {state.t!r}")
    return state


def check_horizon(prefs: RiskPrefs, contracts) -> None:
    """The trading horizon must not extend past any traded maturity."""
    for c in contracts:
        if prefs.horizon > c.maturity:
            raise ValueError(
                f"horizon {prefs.horizon!r} exceeds contract maturity {c.maturity!r}"
            )


def parse_config(text: str) -> dict:
    """Parse flat ``key = value`` config text.

    One assignment per line, ``#`` starts a comment, blank lines are
    ignored.  Unknown and duplicate keys are rejected.  ``*_date`` keys
    take ISO dates, everything else floats.
    """
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in CONFIG_FLOAT_KEYS and key not in CONFIG_DATE_KEYS:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        if key in out:
            raise ValueError(f"config line {lineno}: duplicate key {key!r}")
        if key in CONFIG_DATE_KEYS:
            try:
                out[key] = date.fromisoformat(value)
            except ValueError as exc:
                raise ValueError(f"config line {lineno}: bad date for {key!r}: {value!r}") from exc
        else:
            try:
                out[key] = float(value)
            except ValueError as exc:
                raise ValueError(f"config line {lineno}: bad number for {key!r}: {value!r}") from exc
            if not math.isfinite(out[key]):
                raise ValueError(f"config line {lineno}: {key!r} must be finite")
    return out


def load_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def params_from_config(cfg: dict) -> ModelParams:
    """Build validated ModelParams from a parsed config.

    ``alpha`` defaults to 0.0; it never enters prices under the pricing
    measure (only alpha_tilde does) nor any strategy quantity, so the
    default is harmless for every supported computation.
    """
    required = ("mu", "kappa", "eta", "eta_bar", "rho", "lambda", "r")
    missing = [k for k in required if k not in cfg]
    if missing:
        raise ValueError(f"config missing required keys: {', '.join(missing)}")
    params = ModelParams(
        mu=cfg["mu"], kappa=cfg["kappa"], alpha=cfg.get("alpha", 0.0),
        eta=cfg["eta"], eta_bar=cfg["eta_bar"], rho=cfg["rho"],
        lam=cfg["lambda"], r=cfg["r"],
    )
    return validate(params)


def prefs_from_config(cfg: dict) -> RiskPrefs:
    missing = [k for k in ("gamma", "horizon") if k not in cfg]
    if missing:
        raise ValueError(f"config missing required keys: {', '.join(missing)}")
    return validate_prefs(RiskPrefs(gamma=cfg["gamma"], horizon=cfg["horizon"]))


def config_from_params(params: ModelParams) -> dict:
    """Inverse of params_from_config (keeps the "lambda" key spelling)."""
    return {
        "mu": params.mu, "kappa": params.kappa, "alpha": params.alpha,
        "eta": params.eta, "eta_bar": params.eta_bar, "rho": params.rho,
        "lambda": params.lam, "r": params.r,
    }


def config_text(cfg: dict) -> str:
    """Render a config dict back to flat key-value text.

    Floats are written with repr so a write/parse round trip reproduces
    every field bit-exactly.
    """
    lines = []
    for key, value in cfg.items():
        if key in CONFIG_DATE_KEYS:
            lines.append(f"{key} = {value.isoformat()}")
        else:
            lines.append(f"{key} = {float(value)!r}")
    return "\n".join(lines) + "\n"
