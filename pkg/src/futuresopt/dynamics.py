"""Futures drift, volatility and correlation under the physical measure,
plus exact-transition Monte Carlo simulation of the state and of trading
wealth.

Each futures price follows dF/F = mu_i dt + eta dZ_s + eta_bar B_i dZ_d
under the physical measure, giving

    mu_i(t)    = mu - r - lambda (1 - exp(-kappa (Ti - t))) / kappa
    sigma_i(t) = sqrt(eta^2 + 2 rho eta_bar eta B_i + eta_bar^2 B_i^2)

and the instantaneous correlation between two contracts

    rho_12(t) = (eta_bar^2 B_1 B_2 + (B_1 + B_2) rho eta eta_bar + eta^2)
                / (sigma_1 sigma_2).

Simulation draws the joint Gaussian transition of (x, delta) over each
grid step exactly (no discretization bias): delta is an OU bridge-free
update and x integrates it in closed form.  Every path owns a
counter-based random stream keyed by (seed, path index), so results are
byte-identical for any worker count or internal block size.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .model import (ContractSpec, MarketState, ModelParams, RiskPrefs,
                    check_horizon, validate, validate_prefs, validate_state)
from .pricing import a_coeff, b_coeff, _maturity_of

_BLOCK = 4096  # paths advanced per vectorized block; no effect on results

_RECORDABLE = ("x", "delta", "futures", "wealth")


def drift_mu(t, contract, params: ModelParams):
    """Physical-measure drift rate of the futures price."""
    maturity = _maturity_of(contract)
    tau = maturity - np.asarray(t, dtype=float)
    if np.any(tau < 0.0):
        raise ValueError(f"t must not exceed the contract maturity {maturity!r}")
    out = params.mu - params.r - params.lam * (-np.expm1(-params.kappa * tau)) / params.kappa
    return out if out.ndim else float(out)


def vol_sigma(t, contract, params: ModelParams):
    """Instantaneous futures volatility; strictly positive for |rho| < 1."""
    b = b_coeff(t, contract, params)
    out = np.sqrt(params.eta**2 + 2.0 * params.rho * params.eta_bar * params.eta * b
                  + params.eta_bar**2 * b * b)
    return out if np.ndim(out) else float(out)


def corr_rho12(t, contract_1, contract_2, params: ModelParams):
    """Instantaneous correlation between two futures on the same spot."""
    b1 = b_coeff(t, contract_1, params)
    b2 = b_coeff(t, contract_2, params)
    num = (params.eta_bar**2 * b1 * b2
           + (b1 + b2) * params.rho * params.eta * params.eta_bar + params.eta**2)
    out = num / (vol_sigma(t, contract_1, params) * vol_sigma(t, contract_2, params))
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class FuturesDynamics:
    t: float
    maturity: float
    mu: float     # drift rate under the physical measure
    sigma: float  # instantaneous volatility


def futures_dynamics(t: float, contract, params: ModelParams) -> FuturesDynamics:
    return FuturesDynamics(t=float(t), maturity=_maturity_of(contract),
                           mu=drift_mu(t, contract, params),
                           sigma=vol_sigma(t, contract, params))


@dataclass(frozen=True)
class SimConfig:
    """Simulation grid and reproducibility settings.

    horizon is the absolute end time of the grid; simulate_wealth leaves
    it None and uses the trading horizon from RiskPrefs instead.  record
    selects which path matrices are kept (terminal statistics need only
    "wealth"); unrecorded matrices stay None on the PathSet.
    """
    n_paths: int
    n_steps: int
    horizon: float | None = None
    seed: int = 0
    measure: str = "P"
    n_workers: int = 1
    record: tuple = _RECORDABLE
    allow_degenerate_vols: bool = False  # test hook: permits eta = eta_bar = 0

    @property
    def dt(self) -> float:
        """Grid spacing for a run started at t = 0."""
        if self.horizon is None:
            raise ValueError("horizon is not set on this SimConfig")
        return self.horizon / self.n_steps


def _check_sim_config(cfg: SimConfig) -> str:
    if cfg.n_paths < 1:
        raise ValueError(f"n_paths must be at least 1, got {cfg.n_paths!r}")
    if cfg.n_steps < 1:
        raise ValueError(f"n_steps must be at least 1, got {cfg.n_steps!r}")
    measure = cfg.measure.upper()
    if measure not in ("P", "Q"):
        raise ValueError(f"measure must be 'P' or 'Q', got {cfg.measure!r}")
    if cfg.n_workers < 1:
        raise ValueError(f"n_workers must be at least 1, got {cfg.n_workers!r}")
    if not 0 <= int(cfg.seed) < 2**64:
        raise ValueError(f"seed must fit in an unsigned 64-bit word, got {cfg.seed!r}")
    unknown = [k for k in cfg.record if k not in _RECORDABLE]
    if unknown:
        raise ValueError(f"unknown record keys {unknown!r}; valid: {_RECORDABLE}")
    return measure


def _validate_sim_params(params: ModelParams, cfg: SimConfig) -> None:
    if cfg.allow_degenerate_vols:
        # zero-noise runs are allowed for deterministic-limit tests only
        if params.kappa <= 0.0 or params.eta < 0.0 or params.eta_bar < 0.0:
            raise ValueError("degenerate run still needs kappa > 0 and nonnegative vols")
    else:
        validate(params)


@dataclass(frozen=True)
class _Transition:
    """Exact one-step Gaussian transition for (x, delta) on a fixed dt.

    With q = 1 - exp(-kappa h), q2 = 1 - exp(-2 kappa h), theta the
    long-run yield under the simulated measure and m the spot drift rate:

        delta' = theta q + exp(-kappa h) delta + N(0, vd)
        x'     = x + (m - eta^2/2) h - theta (h - q/kappa) - (q/kappa) delta
                 + N(0, vx),     Cov(x', delta') = cxd

        vd  = eta_bar^2 q2 / (2 kappa)
        vx  = eta^2 h + eta_bar^2 V2 - 2 eta eta_bar rho Ca
        cxd = eta eta_bar rho q / kappa - eta_bar^2 (q/kappa - q2/(2 kappa)) / kappa
        V2  = (h - 2 q/kappa + q2/(2 kappa)) / kappa^2
        Ca  = (h - q/kappa) / kappa

    Sampling uses the Cholesky factor with delta first, so (z1, z2) map to
    (delta, x) innovations.
    """
    d0: float
    d1: float
    x0: float
    x1: float
    l11: float
    l21: float
    l22: float


def _transition(params: ModelParams, h: float, measure: str) -> _Transition:
    k, eta, eb, rho = params.kappa, params.eta, params.eta_bar, params.rho
    if measure == "P":
        theta, m = params.alpha, params.mu
    else:
        theta, m = params.alpha_tilde, params.r
    q = -math.expm1(-k * h)
    q2 = -math.expm1(-2.0 * k * h)
    vd = eb * eb * q2 / (2.0 * k)
    v2 = (h - 2.0 * q / k + q2 / (2.0 * k)) / (k * k)
    ca = (h - q / k) / k
    vx = eta * eta * h + eb * eb * v2 - 2.0 * eta * eb * rho * ca
    cxd = eta * eb * rho * q / k - eb * eb * (q / k - q2 / (2.0 * k)) / k
    l11 = math.sqrt(vd)
    l21 = cxd / l11 if l11 > 0.0 else 0.0
    l22 = math.sqrt(max(vx - l21 * l21, 0.0))
    return _Transition(
        d0=theta * q, d1=math.exp(-k * h),
        x0=(m - 0.5 * eta * eta) * h - theta * (h - q / k), x1=-q / k,
        l11=l11, l21=l21, l22=l22,
    )


@dataclass
class PathSet:
    """Simulated paths on a shared time grid, one row per path.

    Matrices have shape (n_paths, n_steps + 1); entries not requested via
    SimConfig.record are None.  futures holds one matrix per contract, in
    the order the contracts were passed.
    """
    times: np.ndarray
    measure: str
    seed: int
    maturities: tuple
    x: np.ndarray | None = None
    delta: np.ndarray | None = None
    futures: tuple | None = None
    wealth: np.ndarray | None = None

    @property
    def n_paths(self) -> int:
        for arr in (self.x, self.delta, self.wealth):
            if arr is not None:
                return arr.shape[0]
        if self.futures:
            return self.futures[0].shape[0]
        return 0

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1

    def to_csv(self, dest, max_paths: int | None = None) -> int:
        """Write long-format rows path,step,t,x,delta,F1[,F2][,wealth].

        Requires x and delta to have been recorded.  Returns the number
        of paths written (the first max_paths of them when capped, so a
        capped export is a prefix of the full one).
        """
        if self.x is None or self.delta is None:
            raise ValueError("CSV export needs 'x' and 'delta' in SimConfig.record")
        n_out = self.n_paths if max_paths is None else min(self.n_paths, max_paths)
        fut = self.futures or ()
        header = ["path", "step", "t", "x", "delta"]
        header += [f"F{i + 1}" for i in range(len(fut))]
        if self.wealth is not None:
            header.append("wealth")

        def write(fh) -> None:
            fh.write(",".join(header) + "\n")
            for p in range(n_out):
                for k, t in enumerate(self.times):
                    row = [str(p), str(k), f"{t:.17g}",
                           f"{self.x[p, k]:.17g}", f"{self.delta[p, k]:.17g}"]
                    row += [f"{f[p, k]:.17g}" for f in fut]
                    if self.wealth is not None:
                        row.append(f"{self.wealth[p, k]:.17g}")
                    fh.write(",".join(row) + "\n")

        if hasattr(dest, "write"):
            write(dest)
        else:
            with open(dest, "w", encoding="utf-8", newline="") as fh:
                write(fh)
        return n_out


def _path_noise(seed: int, first: int, count: int, n_steps: int) -> np.ndarray:
    """Standard normal draws, shape (count, n_steps, 2), one keyed
    counter-based stream per path so results never depend on blocking."""
    out = np.empty((count, n_steps, 2))
    for i in range(count):
        gen = np.random.Generator(np.random.Philox(key=[seed, first + i]))
        out[i] = gen.standard_normal((n_steps, 2))
    return out


def _run_blocks(n_paths: int, n_workers: int, fill) -> None:
    blocks = [(a, min(a + _BLOCK, n_paths)) for a in range(0, n_paths, _BLOCK)]
    if n_workers == 1 or len(blocks) == 1:
        for a, b in blocks:
            fill(a, b)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(lambda ab: fill(*ab), blocks))


def _grid(init_t: float, horizon: float, n_steps: int) -> np.ndarray:
    if not horizon > init_t:
        raise ValueError(f"horizon {horizon!r} must exceed the starting time {init_t!r}")
    return np.linspace(init_t, horizon, n_steps + 1)


def _coeff_tables(times: np.ndarray, contracts, params: ModelParams):
    mats = [_maturity_of(c) for c in contracts]
    return (mats,
            [a_coeff(times, m, params) for m in mats],
            [b_coeff(times, m, params) for m in mats])


def simulate_state(params: ModelParams, init: MarketState, cfg: SimConfig,
                   contracts=()) -> PathSet:
    """Simulate (x, delta) paths, and futures prices for any contracts given.

    cfg.measure selects the drift: "P" (physical) or "Q" (pricing).  The
    per-step transition is sampled exactly, so even coarse grids are free
    of discretization bias.
    """
    measure = _check_sim_config(cfg)
    _validate_sim_params(params, cfg)
    validate_state(init)
    if cfg.horizon is None:
        raise ValueError("simulate_state needs cfg.horizon")
    times = _grid(init.t, cfg.horizon, cfg.n_steps)
    if any(_maturity_of(c) < cfg.horizon for c in contracts):
        raise ValueError("every contract must mature at or after cfg.horizon")
    mats, a_tab, b_tab = _coeff_tables(times, contracts, params)

    n, steps = cfg.n_paths, cfg.n_steps
    rec_x = "x" in cfg.record
    rec_d = "delta" in cfg.record
    rec_f = "futures" in cfg.record and contracts
    xs = np.empty((n, steps + 1)) if rec_x else None
    ds = np.empty((n, steps + 1)) if rec_d else None
    fs = tuple(np.empty((n, steps + 1)) for _ in contracts) if rec_f else None
    tr = _transition(params, (cfg.horizon - init.t) / steps, measure)

    def fill(a: int, b: int) -> None:
        noise = _path_noise(cfg.seed, a, b - a, steps)
        x = np.full(b - a, init.x)
        d = np.full(b - a, init.delta)
        if rec_x:
            xs[a:b, 0] = x
        if rec_d:
            ds[a:b, 0] = d
        if rec_f:
            for fm, at, bt in zip(fs, a_tab, b_tab):
                fm[a:b, 0] = np.exp(x + at[0] + bt[0] * d)
        for k in range(steps):
            z1 = noise[:, k, 0]
            z2 = noise[:, k, 1]
            x = x + tr.x0 + tr.x1 * d + tr.l21 * z1 + tr.l22 * z2
            d = tr.d0 + tr.d1 * d + tr.l11 * z1
            if rec_x:
                xs[a:b, k + 1] = x
            if rec_d:
                ds[a:b, k + 1] = d
            if rec_f:
                for fm, at, bt in zip(fs, a_tab, b_tab):
                    fm[a:b, k + 1] = np.exp(x + at[k + 1] + bt[k + 1] * d)

    _run_blocks(n, cfg.n_workers, fill)
    return PathSet(times=times, measure=measure, seed=cfg.seed,
                   maturities=tuple(mats), x=xs, delta=ds, futures=fs, wealth=None)


def simulate_wealth(params: ModelParams, prefs: RiskPrefs, contracts,
                    init: MarketState, cfg: SimConfig, w0: float = 0.0,
                    position_scale: float = 1.0) -> PathSet:
    """Simulate self-financing wealth under the optimal futures strategy.

    contracts has one entry (single-contract strategy) or two (the pair
    strategy).  Positions are recomputed at every grid time from the
    strategy module and wealth advances by position times price change;
    futures gains are the only cash flows.  Physical measure only.

    position_scale multiplies the optimal positions; values other than
    1.0 give deliberately suboptimal controls for verification.
    """
    # strategy imports this module for drift/vol, so import lazily here
    from .strategy import pair_position, single_position

    measure = _check_sim_config(cfg)
    if measure != "P":
        raise ValueError("wealth simulation is defined under the physical measure only")
    _validate_sim_params(params, cfg)
    validate_state(init)
    validate_prefs(prefs)
    if len(contracts) not in (1, 2):
        raise ValueError(f"need one or two contracts, got {len(contracts)}")
    check_horizon(prefs, [c if isinstance(c, ContractSpec) else ContractSpec(float(c))
                          for c in contracts])
    if cfg.horizon is not None and cfg.horizon != prefs.horizon:
        raise ValueError("cfg.horizon conflicts with prefs.horizon; leave it None")
    if not math.isfinite(position_scale):
        raise ValueError(f"position_scale must be finite, got {position_scale!r}")

    times = _grid(init.t, prefs.horizon, cfg.n_steps)
    mats, a_tab, b_tab = _coeff_tables(times, contracts, params)
    n, steps = cfg.n_paths, cfg.n_steps
    rec_x = "x" in cfg.record
    rec_d = "delta" in cfg.record
    rec_f = "futures" in cfg.record
    rec_w = "wealth" in cfg.record
    xs = np.empty((n, steps + 1)) if rec_x else None
    ds = np.empty((n, steps + 1)) if rec_d else None
    fs = tuple(np.empty((n, steps + 1)) for _ in contracts) if rec_f else None
    ws = np.empty((n, steps + 1)) if rec_w else None
    tr = _transition(params, (prefs.horizon - init.t) / steps, measure)
    pair = len(contracts) == 2

    def prices(x, d, k):
        return [np.exp(x + a_tab[i][k] + b_tab[i][k] * d) for i in range(len(mats))]

    def positions(t_k, f_now):
        if pair:
            out = pair_position(t_k, f_now[0], f_now[1], mats[0], mats[1], params, prefs)
        else:
            out = single_position(t_k, f_now[0], mats[0], params, prefs)
        return [position_scale * p for p in out.positions]

    def fill(a: int, b: int) -> None:
        noise = _path_noise(cfg.seed, a, b - a, steps)
        x = np.full(b - a, init.x)
        d = np.full(b - a, init.delta)
        w = np.full(b - a, w0)
        f_now = prices(x, d, 0)
        if rec_x:
            xs[a:b, 0] = x
        if rec_d:
            ds[a:b, 0] = d
        if rec_w:
            ws[a:b, 0] = w
        if rec_f:
            for fm, f in zip(fs, f_now):
                fm[a:b, 0] = f
        for k in range(steps):
            pis = positions(times[k], f_now)
            z1 = noise[:, k, 0]
            z2 = noise[:, k, 1]
            x = x + tr.x0 + tr.x1 * d + tr.l21 * z1 + tr.l22 * z2
            d = tr.d0 + tr.d1 * d + tr.l11 * z1
            f_next = prices(x, d, k + 1)
            for pi, f1, f0 in zip(pis, f_next, f_now):
                w = w + pi * (f1 - f0)
            f_now = f_next
            if rec_x:
                xs[a:b, k + 1] = x
            if rec_d:
                ds[a:b, k + 1] = d
            if rec_w:
                ws[a:b, k + 1] = w
            if rec_f:
                for fm, f in zip(fs, f_now):
                    fm[a:b, k + 1] = f

    _run_blocks(n, cfg.n_workers, fill)
    return PathSet(times=times, measure=measure, seed=cfg.seed,
                   maturities=tuple(mats), x=xs, delta=ds, futures=fs, wealth=ws)
