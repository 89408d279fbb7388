"""Command-line interface.

Subcommands:

    backtest   optimal two-contract positions along a dated price history
    sweep      strategy and value outputs over a one-parameter grid
    ce         certainty equivalents for the pair and each single contract
    simulate   Monte Carlo paths of the state, prices and trading wealth
    verify     run the full self-verification suite and write reports

Exit codes: 0 success, 1 bad input or usage, 2 verification failure.
Numeric CSV fields are written with 17 significant digits so a rerun with
identical inputs reproduces every output file byte for byte; no command
writes timestamps or machine-specific data.

Config files are flat ``key = value`` text (see the model module for the
key list).  Maturities come either as year fractions T1/T2 or, for
backtests, as calendar dates T1_date/T2_date counted ACT/365 from the
first price row.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from datetime import date

import numpy as np

from .dynamics import MarketState, SimConfig, simulate_state, simulate_wealth
from .model import (ContractSpec, RiskPrefs, check_horizon, config_from_params,
                    load_config, params_from_config, prefs_from_config,
                    validate_prefs)
from .strategy import (pair_position, phi_pair, phi_single, single_position,
                       single_wealth_stats, value_and_ce, wealth_moments)
from . import verification

SWEEP_PARAMS = ("eta_bar", "eta", "gamma", "lambda", "T1", "T2")
SWEEP_OUTPUTS = ("pi1", "pi2", "pi1_single", "pi2_single", "ce_pair",
                 "ce_single_1", "ce_single_2", "mu_w", "sigma_w")
RECORD_KEYS = ("x", "delta", "futures", "wealth")
DAYS_PER_YEAR = 365.0


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; this CLI reserves 2 for
    verification failures, so usage errors exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _resolve_maturities(cfg: dict, start_date: date | None = None) -> tuple:
    has_num = "T1" in cfg or "T2" in cfg
    has_date = "T1_date" in cfg or "T2_date" in cfg
    if has_num and has_date:
        raise ValueError("give maturities either as T1/T2 or as T1_date/T2_date, not both")
    if has_num:
        if "T1" not in cfg or "T2" not in cfg:
            raise ValueError("both T1 and T2 are required")
        t1, t2 = float(cfg["T1"]), float(cfg["T2"])
    elif has_date:
        if "T1_date" not in cfg or "T2_date" not in cfg:
            raise ValueError("both T1_date and T2_date are required")
        if start_date is None:
            raise ValueError(
                "date maturities need a price history to anchor the day count; "
                "use numeric T1/T2 for this command")
        t1 = (cfg["T1_date"] - start_date).days / DAYS_PER_YEAR
        t2 = (cfg["T2_date"] - start_date).days / DAYS_PER_YEAR
    else:
        raise ValueError("config must set maturities, T1/T2 or T1_date/T2_date")
    for name, v in (("T1", t1), ("T2", t2)):
        if not math.isfinite(v) or v <= 0.0:
            raise ValueError(f"{name} must resolve to a positive year fraction, got {v!r}")
    return t1, t2


def _echo_config(params, prefs=None, t1=None, t2=None, extra=None) -> dict:
    out = config_from_params(params)
    if prefs is not None:
        out["gamma"] = prefs.gamma
        out["horizon"] = prefs.horizon
    if t1 is not None:
        out["T1"] = t1
    if t2 is not None:
        out["T2"] = t2
    if extra:
        out.update(extra)
    return out


def _write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(payload, indent=2) + "\n")


# ---------------------------------------------------------------- backtest

def _read_prices(path) -> list:
    """Rows of (date, F1, F2) from a CSV with exactly that header."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["date", "F1", "F2"]:
            raise ValueError(f"{path} line 1: header must be exactly 'date,F1,F2', "
                             f"got {','.join(header) if header else '<empty>'!r}")
        for row in reader:
            if not row:
                continue
            n = reader.line_num
            if len(row) != 3:
                raise ValueError(f"{path} line {n}: expected 3 fields, got {len(row)}")
            try:
                d = date.fromisoformat(row[0].strip())
            except ValueError as exc:
                raise ValueError(f"{path} line {n}: bad date {row[0]!r}") from exc
            try:
                f1, f2 = float(row[1]), float(row[2])
            except ValueError as exc:
                raise ValueError(f"{path} line {n}: bad price in {row[1:]!r}") from exc
            if not (math.isfinite(f1) and math.isfinite(f2)) or f1 <= 0.0 or f2 <= 0.0:
                raise ValueError(f"{path} line {n}: prices must be positive and finite")
            if rows and d <= rows[-1][0]:
                raise ValueError(f"{path} line {n}: dates must be strictly increasing")
            rows.append((d, f1, f2))
    if not rows:
        raise ValueError(f"{path}: no price rows")
    return rows


def cmd_backtest(args) -> int:
    cfg = load_config(args.config)
    params = params_from_config(cfg)
    rows = _read_prices(args.prices)
    start = rows[0][0]
    t1, t2 = _resolve_maturities(cfg, start_date=start)
    # the trading horizon defaults to the nearer maturity
    horizon = float(cfg.get("horizon", min(t1, t2)))
    if "gamma" not in cfg:
        raise ValueError("config missing required keys: gamma")
    prefs = validate_prefs(RiskPrefs(gamma=cfg["gamma"], horizon=horizon))
    check_horizon(prefs, (ContractSpec(t1), ContractSpec(t2)))

    out_rows = []
    for d, f1, f2 in rows:
        t = (d - start).days / DAYS_PER_YEAR
        if t >= min(t1, t2):
            raise ValueError(f"{args.prices}: row {d.isoformat()} is at or past the "
                             f"nearer maturity (t = {t:.6g})")
        if t > horizon:
            raise ValueError(f"{args.prices}: row {d.isoformat()} lies past the "
                             f"trading horizon {horizon:.6g}")
        out = pair_position(t, f1, f2, t1, t2, params, prefs)
        pi1, pi2 = out.positions
        out_rows.append((d, t, f1, f2, pi1, pi2, out.cash[0], out.cash[1]))

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("date,t,F1,F2,pi1,pi2,pi_sum,cash1,cash2\n")
        for d, t, f1, f2, pi1, pi2, c1, c2 in out_rows:
            vals = ",".join(_fmt(v) for v in (t, f1, f2, pi1, pi2, pi1 + pi2, c1, c2))
            fh.write(f"{d.isoformat()},{vals}\n")
    print(f"wrote {args.out} ({len(out_rows)} rows)")

    if args.summary:
        extra = {"day_count": "ACT/365", "start_date": start.isoformat()}
        for key in ("T1_date", "T2_date"):
            if key in cfg:
                extra[key] = cfg[key].isoformat()
        payload = {
            "command": "backtest",
            "n_rows": len(out_rows),
            "first_date": rows[0][0].isoformat(),
            "last_date": rows[-1][0].isoformat(),
            "config": _echo_config(params, prefs, t1, t2, extra),
        }
        _write_json(args.summary, payload)
        print(f"wrote {args.summary}")
    return 0


# ------------------------------------------------------------------- sweep

def _sweep_row(names, params, prefs, t1, t2, f1, f2) -> list:
    vals = {}
    if any(n in names for n in ("pi1", "pi2")):
        out = pair_position(0.0, f1, f2, t1, t2, params, prefs)
        vals["pi1"], vals["pi2"] = out.positions
    if "pi1_single" in names:
        vals["pi1_single"] = single_position(0.0, f1, t1, params, prefs).positions[0]
    if "pi2_single" in names:
        vals["pi2_single"] = single_position(0.0, f2, t2, params, prefs).positions[0]
    if "ce_pair" in names:
        vals["ce_pair"] = phi_pair(0.0, params, prefs) / prefs.gamma
    if "ce_single_1" in names:
        vals["ce_single_1"] = phi_single(0.0, t1, params, prefs) / prefs.gamma
    if "ce_single_2" in names:
        vals["ce_single_2"] = phi_single(0.0, t2, params, prefs) / prefs.gamma
    if any(n in names for n in ("mu_w", "sigma_w")):
        wm = wealth_moments(params, prefs)
        vals["mu_w"], vals["sigma_w"] = wm.mu_w, wm.sigma_w
    return [vals[n] for n in names]


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    names = [s.strip() for s in args.outputs.split(",") if s.strip()]
    if not names:
        raise ValueError("at least one output is required")
    bad = [n for n in names if n not in SWEEP_OUTPUTS]
    if bad:
        raise ValueError(f"unknown outputs {bad!r}; valid: {', '.join(SWEEP_OUTPUTS)}")
    if len(set(names)) != len(names):
        raise ValueError("duplicate output names")
    if args.n < 1:
        raise ValueError(f"--n must be at least 1, got {args.n}")
    for flag, v in (("--lo", args.lo), ("--hi", args.hi),
                    ("--f1", args.f1), ("--f2", args.f2)):
        if not math.isfinite(v):
            raise ValueError(f"{flag} must be finite, got {v!r}")
    if args.f1 <= 0.0 or args.f2 <= 0.0:
        raise ValueError("--f1 and --f2 must be positive")

    grid = np.linspace(args.lo, args.hi, args.n)
    # every grid point is evaluated before anything is written, so an
    # invalid point anywhere in the range leaves no partial output behind
    table = []
    for v in grid:
        cfg_v = dict(cfg)
        cfg_v[args.param] = float(v)
        try:
            params = params_from_config(cfg_v)
            prefs = prefs_from_config(cfg_v)
            t1, t2 = _resolve_maturities(cfg_v)
            check_horizon(prefs, (ContractSpec(t1), ContractSpec(t2)))
            table.append(_sweep_row(names, params, prefs, t1, t2, args.f1, args.f2))
        except ValueError as exc:
            raise ValueError(f"sweep point {args.param} = {v:.17g}: {exc}") from exc

    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("param_value," + ",".join(names) + "\n")
        for v, row in zip(grid, table):
            fh.write(_fmt(v) + "," + ",".join(_fmt(x) for x in row) + "\n")
    print(f"wrote {args.out} ({len(table)} rows)")
    return 0


# --------------------------------------------------------------------- ce

def cmd_ce(args) -> int:
    cfg = load_config(args.config)
    params = params_from_config(cfg)
    prefs = prefs_from_config(cfg)
    t1, t2 = _resolve_maturities(cfg)
    check_horizon(prefs, (ContractSpec(t1), ContractSpec(t2)))

    pp = phi_pair(0.0, params, prefs)
    p1 = phi_single(0.0, t1, params, prefs)
    p2 = phi_single(0.0, t2, params, prefs)
    rep_pair = value_and_ce(args.w0, pp, prefs)
    rep_1 = value_and_ce(args.w0, p1, prefs)
    rep_2 = value_and_ce(args.w0, p2, prefs)
    wm = wealth_moments(params, prefs)

    print(f"ce_pair = {_fmt(rep_pair.certainty_equivalent)}")
    print(f"ce_single_1 = {_fmt(rep_1.certainty_equivalent)}")
    print(f"ce_single_2 = {_fmt(rep_2.certainty_equivalent)}")

    if args.json:
        payload = {
            "command": "ce",
            "w0": args.w0,
            "ce_pair": rep_pair.certainty_equivalent,
            "ce_single_1": rep_1.certainty_equivalent,
            "ce_single_2": rep_2.certainty_equivalent,
            "phi_pair": pp,
            "phi_single_1": p1,
            "phi_single_2": p2,
            "value_pair": rep_pair.value,
            "value_single_1": rep_1.value,
            "value_single_2": rep_2.value,
            "mu_w": wm.mu_w,
            "sigma_w": wm.sigma_w,
            "config": _echo_config(params, prefs, t1, t2),
        }
        _write_json(args.json, payload)
        print(f"wrote {args.json}")
    return 0


# ---------------------------------------------------------------- simulate

def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    params = params_from_config(cfg)
    prefs = prefs_from_config(cfg)
    t1, t2 = _resolve_maturities(cfg)
    check_horizon(prefs, (ContractSpec(t1), ContractSpec(t2)))
    if args.contracts not in (1, 2):
        raise ValueError(f"--contracts must be 1 or 2, got {args.contracts}")
    mats = (t1, t2)[: args.contracts]
    record = tuple(s.strip() for s in args.record.split(",") if s.strip())
    bad = [k for k in record if k not in RECORD_KEYS]
    if bad:
        raise ValueError(f"unknown record keys {bad!r}; valid: {', '.join(RECORD_KEYS)}")
    if not record:
        raise ValueError("at least one record key is required")
    measure = args.measure.upper()
    if args.spot <= 0.0 or not math.isfinite(args.spot):
        raise ValueError(f"--spot must be a positive price, got {args.spot!r}")

    n_mats = sum(1 for k in ("x", "delta", "wealth") if k in record)
    n_mats += len(mats) if "futures" in record else 0
    need_mb = args.paths * (args.steps + 1) * 8.0 * n_mats / 2**20
    if need_mb > args.max_mem_mb:
        raise ValueError(
            f"recording {','.join(record)} for {args.paths} paths x {args.steps} steps "
            f"needs about {need_mb:.0f} MiB, over the {args.max_mem_mb} MiB cap "
            f"({(args.steps + 1) * 8 * n_mats} bytes per path); lower --paths or "
            f"--steps, trim --record, or raise --max-mem-mb")

    init = MarketState(t=0.0, x=math.log(args.spot), delta=args.delta0)
    if "wealth" in record:
        if measure != "P":
            raise ValueError("wealth paths are defined under the physical measure; "
                             "drop 'wealth' from --record or use --measure P")
        sim_cfg = SimConfig(n_paths=args.paths, n_steps=args.steps, seed=args.seed,
                            measure="P", n_workers=args.workers, record=record)
        ps = simulate_wealth(params, prefs, mats, init, sim_cfg, w0=args.w0)
    else:
        sim_cfg = SimConfig(n_paths=args.paths, n_steps=args.steps,
                            horizon=prefs.horizon, seed=args.seed, measure=measure,
                            n_workers=args.workers, record=record)
        ps = simulate_state(params, init, sim_cfg, contracts=mats)

    span = prefs.horizon - init.t
    terminal = {}
    lines = []
    if ps.x is not None:
        xt = ps.x[:, -1]
        terminal["x_mean"] = float(xt.mean())
        terminal["x_var"] = float(xt.var(ddof=1)) if args.paths > 1 else 0.0
    if ps.delta is not None:
        dt_ = ps.delta[:, -1]
        terminal["delta_mean"] = float(dt_.mean())
        terminal["delta_var"] = float(dt_.var(ddof=1)) if args.paths > 1 else 0.0
    if ps.futures:
        terminal["futures_mean"] = [float(f[:, -1].mean()) for f in ps.futures]
    if ps.wealth is not None:
        wt = ps.wealth[:, -1]
        mean, var = float(wt.mean()), float(wt.var(ddof=1)) if args.paths > 1 else 0.0
        if len(mats) == 2:
            wm = wealth_moments(params, prefs)
            a_mean, a_var = args.w0 + wm.mu_w * span, wm.sigma_w**2 * span
        else:
            s_mean, s_var = single_wealth_stats(init.t, mats[0], params, prefs)
            a_mean, a_var = args.w0 + s_mean, s_var
        se = math.sqrt(var / args.paths) if args.paths > 1 and var > 0.0 else 0.0
        z = (mean - a_mean) / se if se > 0.0 else None
        terminal.update({
            "wealth_mean": mean, "wealth_var": var,
            "wealth_mean_analytic": a_mean, "wealth_var_analytic": a_var,
            "wealth_mean_z": z,
        })
        lines.append(f"terminal wealth: mean={mean:.6g} analytic={a_mean:.6g} "
                     f"var={var:.6g} analytic_var={a_var:.6g}")

    print(f"simulated {args.paths} paths, {args.steps} steps, measure {measure}, "
          f"{len(mats)} contract(s)")
    for line in lines:
        print(line)

    if args.out:
        n_written = ps.to_csv(args.out, max_paths=args.max_csv_paths)
        print(f"wrote {args.out} ({n_written} of {args.paths} paths)")
    if args.summary:
        payload = {
            "command": "simulate",
            "n_paths": args.paths, "n_steps": args.steps, "seed": args.seed,
            "measure": measure, "n_workers": args.workers,
            "record": list(record), "maturities": list(mats),
            "spot": args.spot, "delta0": args.delta0,
            "w0": args.w0 if "wealth" in record else None,
            "terminal": terminal,
            "config": _echo_config(params, prefs, t1, t2),
        }
        _write_json(args.summary, payload)
        print(f"wrote {args.summary}")
    return 0


# ------------------------------------------------------------------ verify

def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    params = params_from_config(cfg)
    prefs = prefs_from_config(cfg)
    t1, t2 = _resolve_maturities(cfg)
    check_horizon(prefs, (ContractSpec(t1), ContractSpec(t2)))

    results = verification.run_all(
        params, prefs, (t1, t2), n_paths=args.paths,
        steps_per_year=args.steps_per_year, seed=args.seed,
        n_workers=args.workers, grid_size=args.grid_size,
        corrupt_a=args.self_test_corrupt)

    for r in results:
        print(f"{r.status.upper():4s} {r.name:34s} observed={r.observed:.6e} "
              f"threshold={r.threshold:.6e}")
    n_fail = sum(1 for r in results if not r.ok)
    print(f"{len(results) - n_fail} passed, {n_fail} failed")

    verification.write_report_csv(results, args.out_csv)
    echo = _echo_config(params, prefs, t1, t2, {
        "mc_paths": args.paths, "mc_steps_per_year": args.steps_per_year,
        "mc_seed": args.seed, "n_workers": args.workers,
        "grid_size": args.grid_size})
    if args.self_test_corrupt:
        echo["self_test_corrupt"] = args.self_test_corrupt
    verification.write_report_json(results, args.out_json, config_echo=echo)
    print(f"wrote {args.out_csv} and {args.out_json}")
    return 0 if n_fail == 0 else 2


# ------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="futuresopt",
                     description="Optimal futures trading under a two-factor "
                                 "convenience-yield model")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("backtest", help="positions along a dated price history")
    p.add_argument("--config", required=True, help="flat key = value config file")
    p.add_argument("--prices", required=True, help="CSV with header date,F1,F2")
    p.add_argument("--out", required=True, help="output positions CSV")
    p.add_argument("--summary", help="optional JSON summary path")
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("sweep", help="outputs over a one-parameter grid")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p.add_argument("--lo", required=True, type=float)
    p.add_argument("--hi", required=True, type=float)
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--outputs", required=True,
                   help="comma list from: " + ", ".join(SWEEP_OUTPUTS))
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--f1", type=float, default=100.0)
    p.add_argument("--f2", type=float, default=100.0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ce", help="certainty equivalents at t = 0")
    p.add_argument("--config", required=True)
    p.add_argument("--w0", type=float, default=0.0)
    p.add_argument("--json", help="optional JSON output path")
    p.set_defaults(func=cmd_ce)

    p = sub.add_parser("simulate", help="Monte Carlo paths and wealth")
    p.add_argument("--config", required=True)
    p.add_argument("--paths", type=int, default=10000)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--measure", choices=["P", "Q", "p", "q"], default="P")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--contracts", type=int, default=2, help="1 or 2")
    p.add_argument("--w0", type=float, default=0.0)
    p.add_argument("--spot", type=float, default=100.0, help="initial spot price")
    p.add_argument("--delta0", type=float, default=0.0, help="initial convenience yield")
    p.add_argument("--record", default="x,delta,futures,wealth",
                   help="comma list from: " + ", ".join(RECORD_KEYS))
    p.add_argument("--out", help="optional paths CSV (needs x and delta recorded)")
    p.add_argument("--summary", help="optional JSON summary path")
    p.add_argument("--max-csv-paths", type=int, default=100,
                   help="cap on paths exported to CSV")
    p.add_argument("--max-mem-mb", type=float, default=1024.0,
                   help="refuse runs whose recorded matrices exceed this")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="run the self-verification suite")
    p.add_argument("--config", required=True)
    p.add_argument("--paths", type=int, default=20000)
    p.add_argument("--steps-per-year", type=int, default=500)
    p.add_argument("--seed", type=int, default=2718)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--grid-size", type=int, default=1000)
    p.add_argument("--out-csv", default="report.csv")
    p.add_argument("--out-json", default="report.json")
    p.add_argument("--self-test-corrupt", type=float, default=0.0,
                   help=argparse.SUPPRESS)  # negative control for the suite itself
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors exit 1, --help exits 0
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
