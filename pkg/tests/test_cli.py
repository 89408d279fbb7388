import json
import math

import pytest

from futuresopt.cli import main

BASE_CONFIG = """\
mu = 0.010
kappa = 0.800
alpha = 0.0
eta = 0.450
eta_bar = 0.500
rho = 0.750
lambda = 0.050
r = 0.001
gamma = 0.01
horizon = 1.0
T1 = 1.0833333333333333
T2 = 1.1666666666666667
"""

DATE_CONFIG = """\
mu = 0.010
kappa = 0.800
eta = 0.450
eta_bar = 0.500
rho = 0.750
lambda = 0.050
r = 0.001
gamma = 0.01
T1_date = 2014-06-20
T2_date = 2014-07-22
"""

PRICES = """\
date,F1,F2
2014-03-03,101.3,100.8
2014-03-10,102.0,101.4
2014-03-17,101.1,100.7
2014-03-24,100.2,99.9
2014-03-31,99.5,99.3
"""


@pytest.fixture
def config(tmp_path):
    p = tmp_path / "model.cfg"
    p.write_text(BASE_CONFIG)
    return str(p)


@pytest.fixture
def date_config(tmp_path):
    p = tmp_path / "dated.cfg"
    p.write_text(DATE_CONFIG)
    return str(p)


@pytest.fixture
def prices(tmp_path):
    p = tmp_path / "prices.csv"
    p.write_text(PRICES)
    return str(p)


# ------------------------------------------------------------------- usage

def test_no_subcommand_is_usage_error():
    assert main([]) == 1


def test_help_exits_zero():
    assert main(["--help"]) == 0


def test_missing_required_flag():
    assert main(["sweep"]) == 1


def test_missing_config_file(tmp_path):
    assert main(["ce", "--config", str(tmp_path / "nope.cfg")]) == 1


def test_unknown_config_key(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text(BASE_CONFIG + "bogus = 1\n")
    assert main(["ce", "--config", str(p)]) == 1


# ---------------------------------------------------------------------- ce

def test_ce_prints_and_writes_json(config, tmp_path, capsys):
    out = tmp_path / "ce.json"
    assert main(["ce", "--config", config, "--json", str(out)]) == 0
    text = capsys.readouterr().out
    assert "ce_pair = 0.845714285714285" in text
    assert "ce_single_1 = 0.14183647370021" in text
    assert "ce_single_2 = 0.17821030601613" in text
    payload = json.loads(out.read_text())
    assert payload["phi_pair"] == pytest.approx(0.00845714285714286, rel=1e-12)
    assert payload["mu_w"] == pytest.approx(1.6914285714285715, rel=1e-12)
    assert payload["config"]["lambda"] == 0.05
    assert payload["config"]["T1"] == pytest.approx(13.0 / 12.0)
    assert payload["ce_pair"] > payload["ce_single_1"] + payload["ce_single_2"]


def test_ce_requires_numeric_maturities(date_config):
    assert main(["ce", "--config", date_config]) == 1


# ------------------------------------------------------------------- sweep

def test_sweep_eta_bar_monotonic(config, tmp_path):
    out = tmp_path / "sweep.csv"
    rc = main(["sweep", "--config", config, "--param", "eta_bar",
               "--lo", "0.25", "--hi", "0.75", "--n", "11",
               "--outputs", "pi1,pi2,ce_pair", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "param_value,pi1,pi2,ce_pair"
    assert len(lines) == 12
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    pi1 = [r[1] for r in rows]
    pi2 = [r[2] for r in rows]
    assert all(v > 0.0 for v in pi1) and all(a > b for a, b in zip(pi1, pi1[1:]))
    assert all(v < 0.0 for v in pi2) and all(a < b for a, b in zip(pi2, pi2[1:]))


def test_sweep_lambda_ce_increasing_convex(config, tmp_path):
    out = tmp_path / "lam.csv"
    rc = main(["sweep", "--config", config, "--param", "lambda",
               "--lo", "0.01", "--hi", "0.25", "--n", "9",
               "--outputs", "ce_pair", "--out", str(out)])
    assert rc == 0
    ce = [float(line.split(",")[1]) for line in out.read_text().splitlines()[1:]]
    diffs = [b - a for a, b in zip(ce, ce[1:])]
    assert all(d > 0.0 for d in diffs)
    assert all(b > a for a, b in zip(diffs, diffs[1:]))  # convex


def test_sweep_rerun_is_byte_identical(config, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--config", config, "--param", "gamma", "--lo", "0.005",
            "--hi", "0.05", "--n", "7", "--outputs", "mu_w,sigma_w,pi1_single"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_invalid_point_leaves_no_file(config, tmp_path, capsys):
    out = tmp_path / "never.csv"
    rc = main(["sweep", "--config", config, "--param", "eta_bar",
               "--lo", "-0.1", "--hi", "0.5", "--n", "5",
               "--outputs", "pi1", "--out", str(out)])
    assert rc == 1
    assert not out.exists()
    assert "eta_bar" in capsys.readouterr().err


def test_sweep_rejects_bad_outputs(config, tmp_path):
    rc = main(["sweep", "--config", config, "--param", "eta", "--lo", "0.3",
               "--hi", "0.5", "--n", "3", "--outputs", "pi1,nope",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 1
    rc = main(["sweep", "--config", config, "--param", "eta", "--lo", "0.3",
               "--hi", "0.5", "--n", "3", "--outputs", "pi1,pi1",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 1


def test_sweep_rejects_unknown_param(config, tmp_path):
    rc = main(["sweep", "--config", config, "--param", "nu", "--lo", "0",
               "--hi", "1", "--n", "2", "--outputs", "pi1",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 1  # argparse choices


# ---------------------------------------------------------------- backtest

def test_backtest_with_date_maturities(date_config, prices, tmp_path, capsys):
    out = tmp_path / "positions.csv"
    summary = tmp_path / "bt.json"
    rc = main(["backtest", "--config", date_config, "--prices", prices,
               "--out", str(out), "--summary", str(summary)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "date,t,F1,F2,pi1,pi2,pi_sum,cash1,cash2"
    assert len(lines) == 6
    first = lines[1].split(",")
    assert first[0] == "2014-03-03"
    assert float(first[1]) == 0.0
    second = lines[2].split(",")
    assert float(second[1]) == pytest.approx(7.0 / 365.0, rel=1e-15)
    # reported sum matches the legs exactly
    for line in lines[1:]:
        f = [float(v) for v in line.split(",")[1:]]
        t, f1, f2, pi1, pi2, pi_sum, c1, c2 = f
        assert pi1 + pi2 == pi_sum
        assert c1 == pytest.approx(pi1 * f1, rel=1e-12)
    payload = json.loads(summary.read_text())
    assert payload["n_rows"] == 5
    assert payload["config"]["day_count"] == "ACT/365"
    assert payload["config"]["start_date"] == "2014-03-03"
    assert payload["config"]["T1"] == pytest.approx(109.0 / 365.0, rel=1e-15)
    assert payload["config"]["T2"] == pytest.approx(141.0 / 365.0, rel=1e-15)


def test_backtest_rerun_is_byte_identical(date_config, prices, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["backtest", "--config", date_config, "--prices", prices,
                 "--out", str(a)]) == 0
    assert main(["backtest", "--config", date_config, "--prices", prices,
                 "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_backtest_numeric_maturities(config, prices, tmp_path):
    out = tmp_path / "p.csv"
    assert main(["backtest", "--config", config, "--prices", prices,
                 "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 6


def test_backtest_rejects_bad_header(date_config, tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("day,F1,F2\n2014-03-03,100,100\n")
    rc = main(["backtest", "--config", date_config, "--prices", str(bad),
               "--out", str(tmp_path / "o.csv")])
    assert rc == 1
    assert "line 1" in capsys.readouterr().err


def test_backtest_rejects_unsorted_dates(date_config, tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("date,F1,F2\n2014-03-03,100,100\n2014-03-10,101,101\n"
                   "2014-03-10,102,102\n")
    rc = main(["backtest", "--config", date_config, "--prices", str(bad),
               "--out", str(tmp_path / "o.csv")])
    assert rc == 1
    assert "line 4" in capsys.readouterr().err


def test_backtest_rejects_bad_price(date_config, tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("date,F1,F2\n2014-03-03,100,-5\n")
    rc = main(["backtest", "--config", date_config, "--prices", str(bad),
               "--out", str(tmp_path / "o.csv")])
    assert rc == 1
    assert "line 2" in capsys.readouterr().err


def test_backtest_rejects_rows_past_maturity(date_config, tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("date,F1,F2\n2014-03-03,100,100\n2014-06-21,101,101\n")
    rc = main(["backtest", "--config", date_config, "--prices", str(bad),
               "--out", str(tmp_path / "o.csv")])
    assert rc == 1
    assert "maturity" in capsys.readouterr().err


def test_backtest_rejects_mixed_maturity_styles(tmp_path, prices):
    p = tmp_path / "mixed.cfg"
    p.write_text(BASE_CONFIG + "T1_date = 2014-06-20\nT2_date = 2014-07-22\n")
    rc = main(["backtest", "--config", str(p), "--prices", prices,
               "--out", str(tmp_path / "o.csv")])
    assert rc == 1


# ---------------------------------------------------------------- simulate

def test_simulate_wealth_csv_and_summary(config, tmp_path):
    out = tmp_path / "paths.csv"
    summary = tmp_path / "sim.json"
    rc = main(["simulate", "--config", config, "--paths", "200", "--steps", "16",
               "--seed", "7", "--out", str(out), "--summary", str(summary)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "path,step,t,x,delta,F1,F2,wealth"
    assert len(lines) == 1 + 100 * 17  # capped at --max-csv-paths paths
    payload = json.loads(summary.read_text())
    assert payload["n_paths"] == 200
    assert payload["measure"] == "P"
    assert payload["terminal"]["wealth_mean_analytic"] == pytest.approx(
        1.6914285714285715, rel=1e-12)
    assert abs(payload["terminal"]["wealth_mean_z"]) < 4.0
    assert payload["config"]["rho"] == 0.75


def test_simulate_rerun_is_byte_identical(config, tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / f"{name}.csv"
        summary = tmp_path / f"{name}.json"
        rc = main(["simulate", "--config", config, "--paths", "64", "--steps", "8",
                   "--seed", "3", "--out", str(out), "--summary", str(summary)])
        assert rc == 0
        outs.append((out.read_bytes(), summary.read_bytes()))
    assert outs[0] == outs[1]


def test_simulate_single_contract(config, tmp_path):
    out = tmp_path / "single.csv"
    rc = main(["simulate", "--config", config, "--paths", "32", "--steps", "8",
               "--contracts", "1", "--out", str(out)])
    assert rc == 0
    assert out.read_text().splitlines()[0] == "path,step,t,x,delta,F1,wealth"


def test_simulate_q_measure_state_only(config, tmp_path):
    summary = tmp_path / "q.json"
    rc = main(["simulate", "--config", config, "--paths", "64", "--steps", "8",
               "--measure", "Q", "--record", "x,delta", "--summary", str(summary)])
    assert rc == 0
    payload = json.loads(summary.read_text())
    assert payload["measure"] == "Q"
    assert "wealth_mean" not in payload["terminal"]
    assert payload["terminal"]["x_mean"] == pytest.approx(math.log(100.0), abs=0.5)


def test_simulate_rejects_wealth_under_q(config, capsys):
    rc = main(["simulate", "--config", config, "--paths", "8", "--steps", "4",
               "--measure", "Q"])
    assert rc == 1
    assert "physical" in capsys.readouterr().err


def test_simulate_memory_guard(config, capsys):
    rc = main(["simulate", "--config", config, "--paths", "200000",
               "--steps", "500", "--max-mem-mb", "10"])
    assert rc == 1
    err = capsys.readouterr().err
    assert "MiB" in err and "--max-mem-mb" in err


def test_simulate_csv_needs_state_recorded(config, tmp_path, capsys):
    rc = main(["simulate", "--config", config, "--paths", "8", "--steps", "4",
               "--record", "wealth", "--out", str(tmp_path / "x.csv")])
    assert rc == 1
    assert "record" in capsys.readouterr().err


def test_simulate_rejects_bad_record_key(config):
    assert main(["simulate", "--config", config, "--paths", "8", "--steps", "4",
                 "--record", "x,spam"]) == 1


# ------------------------------------------------------------------ verify

VERIFY_FAST = ["--paths", "4000", "--steps-per-year", "100", "--grid-size", "200"]


def test_verify_passes_and_writes_reports(config, tmp_path, capsys):
    out_csv = tmp_path / "report.csv"
    out_json = tmp_path / "report.json"
    rc = main(["verify", "--config", config, *VERIFY_FAST,
               "--out-csv", str(out_csv), "--out-json", str(out_json)])
    assert rc == 0
    text = capsys.readouterr().out
    assert "0 failed" in text
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "name,status,observed,threshold,detail"
    payload = json.loads(out_json.read_text())
    assert payload["n_fail"] == 0
    assert payload["config"]["mc_paths"] == 4000
    assert payload["config"]["gamma"] == 0.01


def test_verify_reports_are_byte_identical(config, tmp_path):
    runs = []
    for name in ("a", "b"):
        out_csv = tmp_path / f"{name}.csv"
        out_json = tmp_path / f"{name}.json"
        assert main(["verify", "--config", config, *VERIFY_FAST,
                     "--out-csv", str(out_csv), "--out-json", str(out_json)]) == 0
        runs.append((out_csv.read_bytes(), out_json.read_bytes()))
    assert runs[0] == runs[1]


def test_verify_self_test_corruption_fails(config, tmp_path, capsys):
    out_csv = tmp_path / "report.csv"
    out_json = tmp_path / "report.json"
    rc = main(["verify", "--config", config, *VERIFY_FAST,
               "--self-test-corrupt", "0.01",
               "--out-csv", str(out_csv), "--out-json", str(out_json)])
    assert rc == 2
    assert "2 failed" in capsys.readouterr().out
    payload = json.loads(out_json.read_text())
    failed = {c["name"] for c in payload["checks"] if c["status"] == "fail"}
    assert failed == {"ode_a_closed_vs_rk4_T1", "ode_a_closed_vs_rk4_T2"}
