import math
from dataclasses import replace

import numpy as np
import pytest

from futuresopt import (ModelParams, RiskPrefs, adaptive_simpson, corr_rho12,
                        drift_mu, pair_from_dynamics, pair_position, phi_pair,
                        phi_pair_rate, phi_pair_rate_from_dynamics, phi_single,
                        phi_single_rate, single_position, single_wealth_stats,
                        three_futures_singularity, value_and_ce, vol_sigma,
                        wealth_moments)

T1 = 13.0 / 12.0
T2 = 14.0 / 12.0


def test_single_position_frozen(params, prefs):
    out1 = single_position(0.0, 100.0, T1, params, prefs)
    out2 = single_position(0.0, 100.0, T2, params, prefs)
    assert out1.positions[0] == pytest.approx(-0.30522091322779993, rel=1e-12)
    assert out2.positions[0] == pytest.approx(-0.32016997653149487, rel=1e-12)
    # cash = position * price by construction
    assert out1.cash[0] == pytest.approx(100.0 * out1.positions[0], rel=1e-15)


def test_single_matches_ratio_form(params, prefs):
    for t in (0.0, 0.3, 0.7):
        got = single_position(t, 80.0, T1, params, prefs).positions[0]
        want = drift_mu(t, T1, params) / (prefs.gamma * 80.0 * vol_sigma(t, T1, params) ** 2)
        assert got == pytest.approx(want, rel=1e-13)


def test_pair_position_frozen(params, prefs):
    out = pair_position(0.0, 100.0, 100.0, T1, T2, params, prefs, debug_check=True)
    pi1, pi2 = out.positions
    assert pi1 == pytest.approx(5.214000091026725, rel=1e-12)
    assert pi2 == pytest.approx(-5.493365170391804, rel=1e-12)
    assert pi1 + pi2 == pytest.approx(-0.2793650793650784, rel=1e-10)
    assert out.cash[0] == pytest.approx(521.4000091026725, rel=1e-12)
    assert out.cash[1] == pytest.approx(-549.3365170391803, rel=1e-12)
    # a long leg and a short leg of similar magnitude
    assert pi1 > 0.0 > pi2


def test_pair_components_reported(params, prefs):
    out = pair_position(0.0, 100.0, 100.0, T1, T2, params, prefs)
    assert out.components["mu1"] == drift_mu(0.0, T1, params)
    assert out.components["sigma2"] == vol_sigma(0.0, T2, params)
    assert out.components["rho12"] == corr_rho12(0.0, T1, T2, params)


def test_pair_two_routes_agree_on_random_inputs(params, prefs):
    rng = np.random.default_rng(314)
    worst = 0.0
    for _ in range(100):
        p = ModelParams(mu=rng.uniform(-0.1, 0.1), kappa=rng.uniform(0.2, 2.0),
                        alpha=rng.uniform(-0.1, 0.1), eta=rng.uniform(0.15, 0.8),
                        eta_bar=rng.uniform(0.15, 0.8), rho=rng.uniform(-0.85, 0.85),
                        lam=rng.uniform(-0.1, 0.1), r=rng.uniform(0.0, 0.05))
        t1 = rng.uniform(0.15, 2.0)
        t2 = t1 + rng.uniform(1.0 / 24.0, 1.0)
        t = rng.uniform(0.0, 0.9 * t1)
        f1, f2 = rng.uniform(20.0, 200.0, size=2)
        pr = RiskPrefs(gamma=rng.uniform(0.003, 0.1), horizon=t1)
        got = pair_position(t, f1, f2, t1, t2, p, pr).positions
        ref = pair_from_dynamics(pr.gamma, f1, f2,
                                 drift_mu(t, t1, p), drift_mu(t, t2, p),
                                 vol_sigma(t, t1, p), vol_sigma(t, t2, p),
                                 corr_rho12(t, t1, t2, p))
        scale = max(abs(ref[0]), abs(ref[1]))
        worst = max(worst, abs(got[0] - ref[0]) / scale, abs(got[1] - ref[1]) / scale)
    # near-degenerate corners (tiny maturity gap, kappa*T ~ 4) cost a decade
    # of cancellation over the verification-suite draws
    assert worst < 1e-9


def test_pair_antisymmetric_in_contract_order(params, prefs):
    a = pair_position(0.2, 95.0, 105.0, T1, T2, params, prefs)
    b = pair_position(0.2, 105.0, 95.0, T2, T1, params, prefs)
    assert a.positions[0] == pytest.approx(b.positions[1], rel=1e-13)
    assert a.positions[1] == pytest.approx(b.positions[0], rel=1e-13)


def test_cash_exposure_ignores_price_level(params, prefs):
    lo = pair_position(0.1, 50.0, 50.0, T1, T2, params, prefs)
    hi = pair_position(0.1, 200.0, 200.0, T1, T2, params, prefs)
    # cash is computed before any division by price, so this is exact
    assert lo.cash == hi.cash
    s_lo = single_position(0.1, 50.0, T1, params, prefs)
    s_hi = single_position(0.1, 200.0, T1, params, prefs)
    assert s_lo.cash == s_hi.cash


def test_positions_scale_inversely_with_price(params, prefs):
    out1 = single_position(0.0, 50.0, T1, params, prefs)
    out2 = single_position(0.0, 100.0, T1, params, prefs)
    assert out1.positions[0] == pytest.approx(2.0 * out2.positions[0], rel=1e-14)


def test_zero_position_without_risk_premia(prefs):
    p = ModelParams(mu=0.03, kappa=0.8, alpha=0.0, eta=0.45, eta_bar=0.5,
                    rho=0.75, lam=0.0, r=0.03)
    out = pair_position(0.0, 100.0, 100.0, T1, T2, p, prefs)
    assert out.positions == (0.0, 0.0)
    assert single_position(0.0, 100.0, T1, p, prefs).positions == (0.0,)


def test_array_time_inputs(params, prefs):
    ts = np.array([0.0, 0.25, 0.5])
    out = pair_position(ts, 100.0, 100.0, T1, T2, params, prefs)
    assert out.positions[0].shape == (3,)
    first = pair_position(0.0, 100.0, 100.0, T1, T2, params, prefs)
    assert out.positions[0][0] == pytest.approx(first.positions[0], rel=1e-15)


def test_entry_validation(params, prefs):
    with pytest.raises(ValueError, match="exceed"):
        single_position(1.5, 100.0, T1, params, prefs)  # past the horizon
    with pytest.raises(ValueError, match="positive"):
        single_position(0.0, -100.0, T1, params, prefs)
    with pytest.raises(ValueError, match="exceed"):
        pair_position(1.1, 100.0, 100.0, T1, T2, params, prefs)


def test_near_collision_rejected(params, prefs):
    with pytest.raises(ValueError, match="differ"):
        pair_position(0.0, 100.0, 100.0, T1, T1 + 1e-7, params, prefs)


def test_phi_pair_frozen_and_linear(params, prefs):
    assert phi_pair(0.0, params, prefs) == pytest.approx(0.00845714285714286, rel=1e-13)
    assert phi_pair(prefs.horizon, params, prefs) == 0.0
    # linear in time to the horizon
    assert phi_pair(0.5, params, prefs) == pytest.approx(
        0.5 * phi_pair(0.0, params, prefs), rel=1e-14)
    assert phi_pair(0.0, params, prefs) >= 0.0


def test_phi_single_frozen(params, prefs):
    assert phi_single(0.0, T1, params, prefs) == pytest.approx(
        0.0014183647370022965, rel=1e-12)
    assert phi_single(0.0, T2, params, prefs) == pytest.approx(
        0.0017821030601614855, rel=1e-12)
    assert phi_single(prefs.horizon, T1, params, prefs) == 0.0


def test_phi_single_decreases_with_time(params, prefs):
    ts = np.linspace(0.0, 1.0, 9)
    vals = [phi_single(t, T1, params, prefs) for t in ts]
    assert all(a > b or (a == b == 0.0) for a, b in zip(vals, vals[1:]))


def test_phi_pair_quadrature_route(params, prefs):
    quad = adaptive_simpson(lambda s: phi_pair_rate_from_dynamics(s, T1, T2, params),
                            0.0, prefs.horizon)
    assert quad == pytest.approx(phi_pair(0.0, params, prefs), rel=1e-10)


def test_phi_validation(params, prefs):
    with pytest.raises(ValueError, match="horizon"):
        phi_single(1.2, T1, params, prefs)
    with pytest.raises(ValueError, match="maturity"):
        phi_single(0.0, 0.5, params, prefs)  # contract dies before the horizon
    with pytest.raises(ValueError, match="horizon"):
        phi_pair(1.2, params, prefs)


def test_value_and_ce_frozen(params, prefs):
    rep = value_and_ce(0.0, phi_pair(0.0, params, prefs), prefs)
    assert rep.certainty_equivalent == pytest.approx(0.8457142857142859, rel=1e-12)
    assert rep.value == pytest.approx(-math.exp(-0.00845714285714286), rel=1e-13)
    rep1 = value_and_ce(0.0, phi_single(0.0, T1, params, prefs), prefs)
    rep2 = value_and_ce(0.0, phi_single(0.0, T2, params, prefs), prefs)
    assert rep1.certainty_equivalent == pytest.approx(0.14183647370022964, rel=1e-12)
    assert rep2.certainty_equivalent == pytest.approx(0.17821030601614854, rel=1e-12)
    # wealth shifts the certainty equivalent one for one
    rep_w = value_and_ce(3.0, phi_pair(0.0, params, prefs), prefs)
    assert rep_w.certainty_equivalent == pytest.approx(
        3.0 + rep.certainty_equivalent, rel=1e-14)


def test_wealth_moments_frozen_and_identity(params, prefs):
    wm = wealth_moments(params, prefs)
    assert wm.mu_w == pytest.approx(1.6914285714285715, rel=1e-13)
    assert wm.sigma_w == pytest.approx(13.005493344846904, rel=1e-13)
    assert wm.sigma_w ** 2 == pytest.approx(wm.mu_w / prefs.gamma, rel=1e-15)


def test_phi_equals_half_gamma_muw(params, prefs):
    wm = wealth_moments(params, prefs)
    for t in (0.0, 0.31, 0.9):
        assert phi_pair(t, params, prefs) == pytest.approx(
            prefs.gamma * wm.mu_w * (prefs.horizon - t) / 2.0, rel=1e-14)


def test_phi_and_moments_ignore_alpha_and_kappa(params, prefs):
    base = (phi_pair(0.0, params, prefs), wealth_moments(params, prefs))
    for a in (-0.2, 0.15):
        p = replace(params, alpha=a)
        assert phi_pair(0.0, p, prefs) == base[0]
        assert wealth_moments(p, prefs) == base[1]
    for k in (0.4, 1.6):
        p = replace(params, kappa=k)
        assert phi_pair(0.0, p, prefs) == base[0]
        assert wealth_moments(p, prefs) == base[1]
    # the rate assembled from kappa-dependent pieces agrees too
    for k in (0.4, 0.8, 1.6):
        p = replace(params, kappa=k)
        got = phi_pair_rate_from_dynamics(0.3, T1, T2, p)
        assert got == pytest.approx(phi_pair_rate(params), rel=1e-12)


def test_single_wealth_stats(params, prefs):
    mean, var = single_wealth_stats(0.0, T1, params, prefs)
    phi = phi_single(0.0, T1, params, prefs)
    assert mean == pytest.approx(2.0 * phi / prefs.gamma, rel=1e-15)
    assert var == pytest.approx(2.0 * phi / prefs.gamma ** 2, rel=1e-15)


def test_phi_single_rate_is_squared_sharpe(params):
    t = 0.2
    m = drift_mu(t, T1, params)
    s = vol_sigma(t, T1, params)
    assert phi_single_rate(t, T1, params) == pytest.approx(m * m / (2 * s * s), rel=1e-15)


def test_three_futures_singular(params):
    rep = three_futures_singularity(0.0, (100.0, 100.0, 100.0),
                                    (T1, T2, 15.0 / 12.0), params)
    assert abs(rep.scaled_det) < 1e-10
    assert rep.rank == 2
    assert rep.matrix.shape == (3, 3)
    svals = rep.singular_values
    assert svals[0] > svals[1] > svals[2] >= 0.0
    assert svals[2] < 1e-10 * svals[0]


def test_three_futures_validation(params):
    with pytest.raises(ValueError, match="three"):
        three_futures_singularity(0.0, (100.0, 100.0), (T1, T2, 1.25), params)
    with pytest.raises(ValueError, match="positive"):
        three_futures_singularity(0.0, (100.0, -1.0, 100.0), (T1, T2, 1.25), params)
    with pytest.raises(ValueError, match="maturity"):
        three_futures_singularity(1.2, (100.0, 100.0, 100.0), (T1, T2, 1.25), params)


def test_value_and_ce_validation(prefs):
    with pytest.raises(ValueError, match="finite"):
        value_and_ce(float("nan"), 0.0, prefs)
