import math

import numpy as np
import pytest

from futuresopt import (AffineCoeffs, a_coeff, affine_coeffs, b_coeff,
                        futures_price, pde_residual, rk4_affine_coeffs)

T1 = 13.0 / 12.0
T2 = 14.0 / 12.0


def test_b_frozen_values(params):
    assert b_coeff(0.0, T1, params) == pytest.approx(-0.7245620193641475, rel=1e-14)
    assert b_coeff(0.0, T2, params) == pytest.approx(-0.7584490989142523, rel=1e-14)
    assert b_coeff(0.0, 1.0, params) == pytest.approx(-0.688338794853473, rel=1e-14)


def test_a_frozen_values(params):
    assert a_coeff(0.0, T1, params) == pytest.approx(-0.023114114441943, rel=1e-12)
    assert a_coeff(0.0, 1.0, params) == pytest.approx(-0.02140731042284494, rel=1e-12)


def test_terminal_conditions(params):
    assert b_coeff(T1, T1, params) == 0.0
    assert a_coeff(T1, T1, params) == 0.0


def test_futures_price_frozen(params):
    x = math.log(100.0)
    assert futures_price(0.5, x, 0.05, 1.0, params) == pytest.approx(
        97.11713424237675, rel=1e-14)
    assert futures_price(0.0, x, 0.05, T1, params) == pytest.approx(
        94.23842155679932, rel=1e-14)
    assert futures_price(0.0, x, 0.05, T2, params) == pytest.approx(
        93.93551890480809, rel=1e-14)
    # at maturity the futures price is the spot
    assert futures_price(T1, x, 0.37, T1, params) == pytest.approx(100.0, rel=1e-15)


def test_scalar_inputs_give_floats(params):
    assert isinstance(b_coeff(0.0, T1, params), float)
    assert isinstance(a_coeff(0.0, T1, params), float)
    assert isinstance(futures_price(0.0, math.log(100.0), 0.05, T1, params), float)


def test_array_broadcasting(params):
    ts = np.linspace(0.0, 1.0, 7)
    bs = b_coeff(ts, T1, params)
    assert bs.shape == ts.shape
    assert bs[0] == b_coeff(0.0, T1, params)
    fs = futures_price(0.0, np.log([90.0, 100.0, 110.0]), 0.05, T1, params)
    assert fs.shape == (3,)
    assert np.all(fs > 0.0)


def test_affine_coeffs_container(params):
    c = affine_coeffs(0.25, T1, params)
    assert isinstance(c, AffineCoeffs)
    assert c.a == a_coeff(0.25, T1, params)
    assert c.b == b_coeff(0.25, T1, params)
    assert c.maturity == T1


def test_past_maturity_rejected(params):
    with pytest.raises(ValueError):
        b_coeff(T1 + 0.01, T1, params)
    with pytest.raises(ValueError):
        a_coeff(T1 + 0.01, T1, params)


def test_closed_form_matches_rk4(params):
    grid = np.linspace(0.0, T1, 1000)
    a_rk, b_rk = rk4_affine_coeffs(params, T1, grid)
    assert np.max(np.abs(a_coeff(grid, T1, params) - a_rk)) < 1e-8
    assert np.max(np.abs(b_coeff(grid, T1, params) - b_rk)) < 1e-8


def test_b_signs_and_monotonicity(params):
    # B is negative before maturity and rises to zero
    ts = np.linspace(0.0, T1, 50)
    bs = b_coeff(ts, T1, params)
    assert np.all(bs[:-1] < 0.0)
    assert np.all(np.diff(bs) > 0.0)
    assert bs[-1] == 0.0


def test_pde_residual_small_at_random_points(params):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        t = rng.uniform(0.0, 0.95 * T1)
        x = rng.uniform(math.log(20.0), math.log(200.0))
        d = rng.uniform(-0.3, 0.5)
        worst = max(worst, abs(pde_residual(t, x, d, T1, params)))
    assert worst < 1e-6


def test_pde_residual_shrinks_with_bump(params):
    # the scheme is second order: a 10x larger bump inflates the residual
    # by about 100x, so the coarse/fine ratio must clear 10 easily
    coarse = abs(pde_residual(0.4, math.log(100.0), 0.05, T1, params, bump=1e-3))
    fine = abs(pde_residual(0.4, math.log(100.0), 0.05, T1, params, bump=1e-4))
    assert coarse / fine > 10.0


def test_pde_residual_near_boundaries(params):
    # one-sided time differences keep the residual finite and small at the
    # very start and close to maturity
    for t in (0.0, T1 - 5e-7):
        assert abs(pde_residual(t, math.log(100.0), 0.05, T1, params)) < 1e-4
