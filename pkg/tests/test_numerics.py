import math

import pytest

from futuresopt import adaptive_simpson, central_diff, grid_derivative
from futuresopt.numerics import backward_diff, forward_diff


def test_simpson_exact_for_cubics():
    # Simpson's rule integrates cubics without error, so the adaptive
    # driver should terminate at the first level with the exact value
    got = adaptive_simpson(lambda x: x**3 - 2.0 * x + 1.0, -1.0, 2.0)
    want = (2.0**4 / 4 - 2.0**2 + 2.0) - ((-1.0) ** 4 / 4 - 1.0 - 1.0)
    assert got == pytest.approx(want, abs=1e-14)


def test_simpson_exponential():
    assert adaptive_simpson(math.exp, 0.0, 1.0) == pytest.approx(math.e - 1.0, abs=1e-13)


def test_simpson_sine():
    assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-12)


def test_simpson_runge_function():
    got = adaptive_simpson(lambda x: 1.0 / (1.0 + 25.0 * x * x), 0.0, 1.0)
    assert got == pytest.approx(math.atan(5.0) / 5.0, abs=1e-12)


def test_simpson_oscillatory():
    got = adaptive_simpson(lambda x: math.cos(40.0 * x), 0.0, 1.0)
    assert got == pytest.approx(math.sin(40.0) / 40.0, abs=1e-11)


def test_simpson_degenerate_interval():
    assert adaptive_simpson(math.exp, 1.0, 1.0) == 0.0


def test_simpson_reversed_interval():
    fwd = adaptive_simpson(math.exp, 0.0, 1.0)
    assert adaptive_simpson(math.exp, 1.0, 0.0) == pytest.approx(-fwd, abs=1e-13)


def test_simpson_sqrt_converges_despite_kink():
    got = adaptive_simpson(math.sqrt, 0.0, 1.0, tol=1e-10)
    assert got == pytest.approx(2.0 / 3.0, abs=1e-8)


def test_central_diff_second_order():
    err_h = abs(central_diff(math.sin, 1.0, 1e-3) - math.cos(1.0))
    err_h2 = abs(central_diff(math.sin, 1.0, 1e-4) - math.cos(1.0))
    assert err_h < 1e-6
    # halving-by-ten shrinks the error about 100x
    assert err_h2 < err_h / 10.0


def test_one_sided_diffs_second_order():
    for diff in (forward_diff, backward_diff):
        err = abs(diff(math.exp, 0.5, 1e-4) - math.exp(0.5))
        assert err < 1e-6


def test_grid_derivative_interior_and_boundaries():
    f, df = math.sin, math.cos
    h = 1e-5
    for x, lo, hi in [(0.5, 0.0, 1.0),   # interior: central
                      (0.0, 0.0, 1.0),   # lower edge: forward
                      (1.0, 0.0, 1.0)]:  # upper edge: backward
        assert grid_derivative(f, x, h, lo, hi) == pytest.approx(df(x), abs=1e-8)
