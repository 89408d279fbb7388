"""Small numerical helpers: adaptive Simpson quadrature, finite differences."""

from __future__ import annotations


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-12, max_depth: int = 40) -> float:
    """Integrate f over [a, b] by recursive adaptive Simpson.

    Interval halving stops once the Richardson estimate |S_fine - S_coarse|/15
    drops below the interval's error budget or the depth cap is hit.  The
    returned value includes the /15 extrapolation correction.  A reversed
    interval integrates with the usual sign flip.
    """
    a, b = float(a), float(b)
    if a != a or b != b:
        raise ValueError(f"bad interval: a={a!r}, b={b!r}")
    if a > b:
        return -adaptive_simpson(f, b, a, tol=tol, max_depth=max_depth)
    if b == a:
        return 0.0

    def simpson(x0, f0, x2, f2):
        x1 = 0.5 * (x0 + x2)
        f1 = f(x1)
        s = (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)
        return x1, f1, s

    def recurse(x0, f0, x2, f2, whole, x1, f1, eps, depth):
        lm, flm, left = simpson(x0, f0, x1, f1)
        rm, frm, right = simpson(x1, f1, x2, f2)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            return left + right + delta / 15.0
        return (recurse(x0, f0, x1, f1, left, lm, flm, 0.5 * eps, depth + 1)
                + recurse(x1, f1, x2, f2, right, rm, frm, 0.5 * eps, depth + 1))

    fa, fb = f(a), f(b)
    m, fm, whole = simpson(a, fa, b, fb)
    return recurse(a, fa, b, fb, whole, m, fm, tol, 0)


def central_diff(f, x: float, h: float) -> float:
    """First derivative by central difference."""
    return (f(x + h) - f(x - h)) / (2.0 * h)


def forward_diff(f, x: float, h: float) -> float:
    """Second-order one-sided first derivative (for left boundaries)."""
    return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)


def backward_diff(f, x: float, h: float) -> float:
    """Second-order one-sided first derivative (for right boundaries)."""
    return (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h)


def grid_derivative(f, x: float, h: float, lo: float, hi: float) -> float:
    """First derivative of f at x, one-sided when x is within h of [lo, hi]."""
    if x - h < lo:
        return forward_diff(f, x, h)
    if x + h > hi:
        return backward_diff(f, x, h)
    return central_diff(f, x, h)
