"""Small numerical kernels: finite differences and quadrature grids."""

from __future__ import annotations

import numpy as np

FD_STEP = 1e-5


def central(f, h: float = FD_STEP):
    """Second-order central difference of ``f`` at 0."""
    return (f(h) - f(-h)) / (2 * h)


def five_point(f, h: float):
    """Fourth-order central difference of ``f`` at 0."""
    return (f(-2 * h) - 8 * f(-h) + 8 * f(h) - f(2 * h)) / (12 * h)


def step_grid(curve, steps: int) -> list[tuple[float, float, int]]:
    """Split ``[0, 1]`` at the curve's breakpoints into ``(a, b, n)`` pieces.

    Each piece receives a share of ``steps`` proportional to its length in
    parameter space, at least 4.
    """
    return [(a, b, max(4, int(np.ceil(steps * (b - a))))) for a, b in curve.pieces()]


def stage_times(curve, steps: int):
    """Left, mid and right times of every integration step, with step sizes.

    Right endpoints are evaluated one-sidedly from the left so piecewise-C^1
    curves are integrated within each smooth piece.
    """
    left, right = [], []
    for a, b, n in step_grid(curve, steps):
        knots = np.linspace(a, b, n + 1)
        left.append(knots[:-1])
        right.append(knots[1:])
    t0 = np.concatenate(left)
    t1 = np.concatenate(right)
    return t0, 0.5 * (t0 + t1), t1, t1 - t0


def gauss_legendre(n: int, a: float = 0.0, b: float = 1.0):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def unit(v, axis: int = -1):
    return v / np.linalg.norm(v, axis=axis, keepdims=True)
