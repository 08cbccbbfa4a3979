"""Piecewise-C^1 curves on S^2, R^2 and S^3 and the curve algebra.

A :class:`Curve` is a pair of vectorised evaluators on ``[0, 1]`` together with
the breakpoints between which it is C^1.  Velocities take a ``side`` argument
(+1 right-sided, -1 left-sided) that only matters at breakpoints.

Concatenation uses the speed-doubling convention: ``(g1 * g2)(t) = g1(2t)`` on
``[0, 1/2]`` and ``g2(2t - 1)`` on ``[1/2, 1]``.  Nothing is reparametrised
implicitly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ValidationError
from .lie import GroupPath

ENDPOINT_TOL = 1e-9
DEFAULT_GRID = 2048
# parameters this close to a knot are treated as the knot, so that one-sided
# velocities survive the round-off of nested reparametrisations
KNOT_SNAP = 1e-9

Evaluator = Callable[[np.ndarray], np.ndarray]
VelocityEvaluator = Callable[[np.ndarray, int], np.ndarray]


@dataclass(frozen=True, eq=False)
class Curve:
    point_fn: Evaluator
    velocity_fn: VelocityEvaluator
    dim: int
    breakpoints: tuple[float, ...] = ()
    label: str = "curve"

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        out = self.point_fn(np.atleast_1d(arr))
        return out[0] if arr.ndim == 0 else out

    def velocity(self, t, side: int = 1):
        arr = np.asarray(t, dtype=float)
        out = self.velocity_fn(np.atleast_1d(arr), side)
        return out[0] if arr.ndim == 0 else out

    @property
    def start(self) -> np.ndarray:
        return self(0.0)

    @property
    def end(self) -> np.ndarray:
        return self(1.0)

    def is_closed(self, tol: float = ENDPOINT_TOL) -> bool:
        return float(np.linalg.norm(self.end - self.start)) <= tol

    def pieces(self) -> list[tuple[float, float]]:
        knots = [0.0, *self.breakpoints, 1.0]
        return [(a, b) for a, b in zip(knots[:-1], knots[1:]) if b > a]

    def sample(self, n: int = 256) -> tuple[np.ndarray, np.ndarray]:
        t = np.linspace(0.0, 1.0, n)
        return t, self(t)

    def length(self, n: int = 64) -> float:
        """Arc length by Gauss-Legendre quadrature on each C^1 piece."""
        nodes, weights = np.polynomial.legendre.leggauss(n)
        total = 0.0
        for a, b in self.pieces():
            t = 0.5 * (b - a) * nodes + 0.5 * (a + b)
            speed = np.linalg.norm(self.velocity(t), axis=-1)
            total += 0.5 * (b - a) * float(weights @ speed)
        return total


@dataclass(frozen=True, eq=False)
class EquivariantLoopClass:
    """A curve with ``gamma(1) = phi(gamma(0))``."""

    phi: object
    gamma: Curve
    tol: float = ENDPOINT_TOL
    gap: float = field(init=False, default=0.0)

    def __post_init__(self):
        gap = endpoint_gap(self.phi, self.gamma)
        if gap > self.tol:
            raise ValidationError(f"curve does not close up to the group element (gap {gap:.3e})")
        object.__setattr__(self, "gap", gap)


def endpoint_gap(phi, gamma: Curve) -> float:
    return float(np.linalg.norm(gamma.end - phi.act(gamma.start)))


# -- curve algebra ---------------------------------------------------------

def concat(c1: Curve, c2: Curve, tol: float = ENDPOINT_TOL) -> Curve:
    if c1.dim != c2.dim:
        raise ValidationError("cannot concatenate curves in different spaces")
    gap = float(np.linalg.norm(c1.end - c2.start))
    if gap > tol:
        raise ValidationError(f"cannot concatenate: endpoint gap {gap:.3e}")

    def point(t):
        first = t <= 0.5
        out = np.empty((len(t), c1.dim))
        if first.any():
            out[first] = c1.point_fn(np.clip(2 * t[first], 0.0, 1.0))
        if (~first).any():
            out[~first] = c2.point_fn(np.clip(2 * t[~first] - 1, 0.0, 1.0))
        return out

    def velocity(t, side):
        t = _snap(t, 0.5)
        first = (t < 0.5) | ((t == 0.5) & (side < 0))
        out = np.empty((len(t), c1.dim))
        if first.any():
            out[first] = 2 * c1.velocity_fn(np.clip(2 * t[first], 0.0, 1.0), side)
        if (~first).any():
            out[~first] = 2 * c2.velocity_fn(np.clip(2 * t[~first] - 1, 0.0, 1.0), side)
        return out

    bps = tuple(b / 2 for b in c1.breakpoints) + (0.5,) + tuple(0.5 + b / 2 for b in c2.breakpoints)
    return Curve(point, velocity, c1.dim, bps, f"({c1.label} * {c2.label})")


def concat_all(curves: Sequence[Curve]) -> Curve:
    """Right-nested concatenation ``c0 * (c1 * (... * cn))``."""
    out = curves[-1]
    for c in reversed(curves[:-1]):
        out = concat(c, out)
    return out


def reverse(c: Curve) -> Curve:
    return Curve(lambda t: c.point_fn(1.0 - t),
                 lambda t, side: -c.velocity_fn(1.0 - t, -side),
                 c.dim,
                 tuple(sorted(1.0 - b for b in c.breakpoints)),
                 f"rev({c.label})")


def act(phi, c: Curve) -> Curve:
    """Pointwise action ``(phi . gamma)(t) = phi(gamma(t))``."""
    return Curve(lambda t: phi.act(c.point_fn(t)),
                 lambda t, side: phi.push(c.velocity_fn(t, side)),
                 c.dim, c.breakpoints, f"g.{c.label}")


def rotation_orbit(path: GroupPath, x) -> Curve:
    """Orbit curve ``s -> phi_s(x)``; with ``path = exp_path(X)`` this is ``s -> exp(sX) x``."""
    x = np.asarray(x, dtype=float)
    return Curve(lambda t: path.orbit_points(t, x),
                 lambda t, side: path.orbit_velocity(t, x),
                 len(x), (), "orbit")


# -- builtin families --------------------------------------------------------

def constant(point) -> Curve:
    p = np.asarray(point, dtype=float)
    return Curve(lambda t: np.broadcast_to(p, (len(t), len(p))).copy(),
                 lambda t, side: np.zeros((len(t), len(p))),
                 len(p), (), "constant")


def latitude_arc(theta0: float, phi0: float, phi1: float) -> Curve:
    """Arc of the circle at colatitude ``theta0`` from longitude ``phi0`` to ``phi1``."""
    s, c = math.sin(theta0), math.cos(theta0)
    span = phi1 - phi0

    def point(t):
        ph = phi0 + span * t
        return np.column_stack([s * np.cos(ph), s * np.sin(ph), np.full_like(ph, c)])

    def velocity(t, side):
        ph = phi0 + span * t
        return np.column_stack([-s * span * np.sin(ph), s * span * np.cos(ph), np.zeros_like(ph)])

    return Curve(point, velocity, 3, (), f"latitude({theta0:g})")


def latitude_loop(theta0: float, phi0: float = 0.0) -> Curve:
    """Counter-clockwise (seen from +z) circle at colatitude ``theta0``."""
    return latitude_arc(theta0, phi0, phi0 + 2 * math.pi)


def _arc_data(p, q):
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    p = p / np.linalg.norm(p)
    q = q / np.linalg.norm(q)
    perp = q - (p @ q) * p
    sin_w = float(np.linalg.norm(perp))
    cos_w = float(p @ q)
    if sin_w < 1e-9 and cos_w < 0:
        raise ValidationError("antipodal endpoints: geodesic is not unique")
    omega = math.atan2(sin_w, cos_w)
    u = perp / sin_w if sin_w > 0 else np.zeros(3)
    return p, u, omega


def geodesic_arc(p, q) -> Curve:
    p, u, w = _arc_data(p, q)

    def point(t):
        return np.cos(w * t)[:, None] * p + np.sin(w * t)[:, None] * u

    def velocity(t, side):
        return w * (-np.sin(w * t)[:, None] * p + np.cos(w * t)[:, None] * u)

    return Curve(point, velocity, 3, (), "geodesic")


def _snap(s, knot=None):
    """Round ``s`` to the nearest integer (or to ``knot``) when within ``KNOT_SNAP``."""
    r = np.round(s) if knot is None else knot
    return np.where(np.abs(s - r) <= KNOT_SNAP, r, s)


def _piecewise(k: int, dim: int, seg_point, seg_velocity, label: str) -> Curve:
    """Curve made of ``k`` pieces on equal parameter intervals."""

    def locate(t, side):
        s = _snap(np.clip(t, 0.0, 1.0) * k)
        idx = np.floor(s).astype(int)
        if side < 0:
            idx = np.where((s == idx) & (idx > 0), idx - 1, idx)
        idx = np.clip(idx, 0, k - 1)
        return idx, s - idx

    def point(t):
        idx, u = locate(t, 1)
        return seg_point(idx, u)

    def velocity(t, side):
        idx, u = locate(t, side)
        return k * seg_velocity(idx, u)

    return Curve(point, velocity, dim, tuple(i / k for i in range(1, k)), label)


def spherical_polyline(vertices, closed: bool = False) -> Curve:
    """Geodesic polygon through ``vertices`` (returning to the first if ``closed``)."""
    V = [np.asarray(v, dtype=float) / np.linalg.norm(v) for v in vertices]
    if closed:
        V = V + [V[0]]
    if len(V) < 2:
        raise ValidationError("need at least two vertices")
    data = [_arc_data(a, b) for a, b in zip(V[:-1], V[1:])]
    P = np.array([d[0] for d in data])
    U = np.array([d[1] for d in data])
    W = np.array([d[2] for d in data])

    def seg_point(i, u):
        w = W[i] * u
        return np.cos(w)[:, None] * P[i] + np.sin(w)[:, None] * U[i]

    def seg_velocity(i, u):
        w = W[i] * u
        return W[i][:, None] * (-np.sin(w)[:, None] * P[i] + np.cos(w)[:, None] * U[i])

    return _piecewise(len(data), 3, seg_point, seg_velocity, "spherical-polygon")


def spherical_polygon(vertices) -> Curve:
    return spherical_polyline(vertices, closed=True)


def planar_polyline(points, closed: bool = False) -> Curve:
    P = [np.asarray(p, dtype=float) for p in points]
    if closed:
        P = P + [P[0]]
    if len(P) < 2:
        raise ValidationError("need at least two points")
    A = np.array(P[:-1])
    D = np.array(P[1:]) - A
    dim = A.shape[1]
    return _piecewise(len(D), dim,
                      lambda i, u: A[i] + u[:, None] * D[i],
                      lambda i, u: D[i],
                      "polyline")


def planar_segment(p, q) -> Curve:
    return planar_polyline([p, q])


def planar_segment_loop(lattice_vector, start=(0.0, 0.0)) -> Curve:
    """Straight lift ``start -> start + (m, n)`` of a lattice class of the torus."""
    s = np.asarray(start, dtype=float)
    return planar_polyline([s, s + np.asarray(lattice_vector, dtype=float)])


def square_loop(side: float = 1.0, origin=(0.0, 0.0)) -> Curve:
    """Counter-clockwise boundary of the axis-aligned square."""
    x0, y0 = origin
    return planar_polyline([(x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)],
                           closed=True)


def from_samples(points, grid: int | None = None) -> Curve:
    """Curve through sampled points on a uniform parameter grid.

    Points on the unit sphere (3 columns, unit norm) are joined by geodesics,
    anything else linearly.  ``grid`` resamples to that many points first.
    """
    P = np.asarray(points, dtype=float)
    if grid is not None and grid != len(P):
        src = np.linspace(0.0, 1.0, len(P))
        dst = np.linspace(0.0, 1.0, grid)
        P = np.column_stack([np.interp(dst, src, P[:, j]) for j in range(P.shape[1])])
        if _on_sphere(P, 1e-3):
            P /= np.linalg.norm(P, axis=1, keepdims=True)
    if _on_sphere(P, 1e-9):
        return spherical_polyline(P)
    return planar_polyline(P)


def _on_sphere(P, tol) -> bool:
    return P.shape[1] == 3 and np.abs(np.linalg.norm(P, axis=1) - 1.0).max() <= tol


def hermite(times, points, velocities, label: str = "sampled") -> Curve:
    """Cubic Hermite interpolant through sampled positions and velocities."""
    T = np.asarray(times, dtype=float)
    P = np.asarray(points, dtype=float)
    D = np.asarray(velocities, dtype=float)

    def locate(t, side):
        j = np.clip(np.searchsorted(T, t), 0, len(T) - 1)
        near = np.abs(T[j] - t) <= KNOT_SNAP * np.maximum(1.0, np.abs(t))
        t = np.where(near, T[j], t)
        i = np.searchsorted(T, t, side="right" if side > 0 else "left") - 1
        i = np.clip(i, 0, len(T) - 2)
        h = T[i + 1] - T[i]
        return i, (t - T[i]) / h, h

    def point(t):
        i, s, h = locate(t, 1)
        s2, s3 = s * s, s * s * s
        h00, h10 = 2 * s3 - 3 * s2 + 1, s3 - 2 * s2 + s
        h01, h11 = -2 * s3 + 3 * s2, s3 - s2
        return (h00[:, None] * P[i] + (h10 * h)[:, None] * D[i]
                + h01[:, None] * P[i + 1] + (h11 * h)[:, None] * D[i + 1])

    def velocity(t, side):
        i, s, h = locate(t, side)
        s2 = s * s
        d00, d10 = (6 * s2 - 6 * s) / h, 3 * s2 - 4 * s + 1
        d01, d11 = (-6 * s2 + 6 * s) / h, 3 * s2 - 2 * s
        return (d00[:, None] * P[i] + d10[:, None] * D[i]
                + d01[:, None] * P[i + 1] + d11[:, None] * D[i + 1])

    return Curve(point, velocity, P.shape[1], tuple(T[1:-1]), label)


def write_csv(curve: Curve, path, n: int = 512) -> None:
    t, pts = curve.sample(n)
    cols = ["t", "x", "y", "z", "w"][: 1 + curve.dim]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for ti, p in zip(t, pts):
            w.writerow([f"{ti:.12g}", *(f"{v:.12g}" for v in p)])


def read_csv(path) -> np.ndarray:
    """Points from a curve dump (the ``t`` column, if present, is dropped)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body if r])
    if header and header[0].strip() == "t":
        data = data[:, 1:]
    return data
