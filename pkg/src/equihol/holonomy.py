"""Horizontal lifts and every holonomy-valued quantity.

Two integrators are used.  On globally trivialised bundles the lift phase is
``u(t) = u(0) exp(2 pi i int_0^t rho(gamma'))``, accumulated step by step with
Simpson's rule.  On the frame bundle of S^2 the first frame leg is transported
by RK4 on ``V' = -<V, gamma'> gamma``; since the equation is linear, the RK4
step matrices are built in one vectorised pass and then applied one step at a
time with projection back onto the tangent plane and renormalisation.

Equivariant holonomy compares the lift endpoint with the translate of the start
point: ``y(1) = phi(y(0)) . Hol_phi(gamma)``.  On trivialised bundles it is also
evaluated in closed form, ``theta_phi(gamma(0))^-1 exp(2 pi i int rho)``, with an
independent Gauss-Legendre quadrature (:func:`hol_local`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import curves as C
from .bundle import curvature, momentum
from .errors import IntegrationError, ValidationError
from .lie import Frame, Phase
from .numerics import gauss_legendre, stage_times, unit
from .report import HolonomyCheckReport

TWO_PI = 2 * math.pi
DEFAULT_STEPS = 4096
MIN_STEPS = 16
DRIFT_LIMIT = 1e-6


@dataclass(frozen=True, eq=False)
class Lift:
    """Horizontal lift sampled on the integration grid.

    ``track`` holds unit phases (trivialised bundles) or first frame legs
    (frame bundle), one per entry of ``times``.
    """

    bundle: object
    curve: C.Curve
    times: np.ndarray
    points: np.ndarray
    track: np.ndarray
    start: object
    warnings: tuple = ()

    def fiber(self, i: int):
        if self.bundle.kind == "frame":
            return Frame(self.points[i], self.track[i])
        from .bundle import FiberPoint
        return FiberPoint(self.points[i], complex(self.track[i]))

    @property
    def end(self):
        return self.fiber(len(self.times) - 1)

    def projection_error(self) -> float:
        return float(np.abs(self.points - self.curve(self.times)).max())


def _check_steps(steps: int) -> None:
    if int(steps) < MIN_STEPS:
        raise ValidationError(f"need at least {MIN_STEPS} integration steps, got {steps}")


def _simpson_increments(form, curve: C.Curve, steps: int):
    """Per-step Simpson integrals of ``form(points, velocities)`` along ``curve``."""
    t0, tm, t1, h = stage_times(curve, steps)
    f0 = form(curve(t0), curve.velocity(t0, 1))
    fm = form(curve(tm), curve.velocity(tm, 1))
    f1 = form(curve(t1), curve.velocity(t1, -1))
    return t1, h / 6.0 * (f0 + 4.0 * fm + f1)


def line_integral(form: Callable, curve: C.Curve, nodes: int = 16) -> float:
    """``int_gamma form`` by Gauss-Legendre quadrature on every C^1 piece."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    pieces = np.array(curve.pieces())
    a, b = pieces[:, 0:1], pieces[:, 1:2]
    t = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    weights = (0.5 * (b - a) * w).ravel()
    return float(weights @ form(curve(t), curve.velocity(t, 1)))


def _frame_step_matrices(curve: C.Curve, steps: int):
    t0, tm, t1, h = stage_times(curve, steps)

    def gen(t, side):
        g = curve(t)
        d = curve.velocity(t, side)
        return -g[:, :, None] * d[:, None, :]

    A0, Am, A1 = gen(t0, 1), gen(tm, 1), gen(t1, -1)
    eye = np.eye(3)
    hh = h[:, None, None]
    K2 = Am @ (eye + 0.5 * hh * A0)
    K3 = Am @ (eye + 0.5 * hh * K2)
    K4 = A1 @ (eye + hh * K3)
    M = eye + hh / 6.0 * (A0 + 2.0 * K2 + 2.0 * K3 + K4)
    return t1, M, curve(t1)


def _transport_frames(curve: C.Curve, e0: np.ndarray, steps: int):
    t1, M, X = _frame_step_matrices(curve, steps)
    Ms = M.reshape(len(M), 9).tolist()
    Xs = X.tolist()
    a, b, c = (float(v) for v in e0)
    out = np.empty((len(Ms) + 1, 3))
    out[0] = e0
    rows = []
    for i, (m, x) in enumerate(zip(Ms, Xs)):
        p = m[0] * a + m[1] * b + m[2] * c
        q = m[3] * a + m[4] * b + m[5] * c
        r = m[6] * a + m[7] * b + m[8] * c
        d = p * x[0] + q * x[1] + r * x[2]
        p, q, r = p - d * x[0], q - d * x[1], r - d * x[2]
        n = math.sqrt(p * p + q * q + r * r)
        if abs(d) > DRIFT_LIMIT or abs(n - 1.0) > DRIFT_LIMIT:
            raise IntegrationError(
                f"frame drift {max(abs(d), abs(n - 1.0)):.3e} in step {i}; "
                "the curve is too fast for the step count")
        a, b, c = p / n, q / n, r / n
        rows.append((a, b, c))
    out[1:] = rows
    return np.concatenate([[0.0], t1]), out


def horizontal_lift(b, gamma: C.Curve, y0=None, steps: int = DEFAULT_STEPS,
                    tol: float | None = None) -> Lift:
    """Horizontal lift of ``gamma`` through ``y0`` (default: the bundle's choice).

    With ``tol`` given, the lift is repeated at half the step count and a
    warning is attached when the two endpoints differ by more than ``tol``.
    """
    _check_steps(steps)
    if y0 is None:
        y0 = b.default_fiber(gamma.start)
    b.check_fiber(y0, gamma.start)
    if b.kind == "frame":
        times, track = _transport_frames(gamma, y0.e, steps)
        if b.shift is not None:
            _, inc = _simpson_increments(b.shift, gamma, steps)
            ang = TWO_PI * np.concatenate([[0.0], np.cumsum(inc)])
            pts = gamma(times)
            track = np.cos(ang)[:, None] * track + np.sin(ang)[:, None] * np.cross(pts, track)
    else:
        t1, inc = _simpson_increments(b.rho_along, gamma, steps)
        times = np.concatenate([[0.0], t1])
        track = y0.u * np.exp(1j * TWO_PI * np.concatenate([[0.0], np.cumsum(inc)]))
    lift = Lift(b, gamma, times, gamma(times), track, y0)
    if tol is not None and steps >= 2 * MIN_STEPS:
        coarse = horizontal_lift(b, gamma, y0, steps // 2)
        gap = abs(b.fiber_offset(lift.end, coarse.end) - 1.0)
        if gap > tol:
            lift = Lift(b, gamma, lift.times, lift.points, lift.track, y0,
                        (f"step count {steps} may be too small: halving it moves the "
                         f"endpoint by {gap:.3e} > {tol:.1e}",))
    return lift


def holonomy(b, gamma: C.Curve, y0=None, steps: int = DEFAULT_STEPS) -> Phase:
    """``Hol(gamma)`` defined by ``y(1) = y(0) . Hol`` for the horizontal lift."""
    gap = float(np.linalg.norm(gamma.end - gamma.start))
    if gap > C.ENDPOINT_TOL:
        raise ValidationError(f"holonomy needs a closed loop (endpoint gap {gap:.3e})")
    lift = horizontal_lift(b, gamma, y0, steps)
    return Phase(b.fiber_offset(lift.end, lift.start))


def _require_member(b, phi) -> None:
    if not b.contains(phi):
        raise ValidationError(f"{phi!r} is not an element of the group {b.group} of {b.name}")


def hol_local(b, phi, gamma: C.Curve, nodes: int = 16) -> Phase:
    """Closed-form equivariant holonomy on a trivialised bundle."""
    if b.kind != "trivialized":
        raise TypeError(f"{b.name} has no global trivialisation")
    theta = complex(np.asarray(b.theta(phi, gamma.start)).ravel()[0])
    integral = line_integral(b.rho_along, gamma, nodes)
    return Phase(np.exp(1j * TWO_PI * integral) / theta)


def equivariant_holonomy(b, phi, gamma: C.Curve, y0=None, steps: int = DEFAULT_STEPS) -> Phase:
    """``Hol_phi(gamma)`` for ``gamma(1) = phi(gamma(0))``.

    Trivialised bundles use :func:`hol_local`; the frame bundle transports a
    frame and measures its angle against the rotated start frame.
    """
    _require_member(b, phi)
    C.EquivariantLoopClass(phi, gamma)
    if b.kind == "trivialized":
        return hol_local(b, phi, gamma)
    lift = horizontal_lift(b, gamma, y0, steps)
    target = b.act_fiber(phi, lift.start)
    return Phase(b.fiber_offset(lift.end, target))


def equivariant_holonomy_by_lift(b, phi, gamma: C.Curve, y0=None,
                                 steps: int = DEFAULT_STEPS) -> Phase:
    """``Hol_phi(gamma)`` from the integrated lift on any presentation."""
    _require_member(b, phi)
    C.EquivariantLoopClass(phi, gamma)
    lift = horizontal_lift(b, gamma, y0, steps)
    return Phase(b.fiber_offset(lift.end, b.act_fiber(phi, lift.start)))


def isotropy_character(b, phi, x, steps: int = MIN_STEPS) -> Phase:
    """``chi_x(phi)``: equivariant holonomy of the constant curve at a fixed point."""
    return equivariant_holonomy(b, phi, C.constant(x), steps=steps)


# -- regions and curvature integrals ----------------------------------------

@dataclass(frozen=True)
class SphericalCap:
    """Cap of colatitude ``theta0`` about the north pole."""

    theta0: float

    def nodes(self, n: int):
        th, wt = gauss_legendre(n, 0.0, self.theta0)
        ph, wp = gauss_legendre(n, 0.0, TWO_PI)
        T, P = np.meshgrid(th, ph, indexing="ij")
        pts = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], -1)
        w = (wt[:, None] * wp[None, :]) * np.sin(T)
        return pts.reshape(-1, 3), w.ravel()

    def area(self) -> float:
        return TWO_PI * (1.0 - math.cos(self.theta0))

    def boundary(self) -> list[C.Curve]:
        return [C.latitude_loop(self.theta0)]


@dataclass(frozen=True)
class SphericalTriangle:
    """Geodesic triangle; the orientation of (a, b, c) signs the integral."""

    a: tuple
    b: tuple
    c: tuple

    def nodes(self, n: int):
        A, B, Cv = (np.asarray(v, float) / np.linalg.norm(v) for v in (self.a, self.b, self.c))
        u, wu = gauss_legendre(n)
        v, wv = gauss_legendre(n)
        U, V = np.meshgrid(u, v, indexing="ij")
        # collapsed square: (u, v) -> a + u (b - a) + u v (c - b), then normalised
        P = A + U[..., None] * (B - A) + (U * V)[..., None] * (Cv - B)
        Pu = (B - A) + V[..., None] * (Cv - B)
        Pv = U[..., None] * (Cv - B)
        det = np.einsum("...i,...i->...", P, np.cross(Pu, Pv))
        jac = det / np.linalg.norm(P, axis=-1) ** 3
        w = (wu[:, None] * wv[None, :]) * jac
        return unit(P).reshape(-1, 3), w.ravel()

    def area(self) -> float:
        """Signed area from the spherical excess (Van Oosterom-Strackee)."""
        A, B, Cv = (np.asarray(v, float) / np.linalg.norm(v) for v in (self.a, self.b, self.c))
        num = float(A @ np.cross(B, Cv))
        den = 1.0 + float(A @ B + B @ Cv + Cv @ A)
        return 2.0 * math.atan2(num, den)

    def boundary(self) -> list[C.Curve]:
        return [C.spherical_polygon([self.a, self.b, self.c])]


@dataclass(frozen=True)
class PlanarRectangle:
    x0: float
    y0: float
    x1: float
    y1: float

    def nodes(self, n: int):
        x, wx = gauss_legendre(n, self.x0, self.x1)
        y, wy = gauss_legendre(n, self.y0, self.y1)
        X, Y = np.meshgrid(x, y, indexing="ij")
        return np.stack([X, Y], -1).reshape(-1, 2), (wx[:, None] * wy[None, :]).ravel()

    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def boundary(self) -> list[C.Curve]:
        x0, y0, x1, y1 = self.x0, self.y0, self.x1, self.y1
        return [C.planar_polyline([(x0, y0), (x1, y0), (x1, y1), (x0, y1)], closed=True)]


def curvature_integral(b, region, n: int = 12) -> float:
    pts, w = region.nodes(n)
    return float(w @ np.asarray(curvature(b, pts)).ravel())


def gauss_bonnet_check(b, region, tol: float = 1e-6, steps: int = DEFAULT_STEPS,
                       n: int = 12) -> HolonomyCheckReport:
    """Product of boundary holonomies against ``exp(2 pi i int curvature)``."""
    integral = curvature_integral(b, region, n)
    prod = Phase(1.0)
    for loop in region.boundary():
        prod = prod * holonomy(b, loop, steps=steps)
    expected = complex(np.exp(1j * TWO_PI * integral))
    rep = HolonomyCheckReport("boundary-holonomy-vs-curvature", prod.value, expected, tol,
                              details={"curvature_integral": integral,
                                       "region": type(region).__name__})
    if not rep.passed and abs(prod.value - expected.conjugate()) <= tol:
        rep.flags.append("orientation-mismatch")
    return rep


# -- derivative, orbit and homotopy checks -----------------------------------

def _orbit_holonomy_at(b, path, x, t0: float, t: float, steps: int) -> complex:
    sigma = C.rotation_orbit(path.segment(t0, t), x)
    phi = path.element(t) * path.element(t0).inverse()
    return equivariant_holonomy(b, phi, sigma, steps=steps).value


def holonomy_derivative_check(b, path, x, t0: float = 0.0, h: float = 1e-4,
                              tol: float = 1e-4, steps: int = 256) -> HolonomyCheckReport:
    """Central difference of ``t -> Hol_{phi_t}(sigma_{x,t})`` against ``2 pi i mu_X(x)``.

    ``sigma_{x,t}(s) = phi_{t0 + s (t - t0)}(x)`` and ``X`` is the velocity of the
    path at ``t0``.  The reported discrepancy is relative when ``|mu|`` is not
    tiny.  The ratio of successive differences of the quotients at ``h``,
    ``h/2`` and ``h/4`` is reported as an empirical convergence order.
    """
    if not path.element(t0).is_identity():
        raise ValidationError("the path must pass through the identity at t0")
    X = path.algebra_derivative(t0)
    expected = 2j * math.pi * momentum(b, X, x)

    def quotient(step):
        return (_orbit_holonomy_at(b, path, x, t0, t0 + step, steps)
                - _orbit_holonomy_at(b, path, x, t0, t0 - step, steps)) / (2 * step)

    D = [quotient(h / 2**k) for k in range(3)]
    num, den = abs(D[0] - D[1]), abs(D[1] - D[2])
    # no ratio when the quotients agree to round-off (exactly linear behaviour)
    ratio = num / den if den > 1e-14 else None
    relative = abs(expected) > 1e-6
    scale = abs(expected) if relative else 1.0
    rep = HolonomyCheckReport("holonomy-derivative", D[0] / scale, expected / scale, tol,
                              details={"derivative": D[0], "expected": expected,
                                       "relative": relative, "h": h,
                                       "difference_ratio": ratio,
                                       "order": math.log2(ratio) if ratio else None})
    return rep


def exp_orbit_holonomy_check(b, v, x, tol: float = 1e-6,
                             steps: int = DEFAULT_STEPS) -> HolonomyCheckReport:
    """``Hol_{exp X}(tau_{x,X})`` against ``exp(2 pi i mu_X(x))``."""
    tau = C.rotation_orbit(b.exp_path(v), x)
    left = equivariant_holonomy(b, b.exp(v), tau, steps=steps)
    mu = momentum(b, v, x)
    return HolonomyCheckReport("exp-orbit-holonomy", left.value,
                               complex(np.exp(2j * math.pi * mu)), tol,
                               details={"momentum": mu})


def orbit_holonomy(b, path, x, steps: int = DEFAULT_STEPS) -> Phase:
    """``Hol_phi(gamma)`` for the orbit ``gamma(s) = phi_s(x)``, ``phi = phi_1 phi_0^-1``."""
    gamma = C.rotation_orbit(path, x)
    phi = path.element(1.0) * path.element(0.0).inverse()
    return equivariant_holonomy(b, phi, gamma, steps=steps)


def homotopy_invariance_check(b, family: Callable[[float], C.Curve],
                              phi_of: Callable[[float], object],
                              ts: Sequence[float] | None = None, tol: float = 1e-8,
                              steps: int = DEFAULT_STEPS) -> HolonomyCheckReport:
    """Largest change of ``Hol_{phi_t}(h_t)`` along a sampled homotopy.

    Every ``h_t`` must start at ``h_0(0)`` and lie in the class of ``phi_t``.
    """
    ts = np.linspace(0.0, 1.0, 9) if ts is None else np.asarray(ts, float)
    x = family(float(ts[0])).start
    values = []
    for t in ts:
        h_t = family(float(t))
        gap = float(np.linalg.norm(h_t.start - x))
        if gap > C.ENDPOINT_TOL:
            raise ValidationError(f"homotopy moves the base point at t={t:g} (gap {gap:.3e})")
        values.append(equivariant_holonomy(b, phi_of(float(t)), h_t, steps=steps).value)
    k = int(np.argmax([abs(v - values[0]) for v in values]))
    return HolonomyCheckReport("homotopy-invariance", values[k], values[0], tol,
                               details={"worst_t": float(ts[k]), "samples": len(ts),
                                        "end_ratio": values[-1] / values[0]})


# -- homotopy fixtures on the plane -------------------------------------------

def bump_family(p, q, amp: float, waves: int = 1) -> Callable[[float], C.Curve]:
    """``h_t(s) = p + s (q - p) + t amp sin(waves pi s) n`` with ``n`` normal to ``q - p``."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    d = q - p
    nrm = np.array([-d[1], d[0]]) / np.linalg.norm(d)

    def family(t: float) -> C.Curve:
        k = waves * math.pi

        def point(s):
            return p + s[:, None] * d + (t * amp * np.sin(k * s))[:, None] * nrm

        def velocity(s, side):
            return d + (t * amp * k * np.cos(k * s))[:, None] * nrm

        return C.Curve(point, velocity, 2, (), f"bump(t={t:g})")

    return family


def kink_family(p, q, offset) -> Callable[[float], C.Curve]:
    """Two-segment polylines through the midpoint displaced by ``t * offset``."""
    p = np.asarray(p, float)
    q = np.asarray(q, float)
    mid = 0.5 * (p + q)
    off = np.asarray(offset, float)
    return lambda t: C.planar_polyline([p, mid + t * off, q])


def bump_stokes_area(amp: float, waves: int, length: float) -> float:
    """Signed area between the straight segment and the full bump (left of travel)."""
    s, w = gauss_legendre(32)
    return float(w @ (amp * np.sin(waves * math.pi * s))) * length
