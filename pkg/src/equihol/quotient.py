"""Quotient holonomy, sampling classification tests and the prequantisation check.

Discrete quotients
    For a lattice-equivariant cocycle bundle over R^2 the quotient bundle over
    the torus is trivialised over every unit cell ``c + [0, 1]^2`` by the section
    ``[q] -> [(q - c, 1)]``.  :func:`discrete_quotient_holonomy` transports along
    the torus loop using only these local sections, paying a cocycle factor
    each time the lift crosses into a new cell, and compares the result with
    the equivariant holonomy of the lift upstairs.

Hopf quotient
    ``S^3 -> S^2`` with its round connection; the weighted bundle over S^3 has
    cocycle ``theta_z = z^k`` and connection form ``c eta`` with ``eta`` the
    standard contact form.  The quotient holonomy of a loop on S^2 is the
    equivariant holonomy of a horizontal lift, taken with respect to the
    closing phase of that lift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import curves as C
from .bundle import InvariantOneForm, SphereFrameBundle, TrivializedFibers
from .errors import IntegrationError, ValidationError
from .holonomy import (DEFAULT_STEPS, equivariant_holonomy, line_integral,
                       _check_steps)
from .lie import FIELD_SIGN, DeckElement, Phase, PhasePath, so3_exp
from .numerics import FD_STEP, five_point, stage_times, unit
from .report import HolonomyCheckReport, Verdict

TWO_PI = 2 * math.pi
HOPF_DRIFT_LIMIT = 1e-8

PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


# -- loop descriptions ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class QuotientLoopSpec:
    """A loop downstairs represented by a lift closed up by a group element."""

    lift: C.Curve
    element: object
    label: str = "loop"

    def __post_init__(self):
        gap = C.endpoint_gap(self.element, self.lift)
        if gap > C.ENDPOINT_TOL:
            raise ValidationError(f"lift does not close up to the element (gap {gap:.3e})")


def lattice_loop(m: int, n: int, start=(0.0, 0.0), via=()) -> QuotientLoopSpec:
    """Torus loop of class ``(m, n)`` lifted to a polyline from ``start``."""
    s = np.asarray(start, float)
    pts = [s, *(np.asarray(p, float) for p in via), s + np.array([m, n], float)]
    return QuotientLoopSpec(C.planar_polyline(pts), DeckElement(m, n), f"class({m},{n})")


# -- the torus quotient ---------------------------------------------------

def _crossings(gamma: C.Curve, a: float, b: float, pa, pb) -> list[float]:
    """Parameters in ``(a, b]`` where a coordinate of ``gamma`` meets an integer."""
    out = []
    for k in range(2):
        fa, fb = math.floor(pa[k]), math.floor(pb[k])
        if fa == fb:
            continue
        if abs(fb - fa) > 1:
            raise IntegrationError("lift crosses several cell walls in one step; raise the step count")
        wall = max(fa, fb)
        lo, hi = a, b
        glo = gamma(lo)[k] - wall
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            gm = gamma(mid)[k] - wall
            if (gm < 0) == (glo < 0):
                lo, glo = mid, gm
            else:
                hi = mid
        out.append(0.5 * (lo + hi))
    return out


def torus_chart_holonomy(b, spec: QuotientLoopSpec, steps: int = DEFAULT_STEPS) -> Phase:
    """Holonomy of the torus loop computed from the cell trivialisations only."""
    _check_steps(steps)
    gamma = spec.lift
    t0, _, t1, _ = stage_times(gamma, steps)
    knots = np.concatenate([[0.0], t1])
    P = gamma(knots)
    cuts = [0.0]
    for i in range(len(knots) - 1):
        cuts.extend(sorted(_crossings(gamma, knots[i], knots[i + 1], P[i], P[i + 1])))
        cuts.append(float(knots[i + 1]))
    cuts = np.array(sorted(set(cuts)))
    a, bb = cuts[:-1], cuts[1:]
    keep = bb - a > 0
    a, bb = a[keep], bb[keep]
    m = 0.5 * (a + bb)
    cells = np.floor(gamma(m))

    def rho_shifted(t, side):
        return b.rho_along(gamma(t) - cells, gamma.velocity(t, side))

    inc = (bb - a) / 6.0 * (rho_shifted(a, 1) + 4 * rho_shifted(m, 1) + rho_shifted(bb, -1))
    w = complex(np.exp(1j * TWO_PI * inc.sum()))
    # transitions between consecutive cells
    changed = np.any(cells[1:] != cells[:-1], axis=1)
    for j in np.nonzero(changed)[0]:
        new, old = cells[j + 1], cells[j]
        phi = DeckElement(*(new - old))
        w /= complex(b.theta(phi, gamma(bb[j]) - new)[0])
    # bring the end back into the chart of the start point
    home = cells[0] + spec.element.vector
    if np.any(home != cells[-1]):
        phi = DeckElement(*(home - cells[-1]))
        w /= complex(b.theta(phi, gamma.end - home)[0])
    return Phase(w)


def discrete_quotient_holonomy(b, spec: QuotientLoopSpec, tol: float = 1e-7,
                               steps: int = DEFAULT_STEPS) -> HolonomyCheckReport:
    """Torus holonomy from cell charts against ``Hol_phi`` of the lift upstairs."""
    if not isinstance(spec.element, DeckElement):
        raise ValidationError("the torus quotient needs a lattice element")
    down = torus_chart_holonomy(b, spec, steps)
    up = equivariant_holonomy(b, spec.element, spec.lift)
    return HolonomyCheckReport("torus-quotient-holonomy", down.value, up.value, tol,
                               details={"class": spec.element.to_json(), "loop": spec.label})


# -- the weighted Hopf bundle ----------------------------------------------

def _to_c2(x) -> np.ndarray:
    x = np.asarray(x, float)
    return x[..., 0::2] + 1j * x[..., 1::2]


def _to_r4(z) -> np.ndarray:
    z = np.asarray(z, complex)
    out = np.empty(z.shape[:-1] + (4,))
    out[..., 0::2], out[..., 1::2] = z.real, z.imag
    return out


def contact_form(points, velocities) -> np.ndarray:
    """``eta(v) = Im <z, v>``, which is 1 on the unit generator of the circle action."""
    z, v = _to_c2(points), _to_c2(velocities)
    return np.einsum("ij,ij->i", z.conj(), v).imag


def hopf_projection(z) -> np.ndarray:
    z = np.atleast_2d(np.asarray(z, complex))
    return np.einsum("ni,kij,nj->nk", z.conj(), PAULI, z).real


def hopf_section(x) -> np.ndarray:
    """A point of S^3 over ``x``, regular away from the south pole (or north pole)."""
    x1, x2, x3 = (float(v) for v in x)
    if x3 >= -0.5:
        z = np.array([1 + x3, x1 + 1j * x2]) / math.sqrt(2 * (1 + x3))
    else:
        z = np.array([x1 - 1j * x2, 1 - x3]) / math.sqrt(2 * (1 - x3))
    return z


@dataclass(frozen=True, eq=False)
class WeightedHopfBundle(TrivializedFibers):
    """S^3 x U(1) with ``z . (x, u) = (z x, u z^k)`` and ``rho = c eta``."""

    k: int = 1
    c: float = 0.0
    group = "U(1)"
    dim = 4
    identity = Phase(1.0)

    @property
    def name(self) -> str:
        return f"hopf-weighted:k={self.k},c={self.c:g}"

    def contains(self, phi) -> bool:
        return isinstance(phi, Phase)

    def theta(self, phi: Phase, x):
        x = np.atleast_2d(np.asarray(x, float))
        return np.full(len(x), phi.value**self.k, dtype=complex)

    def rho_along(self, points, velocities) -> np.ndarray:
        return self.c * contact_form(points, velocities)

    @staticmethod
    def exp(lam) -> Phase:
        return Phase.from_angle(float(np.asarray(lam, float).ravel()[0]))

    @staticmethod
    def exp_path(lam):
        return PhasePath.exp_path(float(np.asarray(lam, float).ravel()[0]))

    def fundamental_field(self, lam: float, x) -> np.ndarray:
        return _to_r4(FIELD_SIGN * 1j * lam * _to_c2(x))

    def momentum(self, lam, x) -> float:
        """``a_X - rho(X_M)`` with ``a_X`` from the derivative of the cocycle phase."""
        lam = float(np.asarray(lam, float).ravel()[0])
        x = np.asarray(x, float)
        # theta_{exp(tX)}(x) = exp(i k lam t); a_X = (i / 2 pi) d/dt theta at 0
        dtheta = (self.theta(self.exp(FD_STEP * lam), x)[0]
                  - self.theta(self.exp(-FD_STEP * lam), x)[0]) / (2 * FD_STEP)
        a = (1j * dtheta / TWO_PI).real
        return a - float(self.rho_along(x[None], self.fundamental_field(lam, x)[None])[0])

    def cocycle_residual(self, rng, n: int = 32) -> float:
        worst = 0.0
        for _ in range(n):
            g, g2 = Phase.from_angle(rng.uniform(-4, 4)), Phase.from_angle(rng.uniform(-4, 4))
            x = _to_r4(unit(rng.normal(size=2) + 1j * rng.normal(size=2)))[None]
            lhs = self.theta(g2 * g, x)
            rhs = self.theta(g, x) * self.theta(g2, g.act(x))
            worst = max(worst, float(np.abs(lhs - rhs).max()))
        return worst

    def invariance_residual(self, rng, n: int = 32) -> float:
        """Worst ``|rho_{g x}(g v) - rho_x(v) + (i / 2 pi) dlog theta_g(v)|``."""
        z = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
        x = _to_r4(z / np.linalg.norm(z, axis=1, keepdims=True))
        v = rng.normal(size=(n, 4))
        worst = 0.0
        for ang in (0.7, -2.1, 3.0):
            g = Phase.from_angle(ang)
            ratio = self.theta(g, x + FD_STEP * v) / self.theta(g, x - FD_STEP * v)
            dlog = np.angle(ratio) / (2 * TWO_PI * FD_STEP)
            res = self.rho_along(g.act(x), g.push(v)) - self.rho_along(x, v) - dlog
            worst = max(worst, float(np.abs(res).max()))
        return worst

    def validate(self, seed: int = 0) -> "WeightedHopfBundle":
        rng = np.random.default_rng(seed)
        if self.cocycle_residual(rng) > 1e-10 or self.invariance_residual(rng) > 1e-8:
            raise ValidationError(f"{self.name}: invalid cocycle presentation")
        return self


def hopf_momentum_closed_form(k: int, c: float, lam: float) -> float:
    """``mu`` of the weighted Hopf bundle; constant on S^3."""
    return -lam * k / TWO_PI - FIELD_SIGN * c * lam


@dataclass(frozen=True, eq=False)
class HopfLift:
    times: np.ndarray
    z: np.ndarray
    velocities: np.ndarray
    closing: Phase
    curve: C.Curve
    max_drift: float


def _hopf_generators(gamma: C.Curve, t, side):
    d = gamma.velocity(t, side)
    return 0.5 * np.einsum("nk,kij->nij", d, PAULI)


def hopf_horizontal_lift(gamma: C.Curve, steps: int = DEFAULT_STEPS, z0=None) -> HopfLift:
    """Horizontal lift for the round connection, ``z' = (1/2)(gamma' . sigma) z``.

    The generator is Hermitian and traceless on the tangent directions, so the
    flow keeps ``|z| = 1`` and ``Im <z, z'> = 0``; a step moving ``|z|`` by more
    than ``HOPF_DRIFT_LIMIT`` aborts.
    """
    _check_steps(steps)
    t0, tm, t1, h = stage_times(gamma, steps)
    A0, Am, A1 = _hopf_generators(gamma, t0, 1), _hopf_generators(gamma, tm, 1), _hopf_generators(gamma, t1, -1)
    eye = np.eye(2)
    hh = h[:, None, None]
    K2 = Am @ (eye + 0.5 * hh * A0)
    K3 = Am @ (eye + 0.5 * hh * K2)
    K4 = A1 @ (eye + hh * K3)
    M = eye + hh / 6.0 * (A0 + 2 * K2 + 2 * K3 + K4)
    z = hopf_section(gamma.start) if z0 is None else np.asarray(z0, complex)
    if abs(float(np.linalg.norm(hopf_projection(z)[0] - gamma.start))) > 1e-9:
        raise ValidationError("start point of the lift is not over gamma(0)")
    zs = np.empty((len(M) + 1, 2), complex)
    zs[0] = z
    a, b = complex(z[0]), complex(z[1])
    worst = 0.0
    for i, m in enumerate(M.reshape(len(M), 4).tolist()):
        a, b = m[0] * a + m[1] * b, m[2] * a + m[3] * b
        n = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        worst = max(worst, abs(n - 1.0))
        if abs(n - 1.0) > HOPF_DRIFT_LIMIT:
            raise IntegrationError(f"Hopf lift left S^3 by {abs(n - 1.0):.3e} in step {i}")
        a, b = a / n, b / n
        zs[i + 1] = (a, b)
    times = np.concatenate([[0.0], t1])
    vel = np.einsum("nij,nj->ni", _hopf_generators(gamma, times, -1), zs)
    vel[0] = _hopf_generators(gamma, np.array([0.0]), 1)[0] @ zs[0]
    closing = Phase(np.vdot(zs[0], zs[-1]))
    return HopfLift(times, zs, vel, closing, gamma, worst)


def lift_curve(lift: HopfLift) -> C.Curve:
    """The lift as a C^1 curve in R^4 (cubic Hermite through the RK4 samples)."""
    return C.hermite(lift.times, _to_r4(lift.z), _to_r4(lift.velocities), "hopf-lift")


def hopf_quotient_holonomy(b: WeightedHopfBundle, gamma: C.Curve, steps: int = DEFAULT_STEPS,
                           reference: complex | None = None,
                           tol: float = 1e-6) -> tuple[Phase, HolonomyCheckReport]:
    """Quotient holonomy of a loop on S^2 and a check of it.

    The result is ``Hol_g(lift)`` with ``g`` the closing phase of the
    horizontal lift.  With ``reference`` the check compares against it;
    otherwise it compares with ``g^-k``, which is what the result must be when
    the lift is horizontal (the contact form vanishes on it).
    """
    gap = float(np.linalg.norm(gamma.end - gamma.start))
    if gap > C.ENDPOINT_TOL:
        raise ValidationError(f"the quotient loop is not closed (gap {gap:.3e})")
    lift = hopf_horizontal_lift(gamma, steps)
    up = lift_curve(lift)
    result = equivariant_holonomy(b, lift.closing, up)
    right = (lift.closing ** (-b.k)).value if reference is None else complex(reference)
    rep = HolonomyCheckReport("hopf-quotient-holonomy", result.value, right, tol,
                              details={"closing_phase": lift.closing.value, "k": b.k,
                                       "c": b.c, "drift": lift.max_drift,
                                       "against": "closed form" if reference is not None
                                       else "closing phase power"})
    return result, rep


def latitude_cap_area(theta0: float) -> float:
    return TWO_PI * (1.0 - math.cos(theta0))


# -- sampling classification tests --------------------------------------------

def _check_compatible(bA, bB) -> None:
    if bA.group != bB.group or bA.dim != bB.dim:
        raise ValidationError(f"cannot compare {bA.name} ({bA.group}) with {bB.name} ({bB.group})")


def isomorphism_test(bA, bB, sampler, n: int, tol: float = 1e-7,
                     steps: int = DEFAULT_STEPS) -> Verdict:
    """Compare equivariant holonomies on ``n`` sampled ``(phi, gamma)`` pairs.

    Agreement everywhere yields ``indistinguishable-at-n``, which is a
    statement about the sample only.
    """
    _check_compatible(bA, bB)
    worst, witnesses, first = 0.0, [], None
    for i, smp in enumerate(sampler.samples(n)):
        ha = equivariant_holonomy(bA, smp.phi, smp.curve, steps=steps).value
        hb = equivariant_holonomy(bB, smp.phi, smp.curve, steps=steps).value
        d = abs(ha - hb)
        worst = max(worst, d)
        if d > tol:
            witnesses.append(i)
            if first is None:
                first = {"index": i, "sample": smp.spec, "left": ha, "right": hb}
    return Verdict("isomorphism", "distinguished" if witnesses else "indistinguishable-at-n",
                   worst, tol, n=n, seed=sampler.seed, witness=first,
                   details={"witness_indices": witnesses, "bundles": [bA.name, bB.name]})


def triviality_witness_check(b, beta: InvariantOneForm, sampler, n: int, tol: float = 1e-8,
                             steps: int = DEFAULT_STEPS) -> Verdict:
    """Does ``Hol_phi(gamma) = exp(2 pi i int_gamma beta)`` hold on the sample?"""
    rng = np.random.default_rng(3)
    if b.dim == 3:
        pts = unit(rng.normal(size=(64, 3)))
        vecs = np.cross(pts, rng.normal(size=(64, 3)))
    else:
        pts = rng.uniform(-2, 2, size=(64, b.dim))
        vecs = rng.normal(size=(64, b.dim))
    res = beta.residual(pts, vecs)
    if res > 1e-8:
        raise ValidationError(f"witness form is not invariant (worst residual {res:.3e})")
    worst, first, bad = 0.0, None, 0
    for i, smp in enumerate(sampler.samples(n)):
        hol = equivariant_holonomy(b, smp.phi, smp.curve, steps=steps).value
        expected = complex(np.exp(2j * math.pi * line_integral(beta, smp.curve)))
        d = abs(hol - expected)
        worst = max(worst, d)
        if d > tol:
            bad += 1
            if first is None:
                first = {"index": i, "sample": smp.spec, "left": hol, "right": expected}
    return Verdict("triviality-witness", "fail" if bad else "pass", worst, tol, n=n,
                   seed=sampler.seed, witness=first,
                   details={"form": beta.label, "bundle": b.name, "failures": bad})


# -- equivariant two-forms and the prequantisation obstruction ----------------

@dataclass(frozen=True)
class EquivariantTwoForm:
    """``s vol + mu`` on S^2 with comoment ``mu_X(x)`` proportional to ``<v_X, x>``.

    The comoment sign follows the fundamental-field convention, so that
    ``iota_{X_M} omega = d mu_X``.
    """

    scale: float

    def density(self, x) -> float:
        return self.scale

    def comoment(self, v, x) -> float:
        return FIELD_SIGN * self.scale * float(np.asarray(v, float) @ np.asarray(x, float))

    def integral(self) -> float:
        """``int_{S^2} omega``."""
        return 2 * TWO_PI * self.scale

    def cartan_residual(self, v, x, h: float = 1e-3) -> float:
        from .bundle import _tangent_basis
        from .lie import fundamental_field
        x = unit(np.asarray(x, float))
        XM = fundamental_field(v, x)
        worst = 0.0
        for w in _tangent_basis(x):
            iota = self.scale * float(x @ np.cross(XM, w))
            dmu = five_point(lambda s: self.comoment(v, unit(x + s * w)), h)
            worst = max(worst, abs(iota - dmu))
        return worst


def snap_to_period(v, tol: float = 1e-10) -> tuple[np.ndarray, int]:
    """Snap ``v`` onto a multiple of ``2 pi`` in length; refuse if ``exp(v)`` is not the identity."""
    v = np.asarray(v, float)
    r = float(np.linalg.norm(v))
    k = round(r / TWO_PI)
    if abs(r - k * TWO_PI) > tol:
        raise ValidationError(f"exp(X) is not the identity: |v| = {r!r} is not a multiple of 2 pi")
    if k == 0:
        return np.zeros(3), 0
    return v * (k * TWO_PI / r), k


def prequantization_obstruction_check(form: EquivariantTwoForm, v, x, tol: float = 1e-6,
                                      steps: int = DEFAULT_STEPS) -> Verdict:
    """Holonomy obstruction to equivariant prequantisation along ``tau_{x,X}``.

    ``exp(X) = e`` makes ``tau_{x,X}`` a loop.  Any prequantisation must have
    ``exp(2 pi i mu_X(x)) = Hol(tau_{x,X})``.  At a point of the rotation axis
    the loop is constant and its holonomy is 1.  Elsewhere the comparison
    needs a reference prequantisation at the same level: when ``int omega`` is
    an even integer ``2m`` the ``m``-th power of the frame bundle serves; for
    other levels the check is inconclusive.
    """
    v, turns = snap_to_period(v)
    x = unit(np.asarray(x, float))
    mu = form.comoment(v, x)
    phase = complex(np.exp(2j * math.pi * mu))
    total = form.integral()
    level = round(total)
    integral_ok = abs(total - level) <= 1e-6
    details = {"momentum": mu, "phase": phase, "integral": total,
               "integral_is_integer": integral_ok, "turns": turns, "scale": form.scale}
    on_axis = float(np.linalg.norm(np.cross(v, x))) < 1e-12
    details["axis_point"] = on_axis
    if on_axis:
        d = abs(phase - 1.0)
        return Verdict("prequantization-obstruction", "obstructed" if d > tol else "not-obstructed",
                       d, tol, details=details)
    if integral_ok and level % 2 == 0:
        tau = C.rotation_orbit(SphereFrameBundle.exp_path(v), x)
        hol = equivariant_holonomy(SphereFrameBundle(), so3_exp(v), tau, steps=steps)
        ref = (hol ** (level // 2)).value
        d = abs(phase - ref)
        details["reference_holonomy"] = ref
        return Verdict("prequantization-obstruction", "not-obstructed" if d <= tol else "fail",
                       d, tol, details=details)
    return Verdict("prequantization-obstruction", "inconclusive", None, tol,
                   details=details)
