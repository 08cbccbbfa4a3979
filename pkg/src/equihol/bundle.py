"""Concrete G-equivariant U(1)-bundles with invariant connections.

Two presentations are provided here; the weighted Hopf fixture over S^3 lives
in :mod:`equihol.quotient`.

``CocycleBundle``
    The trivial bundle R^2 x U(1) with the lattice Z^2 acting through a cocycle
    ``theta``, ``phi(x, u) = (phi x, u theta_phi(x))``, and connection
    ``Xi = dz/z - 2 pi i rho``.  Invariance of the connection is equivalent
    to ``phi^* rho - rho = -(i / 2 pi) dlog theta_phi``.

``SphereFrameBundle``
    Oriented orthonormal frames of the round S^2 with the Levi-Civita
    connection and the natural SO(3) action.  Local trivialisations come from
    two sections: the unit ``d/dtheta`` field of spherical coordinates with poles
    on +-z, and the same construction with poles on +-x.

Curvature is a scalar density against a fixed area element (dx^dy on R^2, the
round area form on S^2).  Momentum exists only for continuous groups;
``momentum`` refuses discrete presentations.

Sign conventions (checked in the tests against direct frame transport): with
the ``hat``/``vee`` convention of :mod:`equihol.lie`, the frame bundle has
``mu_X(x) = -<vee(X), x> / 2 pi`` and curvature density ``1 / 2 pi``; the
principal-chart connection form is ``rho = -cos(theta) dphi / 2 pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import IntegrationError, ValidationError
from .lie import DeckElement, Frame, Rotation, RotationPath, fundamental_field, so3_exp
from .numerics import FD_STEP, five_point, unit

TWO_PI = 2 * math.pi
INVARIANCE_TOL = 1e-8
CURVATURE_STEP = 1e-3


@dataclass(frozen=True, eq=False)
class FiberPoint:
    """Point ``(x, u)`` of a globally trivialised bundle."""

    x: np.ndarray
    u: complex


@dataclass(frozen=True, eq=False)
class InvariantOneForm:
    """A 1-form with the group elements it is declared invariant under.

    ``evaluate(points, vectors)`` is vectorised: (N, d), (N, d) -> (N,).
    """

    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    generators: tuple = ()
    label: str = "beta"
    dim: int = 2

    def __call__(self, points, vectors):
        return self.evaluate(np.atleast_2d(points), np.atleast_2d(vectors))

    def __add__(self, other: "InvariantOneForm") -> "InvariantOneForm":
        def evaluate(p, v):
            return self.evaluate(p, v) + other.evaluate(p, v)
        # keep the declared symmetries that the sum still has
        probe = InvariantOneForm(evaluate, (), "", self.dim)
        pts, vecs = _probe_points(self.dim)
        gens = tuple(g for g in self.generators + other.generators
                     if InvariantOneForm(evaluate, (g,), "", self.dim).residual(pts, vecs)
                     <= INVARIANCE_TOL)
        return InvariantOneForm(probe.evaluate, gens, f"{self.label}+{other.label}", self.dim)

    def residual(self, points, vectors) -> float:
        """Worst ``|beta_{phi x}(phi_* v) - beta_x(v)|`` over the generators."""
        worst = 0.0
        for g in self.generators:
            lhs = self.evaluate(g.act(points), g.push(vectors))
            worst = max(worst, float(np.abs(lhs - self.evaluate(points, vectors)).max()))
        return worst


def _probe_points(dim: int):
    rng = np.random.default_rng(1)
    if dim == 3:
        pts = unit(rng.normal(size=(64, 3)))
        return pts, np.cross(pts, rng.normal(size=(64, 3)))
    return rng.uniform(-2, 2, size=(64, dim)), rng.normal(size=(64, dim))


def constant_form(c1: float, c2: float) -> InvariantOneForm:
    """``c1 dx + c2 dy`` on R^2, invariant under every translation."""
    gens = (DeckElement(1, 0), DeckElement(0, 1))
    return InvariantOneForm(lambda p, v: c1 * v[:, 0] + c2 * v[:, 1], gens,
                            f"{c1:g}dx+{c2:g}dy")


def periodic_form(a: float) -> InvariantOneForm:
    """``a sin(2 pi x) dy``: lattice-periodic and not closed."""
    gens = (DeckElement(1, 0), DeckElement(0, 1))
    return InvariantOneForm(lambda p, v: a * np.sin(TWO_PI * p[:, 0]) * v[:, 1], gens,
                            f"{a:g}sin(2pi x)dy")


def axial_form(c: float) -> InvariantOneForm:
    """``c (x dy - y dx)`` on S^2; invariant under rotations about the z axis.

    For ``c = 0`` the form is invariant under all of SO(3) and says so.
    """
    gens = tuple(Rotation.about((0, 0, 1), a) for a in (0.7, 2.3, -1.9))
    if c == 0:
        gens += (Rotation.about((1, 0, 0), 0.9), Rotation.about((0, 1, 0), -1.3))
    return InvariantOneForm(lambda p, v: c * (p[:, 0] * v[:, 1] - p[:, 1] * v[:, 0]), gens,
                            f"{c:g}(x dy - y dx)", dim=3)


# -- cocycle bundles over R^2 ------------------------------------------------

class TrivializedFibers:
    """Fibre operations shared by globally trivialised presentations."""

    kind = "trivialized"

    def default_fiber(self, x) -> FiberPoint:
        return FiberPoint(np.asarray(x, dtype=float), 1.0 + 0j)

    def act_fiber(self, phi, y: FiberPoint) -> FiberPoint:
        return FiberPoint(phi.act(y.x), y.u * complex(np.asarray(self.theta(phi, y.x)).ravel()[0]))

    def fiber_offset(self, y: FiberPoint, target: FiberPoint) -> complex:
        return y.u / target.u

    def check_fiber(self, y: FiberPoint, x) -> None:
        gap = float(np.linalg.norm(np.asarray(y.x) - np.asarray(x)))
        if gap > 1e-9 or abs(abs(y.u) - 1.0) > 1e-12:
            raise ValidationError(f"start point is not in the fibre over gamma(0) (gap {gap:.3e})")


@dataclass(frozen=True, eq=False)
class CocycleBundle(TrivializedFibers):
    """Trivial bundle over R^2 with a Z^2 action given by a cocycle.

    ``cocycle(phi, points)`` returns complex values of modulus one;
    ``rho(points)`` returns covectors, both vectorised over (N, 2) points.
    """

    name: str
    cocycle: Callable[[DeckElement, np.ndarray], np.ndarray]
    rho: Callable[[np.ndarray], np.ndarray]
    generators: tuple = (DeckElement(1, 0), DeckElement(0, 1))
    group = "Z^2"
    dim = 2

    identity = DeckElement(0, 0)

    def contains(self, phi) -> bool:
        return isinstance(phi, DeckElement)

    def theta(self, phi, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return self.cocycle(phi, x)

    def rho_along(self, points, velocities) -> np.ndarray:
        """``rho_x(v)`` row by row."""
        return np.einsum("ij,ij->i", self.rho(points), velocities)

    def curvature_density(self, x) -> np.ndarray:
        """``d rho`` against dx^dy, by central differences."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        ex, ey = np.array([FD_STEP, 0.0]), np.array([0.0, FD_STEP])
        dyrho_x = (self.rho(x + ey)[:, 0] - self.rho(x - ey)[:, 0]) / (2 * FD_STEP)
        dxrho_y = (self.rho(x + ex)[:, 1] - self.rho(x - ex)[:, 1]) / (2 * FD_STEP)
        return dxrho_y - dyrho_x

    def cocycle_residual(self, rng, n: int = 64) -> float:
        """Worst ``|theta_{g'g}(x) - theta_g(x) theta_{g'}(g x)|`` on random samples."""
        worst = 0.0
        for _ in range(n):
            g = DeckElement(*rng.integers(-3, 4, size=2))
            g2 = DeckElement(*rng.integers(-3, 4, size=2))
            x = rng.uniform(-2, 2, size=(1, 2))
            lhs = self.theta(g2 * g, x)
            rhs = self.theta(g, x) * self.theta(g2, g.act(x))
            worst = max(worst, float(np.abs(lhs - rhs).max()))
        return worst

    def invariance_residual(self, rng, n: int = 64, h: float = FD_STEP) -> float:
        """Worst violation of ``phi^* rho - rho = -(i / 2 pi) dlog theta_phi``."""
        x = rng.uniform(-2, 2, size=(n, 2))
        worst = 0.0
        for g in self.generators:
            for v in np.eye(2):
                pulled = np.einsum("ij,j->i", self.rho(g.act(x)), v)
                base = np.einsum("ij,j->i", self.rho(x), v)
                ratio = self.theta(g, x + h * v) / self.theta(g, x - h * v)
                dlog = np.angle(ratio) / (2 * TWO_PI * h)
                worst = max(worst, float(np.abs(pulled - base - dlog).max()))
        return worst

    def validate(self, seed: int = 0) -> "CocycleBundle":
        rng = np.random.default_rng(seed)
        c = self.cocycle_residual(rng)
        if c > 1e-10:
            raise ValidationError(f"{self.name}: cocycle condition fails ({c:.3e})")
        r = self.invariance_residual(rng)
        if r > INVARIANCE_TOL:
            raise ValidationError(f"{self.name}: connection is not invariant ({r:.3e})")
        return self


def make_heisenberg_torus_bundle() -> CocycleBundle:
    """``theta_(m,n)(x, y) = exp(2 pi i m y)``, ``rho = x dy``; quotient has Chern number 1."""

    def cocycle(g, p):
        return np.exp(1j * TWO_PI * g.m * p[:, 1])

    def rho(p):
        return np.column_stack([np.zeros(len(p)), p[:, 0]])

    return CocycleBundle("heisenberg-torus", cocycle, rho).validate()


def make_flat_plane_bundle(c1: float, c2: float) -> CocycleBundle:
    def cocycle(g, p):
        return np.ones(len(p), dtype=complex)

    def rho(p):
        return np.tile([c1, c2], (len(p), 1)).astype(float)

    return CocycleBundle(f"flat-plane:c1={c1:g},c2={c2:g}", cocycle, rho).validate()


# -- the frame bundle of S^2 ---------------------------------------------------

_POLES = (np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0]))


def _section(x: np.ndarray, chart: int) -> np.ndarray:
    """Unit tangent field pointing away from the chart's north pole."""
    a = _POLES[chart]
    s = -a + (x @ a)[..., None] * x
    n = np.linalg.norm(s, axis=-1, keepdims=True)
    if np.any(n < 1e-6):
        raise IntegrationError(f"chart {chart} section is singular here")
    return s / n


def _chart_for(x: np.ndarray) -> int:
    return 0 if abs(float(x[2])) < 0.9 else 1


def _tangent_basis(x: np.ndarray):
    """Positively oriented orthonormal basis (u, w) of T_x S^2, u x w = x."""
    x = np.asarray(x, dtype=float)
    ref = np.array([0.0, 0.0, 1.0]) if abs(x[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = unit(ref - (ref @ x) * x)
    return u, np.cross(x, u)


@dataclass(frozen=True, eq=False)
class SphereFrameBundle:
    """Levi-Civita connection on the frame bundle of S^2, optionally shifted.

    A shift by an invariant 1-form ``beta`` replaces the connection by
    ``Xi - 2 pi i p^* beta``; the acting group shrinks to the elements ``beta``
    is declared invariant under.
    """

    shift: InvariantOneForm | None = None
    kind = "frame"
    dim = 3

    identity = Rotation.identity()

    @property
    def name(self) -> str:
        return "sphere-frame" if self.shift is None else f"sphere-frame+shift:{self.shift.label}"

    @property
    def group(self) -> str:
        if self.shift is None:
            return "SO(3)"
        north = np.array([0.0, 0.0, 1.0])
        moves_pole = any(float(np.abs(g.act(north) - north).max()) > 1e-10
                         for g in self.shift.generators)
        return "SO(3)" if moves_pole else "SO(2)_z"

    def contains(self, phi) -> bool:
        if not isinstance(phi, Rotation):
            return False
        if self.group == "SO(3)":
            return True
        return float(np.abs(phi.act([0.0, 0.0, 1.0]) - [0.0, 0.0, 1.0]).max()) < 1e-10

    @staticmethod
    def exp(v) -> Rotation:
        return so3_exp(v)

    @staticmethod
    def exp_path(v):
        return RotationPath.exp_path(v)

    # fibre operations
    def default_fiber(self, x) -> Frame:
        x = np.asarray(x, dtype=float)
        return Frame(x, _tangent_basis(x)[0])

    def act_fiber(self, phi: Rotation, y: Frame) -> Frame:
        return Frame(phi.act(y.x), phi.act(y.e))

    def fiber_offset(self, y: Frame, target: Frame) -> complex:
        return complex(math.cos(target.angle_to(y)), math.sin(target.angle_to(y)))

    def check_fiber(self, y: Frame, x) -> None:
        gap = float(np.linalg.norm(y.x - np.asarray(x)))
        if gap > 1e-9:
            raise ValidationError(f"start frame is not over gamma(0) (gap {gap:.3e})")

    # local trivialisations
    def connection_form(self, x, v, chart: int | None = None) -> np.ndarray:
        """``rho^Psi_x(v)`` for the chart section, vectorised over rows of x, v.

        Computed as the covariant derivative of the section along ``v``
        projected on the second frame leg, by central differences.
        """
        x = np.atleast_2d(np.asarray(x, dtype=float))
        v = np.atleast_2d(np.asarray(v, dtype=float))
        if chart is None:
            chart = _chart_for(x[0])
        h = FD_STEP
        s = _section(x, chart)
        ds = (_section(unit(x + h * v), chart) - _section(unit(x - h * v), chart)) / (2 * h)
        rho = -np.einsum("ij,ij->i", ds, np.cross(x, s)) / TWO_PI
        if self.shift is not None:
            rho = rho + self.shift(x, v)
        return rho

    def chart_phase(self, R: Rotation, x, chart: int) -> float:
        """Angle ``delta`` of the local cocycle: ``R s(x) = s(Rx) turned by delta``."""
        x = np.asarray(x, dtype=float)
        y = R.act(x)
        Rs = R.act(_section(x[None], chart)[0])
        s = _section(y[None], chart)[0]
        return math.atan2(float(Rs @ np.cross(y, s)), float(Rs @ s))

    def momentum(self, v, x, chart: int | None = None) -> float:
        """``mu_X(x) = a_X(x) - rho(X_M(x))`` in a local trivialisation."""
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        if chart is None:
            chart = _chart_for(x)
        # a_X = (i / 2 pi) d/dt theta_{exp(tX)} and theta = exp(i delta)
        ddelta = (self.chart_phase(so3_exp(FD_STEP * v), x, chart)
                  - self.chart_phase(so3_exp(-FD_STEP * v), x, chart)) / (2 * FD_STEP)
        a = -ddelta / TWO_PI
        return a - float(self.connection_form(x, fundamental_field(v, x), chart)[0])

    def curvature_density(self, x) -> np.ndarray:
        """``d rho`` against the area form, in normal-ish coordinates at each point."""
        X = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty(len(X))
        H = CURVATURE_STEP
        for k, p in enumerate(X):
            u, w = _tangent_basis(p)
            chart = _chart_for(p)

            def comp(a, b, direction):
                raw = p + a * u + b * w
                q = unit(raw)
                dq = (direction - (q @ direction) * q) / np.linalg.norm(raw)
                return float(self.connection_form(q, dq, chart)[0])

            d_a_rho_b = five_point(lambda s: comp(s, 0.0, w), H)
            d_b_rho_a = five_point(lambda s: comp(0.0, s, u), H)
            out[k] = d_a_rho_b - d_b_rho_a
        return out


# -- module-level operations -------------------------------------------------

def curvature(b, x):
    """Curvature density of ``b`` at ``x`` (scalar, or array for stacked points)."""
    x = np.asarray(x, dtype=float)
    out = b.curvature_density(x)
    return float(out[0]) if x.ndim == 1 else out


def momentum(b, X, x) -> float:
    """Momentum ``mu_X(x)``; ``X`` is an algebra element of the bundle's group."""
    if not hasattr(b, "momentum"):
        raise TypeError(f"{b.name}: the acting group is discrete, there is no momentum")
    return b.momentum(X, x)


def equivariant_curvature(b, X, x) -> tuple[float, float]:
    return curvature(b, x), momentum(b, X, x)


def shift_connection(b, beta: InvariantOneForm):
    """Connection ``Xi - 2 pi i p^* beta`` on the same equivariant bundle."""
    if isinstance(b, CocycleBundle):
        pts, vecs = _probe_points(2)
        worst = beta.residual(pts, vecs)
        if worst > INVARIANCE_TOL:
            raise ValidationError(f"shift form is not invariant (worst residual {worst:.3e})")
        rho = b.rho
        return CocycleBundle(f"{b.name}+{beta.label}", b.cocycle,
                             lambda p: rho(p) + _covector(beta, p), b.generators)
    if isinstance(b, SphereFrameBundle):
        pts, vecs = _probe_points(3)
        worst = beta.residual(pts, vecs)
        if worst > INVARIANCE_TOL:
            raise ValidationError(f"shift form is not invariant (worst residual {worst:.3e})")
        return SphereFrameBundle(beta if b.shift is None else b.shift + beta)
    if hasattr(b, "shifted"):
        return b.shifted(beta)
    raise TypeError(f"cannot shift {type(b).__name__}")


def _covector(beta: InvariantOneForm, p: np.ndarray) -> np.ndarray:
    n = len(p)
    ex = np.tile([1.0, 0.0], (n, 1))
    ey = np.tile([0.0, 1.0], (n, 1))
    return np.column_stack([beta(p, ex), beta(p, ey)])


def momentum_closed_form(v, x) -> float:
    """Reference momentum of the unshifted frame bundle, ``-<v, x> / 2 pi``."""
    return -float(np.asarray(v, float) @ np.asarray(x, float)) / TWO_PI


def cartan_residual(b, v, x, h: float = CURVATURE_STEP) -> float:
    """Worst component of ``iota_{X_M} omega - d mu_X`` at ``x`` on S^2.

    ``omega`` is the curvature density times the area form; the derivative of
    the momentum is taken along the sphere with a five-point stencil.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    dens = curvature(b, x)
    XM = fundamental_field(v, x)
    chart = _chart_for(x)
    worst = 0.0
    for w in _tangent_basis(x):
        iota = dens * float(x @ np.cross(XM, w))
        dmu = five_point(lambda s: b.momentum(v, unit(x + s * w), chart), h)
        worst = max(worst, abs(iota - dmu))
    return worst
