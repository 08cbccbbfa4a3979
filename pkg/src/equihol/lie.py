"""Groups acting on the fixtures: SO(3), U(1) and the lattice Z^2.

Algebra vectors of so(3) are plain length-3 arrays; ``hat`` and ``vee`` convert
between them and antisymmetric matrices with the usual convention
``hat(v) @ w == cross(v, w)``, so ``vee`` is a Lie algebra isomorphism onto
(R^3, x).

Fundamental vector fields use the left-action sign convention
``X_M(x) = d/dt exp(-t X) x`` at ``t = 0``.  The sign is frozen in
``FIELD_SIGN``; nothing else in the package hard-codes it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError

FIELD_SIGN = -1.0

ORTHO_TOL = 1e-12
FRAME_TOL = 1e-9
SMALL_ANGLE = 1e-8


def hat(v) -> np.ndarray:
    """Antisymmetric matrix of the algebra vector ``v``."""
    a, b, c = np.asarray(v, dtype=float)
    return np.array([[0.0, -c, b], [c, 0.0, -a], [-b, a, 0.0]])


def vee(X, tol: float = 1e-12) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape != (3, 3):
        raise ValidationError(f"vee expects a 3x3 matrix, got shape {X.shape}")
    asym = np.abs(X + X.T).max()
    if asym > tol:
        raise ValidationError(f"matrix is not antisymmetric (|X + X^T| = {asym:.3e})")
    return np.array([X[2, 1], X[0, 2], X[1, 0]])


def _rodrigues(v: np.ndarray) -> np.ndarray:
    """Batched exponential of so(3); ``v`` has shape (N, 3)."""
    theta = np.linalg.norm(v, axis=-1)
    K = np.zeros(v.shape[:-1] + (3, 3))
    K[..., 0, 1], K[..., 0, 2] = -v[..., 2], v[..., 1]
    K[..., 1, 0], K[..., 1, 2] = v[..., 2], -v[..., 0]
    K[..., 2, 0], K[..., 2, 1] = -v[..., 1], v[..., 0]
    small = theta < SMALL_ANGLE
    safe = np.where(small, 1.0, theta)
    # Taylor limits of sin(t)/t and (1 - cos t)/t^2
    a = np.where(small, 1.0 - theta**2 / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - theta**2 / 24.0, (1.0 - np.cos(safe)) / safe**2)
    K2 = K @ K
    return np.eye(3) + a[..., None, None] * K + b[..., None, None] * K2


def _gram_schmidt(m: np.ndarray) -> np.ndarray:
    c0 = m[:, 0] / np.linalg.norm(m[:, 0])
    c1 = m[:, 1] - (c0 @ m[:, 1]) * c0
    c1 /= np.linalg.norm(c1)
    return np.column_stack([c0, c1, np.cross(c0, c1)])


@dataclass(frozen=True, eq=False)
class Rotation:
    """An element of SO(3) stored as an orthonormal 3x3 matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValidationError(f"rotation matrix must be 3x3, got {m.shape}")
        drift = np.abs(m.T @ m - np.eye(3)).max()
        if drift > 1e-6 or np.linalg.det(m) < 0:
            raise ValidationError(f"not a rotation (|R^T R - I| = {drift:.3e})")
        if drift > ORTHO_TOL:
            m = _gram_schmidt(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(np.eye(3))

    @classmethod
    def about(cls, axis, angle: float) -> "Rotation":
        axis = np.asarray(axis, dtype=float)
        return so3_exp(angle * axis / np.linalg.norm(axis))

    def __mul__(self, other: "Rotation") -> "Rotation":
        return Rotation(self.matrix @ other.matrix)

    def inverse(self) -> "Rotation":
        return Rotation(self.matrix.T)

    def act(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.matrix.T

    push = act  # the action is linear, so tangent vectors move the same way

    def distance(self, other: "Rotation") -> float:
        return float(np.abs(self.matrix - other.matrix).max())

    def is_identity(self, tol: float = 1e-10) -> bool:
        return self.distance(Rotation.identity()) <= tol

    def to_json(self) -> dict:
        return {"group": "SO(3)", "matrix": self.matrix.tolist()}

    def __repr__(self):
        return f"Rotation({self.matrix.round(6).tolist()})"


def so3_exp(v) -> Rotation:
    """Rotation about ``v / |v|`` by the angle ``|v|``."""
    v = np.asarray(v, dtype=float)
    return Rotation(_rodrigues(v[None, :])[0])


def fundamental_field(v, x) -> np.ndarray:
    """Generator of ``t -> exp(FIELD_SIGN * t * hat(v)) x`` at ``t = 0``.

    Vectorised over leading axes of ``x``.
    """
    v = np.asarray(v, dtype=float)
    return FIELD_SIGN * np.cross(v, np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Phase:
    """A point of U(1).  Renormalised on construction."""

    value: complex

    def __post_init__(self):
        z = complex(self.value)
        r = abs(z)
        if not math.isfinite(r) or r == 0.0:
            raise ValidationError(f"cannot normalise {z!r} to a phase")
        object.__setattr__(self, "value", z / r)

    @classmethod
    def from_angle(cls, angle: float) -> "Phase":
        return cls(cmath.exp(1j * angle))

    @classmethod
    def identity(cls) -> "Phase":
        return cls(1.0)

    @property
    def angle(self) -> float:
        """Principal angle in (-pi, pi]."""
        a = cmath.phase(self.value)
        return math.pi if a == -math.pi else a

    def __mul__(self, other: "Phase") -> "Phase":
        return Phase(self.value * other.value)

    def __truediv__(self, other: "Phase") -> "Phase":
        return Phase(self.value * other.value.conjugate())

    def __pow__(self, k: int) -> "Phase":
        return Phase(self.value**k)

    def inverse(self) -> "Phase":
        return Phase(self.value.conjugate())

    def distance(self, other: "Phase") -> float:
        return abs(self.value - other.value)

    def is_identity(self, tol: float = 1e-10) -> bool:
        return abs(self.value - 1.0) <= tol

    # U(1) acts on C^2 = R^4 by scalar multiplication; points are stored as
    # (Re z1, Im z1, Re z2, Im z2).
    def act(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        z = x[..., 0::2] + 1j * x[..., 1::2]
        w = self.value * z
        out = np.empty_like(x)
        out[..., 0::2], out[..., 1::2] = w.real, w.imag
        return out

    push = act

    def to_json(self) -> dict:
        return {"group": "U(1)", "angle": _sig(self.angle),
                "re": _sig(self.value.real), "im": _sig(self.value.imag)}


def _sig(x: float) -> float:
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class DeckElement:
    """Translation of R^2 by the integer vector (m, n)."""

    m: int
    n: int

    def __post_init__(self):
        for key in ("m", "n"):
            v = getattr(self, key)
            if int(v) != v:
                raise ValidationError(f"deck element needs integers, got {key}={v!r}")
            object.__setattr__(self, key, int(v))

    @classmethod
    def identity(cls) -> "DeckElement":
        return cls(0, 0)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.m, self.n], dtype=float)

    def __mul__(self, other: "DeckElement") -> "DeckElement":
        return DeckElement(self.m + other.m, self.n + other.n)

    def inverse(self) -> "DeckElement":
        return DeckElement(-self.m, -self.n)

    def act(self, p) -> np.ndarray:
        return np.asarray(p, dtype=float) + self.vector

    def push(self, v) -> np.ndarray:
        return np.asarray(v, dtype=float)

    def distance(self, other: "DeckElement") -> float:
        return float(abs(self.m - other.m) + abs(self.n - other.n))

    def is_identity(self, tol: float = 0.0) -> bool:
        return self.m == 0 and self.n == 0

    def to_json(self) -> dict:
        return {"group": "Z^2", "m": self.m, "n": self.n}


@dataclass(frozen=True, eq=False)
class Frame:
    """Oriented orthonormal frame (e, x cross e) of the tangent plane at ``x``."""

    x: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        e = np.array(self.e, dtype=float)
        bad = max(abs(np.linalg.norm(x) - 1.0), abs(np.linalg.norm(e) - 1.0), abs(x @ e))
        if bad > FRAME_TOL:
            raise ValidationError(f"not an orthonormal tangent frame (defect {bad:.3e})")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "e", e)

    @property
    def second(self) -> np.ndarray:
        return np.cross(self.x, self.e)

    def rotated(self, angle: float) -> "Frame":
        """Right action of exp(i angle): turn ``e`` by ``angle`` towards ``x cross e``."""
        return Frame(self.x, math.cos(angle) * self.e + math.sin(angle) * self.second)

    def angle_to(self, other: "Frame") -> float:
        """Oriented angle taking this frame to ``other`` (same base point)."""
        return math.atan2(float(other.e @ self.second), float(other.e @ self.e))


def act_on_frame(R: Rotation, frame: Frame) -> Frame:
    return Frame(R.act(frame.x), R.act(frame.e))


class GroupPath:
    """A piecewise-C^1 path ``t -> phi_t`` in one of the groups, with orbit maps.

    ``orbit_points(t, x)`` and ``orbit_velocity(t, x)`` give ``phi_t x`` and its
    t-derivative for an array of parameters, which is what orbit curves need.
    """

    def element(self, t: float):
        raise NotImplementedError

    def orbit_points(self, t: np.ndarray, x) -> np.ndarray:
        raise NotImplementedError

    def orbit_velocity(self, t: np.ndarray, x) -> np.ndarray:
        raise NotImplementedError

    def algebra_derivative(self, t: float):
        """Right-trivialised velocity ``(d/dt phi_t) phi_t^{-1}`` in the algebra."""
        raise NotImplementedError

    def segment(self, a: float, b: float) -> "GroupPath":
        return _Reparametrized(self, a, b)


class _Reparametrized(GroupPath):
    def __init__(self, base: GroupPath, a: float, b: float):
        self.base, self.a, self.b = base, a, b

    def _t(self, s):
        return self.a + np.asarray(s, dtype=float) * (self.b - self.a)

    def element(self, t):
        return self.base.element(float(self._t(t)))

    def orbit_points(self, t, x):
        return self.base.orbit_points(self._t(t), x)

    def orbit_velocity(self, t, x):
        return (self.b - self.a) * self.base.orbit_velocity(self._t(t), x)

    def algebra_derivative(self, t):
        return (self.b - self.a) * self.base.algebra_derivative(float(self._t(t)))


class RotationPath(GroupPath):
    """Path in SO(3) given by a vectorised matrix function.

    ``matrices(t)`` maps an (N,) array to (N, 3, 3).  Derivatives default to a
    five-point stencil when no analytic derivative is supplied.
    """

    def __init__(self, matrices: Callable[[np.ndarray], np.ndarray],
                 derivatives: Callable[[np.ndarray], np.ndarray] | None = None,
                 h: float = 1e-3):
        self.matrices = matrices
        self._derivatives = derivatives
        self.h = h

    @classmethod
    def exp_path(cls, v) -> "RotationPath":
        """One-parameter subgroup ``t -> exp(t v)``."""
        v = np.asarray(v, dtype=float)
        K = hat(v)

        def mats(t):
            return _rodrigues(np.atleast_1d(t)[:, None] * v)

        return cls(mats, lambda t: K @ mats(t))

    @classmethod
    def from_function(cls, fn: Callable[[float], np.ndarray], **kw) -> "RotationPath":
        return cls(lambda t: np.stack([np.asarray(fn(float(s)), dtype=float)
                                       for s in np.atleast_1d(t)]), **kw)

    def derivatives(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self._derivatives is not None:
            return self._derivatives(t)
        h = self.h
        f = self.matrices
        return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)

    def element(self, t):
        return Rotation(self.matrices(np.array([t]))[0])

    def orbit_points(self, t, x):
        return np.einsum("nij,j->ni", self.matrices(np.atleast_1d(t)), np.asarray(x, float))

    def orbit_velocity(self, t, x):
        return np.einsum("nij,j->ni", self.derivatives(t), np.asarray(x, float))

    def algebra_derivative(self, t):
        M = self.matrices(np.array([t]))[0]
        D = self.derivatives(np.array([t]))[0] @ M.T
        return vee(0.5 * (D - D.T))


class PhasePath(GroupPath):
    """Path ``t -> exp(i f(t))`` in U(1) acting on C^2."""

    def __init__(self, angle: Callable[[np.ndarray], np.ndarray],
                 rate: Callable[[np.ndarray], np.ndarray] | None = None, h: float = 1e-3):
        self.angle = angle
        self.rate = rate
        self.h = h

    @classmethod
    def exp_path(cls, lam: float) -> "PhasePath":
        return cls(lambda t: lam * np.asarray(t, float),
                   lambda t: lam * np.ones_like(np.asarray(t, float)))

    def _rate(self, t):
        if self.rate is not None:
            return self.rate(t)
        h, f = self.h, self.angle
        return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h)

    def element(self, t):
        return Phase.from_angle(float(self.angle(np.array([t]))[0]))

    def orbit_points(self, t, x):
        t = np.atleast_1d(np.asarray(t, float))
        x = np.asarray(x, float)
        z = x[0::2] + 1j * x[1::2]
        w = np.exp(1j * self.angle(t))[:, None] * z[None, :]
        out = np.empty((len(t), 4))
        out[:, 0::2], out[:, 1::2] = w.real, w.imag
        return out

    def orbit_velocity(self, t, x):
        t = np.atleast_1d(np.asarray(t, float))
        pts = self.orbit_points(t, x)
        w = pts[:, 0::2] + 1j * pts[:, 1::2]
        dw = 1j * self._rate(t)[:, None] * w
        out = np.empty_like(pts)
        out[:, 0::2], out[:, 1::2] = dw.real, dw.imag
        return out

    def algebra_derivative(self, t):
        return float(self._rate(np.array([t]))[0])


class ConstantPath(GroupPath):
    """The only continuous paths in a discrete group."""

    def __init__(self, element):
        self._element = element

    def element(self, t):
        return self._element

    def orbit_points(self, t, x):
        t = np.atleast_1d(np.asarray(t, float))
        return np.broadcast_to(self._element.act(x), (len(t), len(x))).copy()

    def orbit_velocity(self, t, x):
        t = np.atleast_1d(np.asarray(t, float))
        return np.zeros((len(t), len(x)))

    def algebra_derivative(self, t):
        return None
