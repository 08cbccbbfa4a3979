"""Deterministic samplers of ``(phi, gamma)`` pairs with ``gamma(1) = phi(gamma(0))``.

Every sample carries a JSON-ready description so that a witness found by a
sampling test can be replayed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import curves as C
from .lie import DeckElement, Rotation, RotationPath, so3_exp
from .numerics import unit
from .report import sig


@dataclass(frozen=True, eq=False)
class Sample:
    phi: object
    curve: C.Curve
    spec: dict


def _pts(a) -> list:
    return [[sig(v) for v in p] for p in np.atleast_2d(a)]


class PlaneSampler:
    """Lattice lifts and contractible loops in R^2.

    The first two samples are the straight lifts of the basis classes from the
    origin; the rest cycle through straight lifts, bent lifts and polygons.
    """

    def __init__(self, seed: int = 0):
        self.seed = int(seed)

    def samples(self, n: int) -> list[Sample]:
        rng = np.random.default_rng(self.seed)
        out = []
        for i in range(n):
            if i < 2:
                m, k = (1, 0) if i == 0 else (0, 1)
                out.append(self._lattice(np.zeros(2), m, k, []))
                continue
            kind = i % 3
            start = rng.uniform(-1, 1, 2)
            if kind == 2:
                pts = start + rng.uniform(-1.2, 1.2, size=(int(rng.integers(2, 5)), 2))
                verts = np.vstack([start, pts])
                out.append(Sample(DeckElement(0, 0), C.planar_polyline(verts, closed=True),
                                  {"family": "polygon", "points": _pts(verts),
                                   "element": DeckElement(0, 0).to_json()}))
                continue
            m, k = (int(v) for v in rng.integers(-2, 3, 2))
            via = [] if kind == 0 else list(start + rng.uniform(-1.5, 1.5, size=(int(rng.integers(1, 3)), 2)))
            out.append(self._lattice(start, m, k, via))
        return out

    @staticmethod
    def _lattice(start, m, k, via) -> Sample:
        phi = DeckElement(m, k)
        pts = np.vstack([start, *via, start + phi.vector]) if via else np.vstack([start, start + phi.vector])
        return Sample(phi, C.planar_polyline(pts),
                      {"family": "polyline", "points": _pts(pts), "element": phi.to_json()})


def random_rotation(rng, max_angle: float = np.pi) -> Rotation:
    axis = unit(rng.normal(size=3))
    return so3_exp(axis * rng.uniform(0.05, max_angle))


def random_unit(rng) -> np.ndarray:
    return unit(rng.normal(size=3))


def spherical_path(rng, p, q, interior: int = 1) -> tuple[C.Curve, np.ndarray]:
    """Geodesic polyline from ``p`` to ``q`` through random interior vertices.

    Consecutive vertices are kept well away from antipodal.
    """
    verts = [np.asarray(p, float)]
    for j in range(interior):
        while True:
            w = random_unit(rng)
            if w @ verts[-1] > -0.8 and (j < interior - 1 or w @ q > -0.8):
                break
        verts.append(w)
    if interior == 0 and verts[0] @ q < -0.8:
        return spherical_path(rng, p, q, 1)
    verts.append(np.asarray(q, float))
    V = np.array(verts)
    return C.spherical_polyline(V), V


class SphereSampler:
    """Loops, rotated latitude circles, exponential orbits and general paths on S^2."""

    def __init__(self, seed: int = 0):
        self.seed = int(seed)

    def samples(self, n: int) -> list[Sample]:
        rng = np.random.default_rng(self.seed)
        out = []
        for i in range(n):
            kind = i % 4
            if kind == 0:
                x = random_unit(rng)
                curve, V = spherical_path(rng, x, x, interior=int(rng.integers(2, 4)))
                out.append(Sample(Rotation.identity(), curve,
                                  {"family": "spherical-polygon", "vertices": _pts(V),
                                   "element": Rotation.identity().to_json()}))
            elif kind == 1:
                R = random_rotation(rng)
                theta0 = float(rng.uniform(0.2, 2.9))
                out.append(Sample(Rotation.identity(), C.act(R, C.latitude_loop(theta0)),
                                  {"family": "rotated-latitude", "theta": sig(theta0),
                                   "rotation": R.to_json(),
                                   "element": Rotation.identity().to_json()}))
            elif kind == 2:
                v = random_unit(rng) * rng.uniform(0.2, 3.0)
                x = random_unit(rng)
                phi = so3_exp(v)
                out.append(Sample(phi, C.rotation_orbit(RotationPath.exp_path(v), x),
                                  {"family": "orbit", "v": _pts(v)[0], "x": _pts(x)[0],
                                   "element": phi.to_json()}))
            else:
                phi = random_rotation(rng)
                x = random_unit(rng)
                curve, V = spherical_path(rng, x, phi.act(x), interior=int(rng.integers(1, 3)))
                out.append(Sample(phi, curve, {"family": "spherical-path", "vertices": _pts(V),
                                               "element": phi.to_json()}))
        return out


def sampler_for(b, seed: int = 0):
    return SphereSampler(seed) if b.dim == 3 else PlaneSampler(seed)
