"""Randomised fixtures for the algebraic identities of equivariant holonomy.

Each identity function draws its own fixture from ``rng`` and returns a
:class:`HolonomyCheckReport`.  Fixtures work on the frame bundle of S^2 (SO(3))
and on the lattice-equivariant plane bundles (Z^2).
"""

from __future__ import annotations

import numpy as np

from . import curves as C
from .holonomy import DEFAULT_STEPS, equivariant_holonomy, holonomy
from .lie import DeckElement
from .report import HolonomyCheckReport
from .sampling import random_rotation, random_unit, spherical_path

PROP_TOL = 1e-7


def _element(b, rng):
    if b.dim == 3:
        return random_rotation(rng)
    return DeckElement(*(int(v) for v in rng.integers(-2, 3, 2)))


def _point(b, rng):
    return random_unit(rng) if b.dim == 3 else rng.uniform(-1, 1, 2)


def _path(b, rng, p, q) -> C.Curve:
    """Random piecewise path from ``p`` to ``q``."""
    if b.dim == 3:
        return spherical_path(rng, p, q, interior=int(rng.integers(1, 3)))[0]
    via = list(0.5 * (p + q) + rng.uniform(-1, 1, size=(int(rng.integers(1, 3)), 2)))
    return C.planar_polyline([p, *via, q])


def _member(b, rng, phi, x) -> C.Curve:
    """A curve in the class of ``phi`` starting at ``x``."""
    return _path(b, rng, x, phi.act(x))


def _hol(b, phi, gamma, steps):
    return equivariant_holonomy(b, phi, gamma, steps=steps)


def conjugation(b, rng, steps: int = DEFAULT_STEPS) -> HolonomyCheckReport:
    """``Hol_{phi phi' phi^-1}(phi . gamma) = Hol_{phi'}(gamma)``."""
    phi, phi2 = _element(b, rng), _element(b, rng)
    gamma = _member(b, rng, phi2, _point(b, rng))
    left = _hol(b, phi * phi2 * phi.inverse(), C.act(phi, gamma), steps)
    right = _hol(b, phi2, gamma, steps)
    return HolonomyCheckReport("conjugation", left.value, right.value, PROP_TOL)


def multiplicativity(b, rng, steps: int = DEFAULT_STEPS) -> HolonomyCheckReport:
    """``Hol_{phi' phi}(gamma * gamma') = Hol_phi(gamma) Hol_{phi'}(gamma')``."""
    phi, phi2 = _element(b, rng), _element(b, rng)
    gamma = _member(b, rng, phi, _point(b, rng))
    gamma2 = _member(b, rng, phi2, gamma.end)
    left = _hol(b, phi2 * phi, C.concat(gamma, gamma2), steps)
    right = _hol(b, phi, gamma, steps) * _hol(b, phi2, gamma2, steps)
    return HolonomyCheckReport("multiplicativity", left.value, right.value, PROP_TOL)


def inversion(b, rng, steps: int = DEFAULT_STEPS) -> HolonomyCheckReport:
    """``Hol_{phi^-1}(reverse gamma) = Hol_phi(gamma)^-1``."""
    phi = _element(b, rng)
    gamma = _member(b, rng, phi, _point(b, rng))
    left = _hol(b, phi.inverse(), C.reverse(gamma), steps)
    right = _hol(b, phi, gamma, steps).inverse()
    return HolonomyCheckReport("inversion", left.value, right.value, PROP_TOL)


def difference_loop(b, rng, steps: int = DEFAULT_STEPS) -> HolonomyCheckReport:
    """``Hol(gamma' * reverse gamma) = Hol_phi(gamma') Hol_phi(gamma)^-1``."""
    phi = _element(b, rng)
    x = _point(b, rng)
    gamma, gamma2 = _member(b, rng, phi, x), _member(b, rng, phi, x)
    left = holonomy(b, C.concat(gamma2, C.reverse(gamma)), steps=steps)
    right = _hol(b, phi, gamma2, steps) / _hol(b, phi, gamma, steps)
    return HolonomyCheckReport("difference-loop", left.value, right.value, PROP_TOL)


def path_conjugation(b, rng, steps: int = DEFAULT_STEPS) -> HolonomyCheckReport:
    """``Hol_phi(reverse zeta * gamma * (phi . zeta)) = Hol_phi(gamma)``."""
    phi = _element(b, rng)
    x = _point(b, rng)
    gamma = _member(b, rng, phi, x)
    zeta = _path(b, rng, x, _point(b, rng))
    moved = C.concat(C.reverse(zeta), C.concat(gamma, C.act(phi, zeta)))
    left = _hol(b, phi, moved, steps)
    right = _hol(b, phi, gamma, steps)
    return HolonomyCheckReport("path-conjugation", left.value, right.value, PROP_TOL)


IDENTITIES = {
    "a": conjugation,
    "b": multiplicativity,
    "c": inversion,
    "d": difference_loop,
    "e": path_conjugation,
}


def fixture_rng(seed: int, label: str, index: int):
    """Independent stream per (seed, identity, fixture) so items can run in any order."""
    return np.random.default_rng([int(seed), ord(label), int(index)])


def run_identity(b, label: str, seed: int, index: int, steps: int = DEFAULT_STEPS):
    return IDENTITIES[label](b, fixture_rng(seed, label, index), steps)
