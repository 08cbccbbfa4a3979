import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equihol import curves as C
from equihol.bundle import (InvariantOneForm, SphereFrameBundle, axial_form, cartan_residual,
                            constant_form, curvature, equivariant_curvature,
                            make_flat_plane_bundle, make_heisenberg_torus_bundle, momentum,
                            momentum_closed_form, periodic_form, shift_connection)
from equihol.errors import ValidationError
from equihol.holonomy import equivariant_holonomy, holonomy
from equihol.lie import DeckElement, fundamental_field

TWO_PI = 2 * math.pi
SPHERE = SphereFrameBundle()
HEIS = make_heisenberg_torus_bundle()

unit_vectors = (st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3)
                .map(np.array).filter(lambda v: np.linalg.norm(v) > 0.1)
                .map(lambda v: v / np.linalg.norm(v)))
algebra = st.lists(st.floats(-3, 3, allow_nan=False), min_size=3, max_size=3).map(np.array)


def spherical(theta, phi):
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi),
                     math.cos(theta)])


class TestCocycleBundles:
    def test_heisenberg_cocycle_at_a_point(self):
        x = np.array([[0.3, 0.7]])
        g, g2 = DeckElement(1, 0), DeckElement(0, 1)
        lhs = HEIS.theta(g2 * g, x)[0]
        rhs = HEIS.theta(g, x)[0] * HEIS.theta(g2, g.act(x))[0]
        expected = complex(math.cos(TWO_PI * 0.7), math.sin(TWO_PI * 0.7))
        assert abs(lhs - expected) < 1e-14
        assert abs(rhs - expected) < 1e-14

    def test_residuals(self):
        rng = np.random.default_rng(0)
        assert HEIS.cocycle_residual(rng) < 1e-12
        assert HEIS.invariance_residual(rng) < 1e-8
        flat = make_flat_plane_bundle(0.3, -0.2)
        assert flat.invariance_residual(rng) < 1e-12

    def test_wrong_sign_cocycle_is_rejected(self):
        from equihol.bundle import CocycleBundle

        def cocycle(g, p):
            return np.exp(-1j * TWO_PI * g.m * p[:, 1])

        def rho(p):
            return np.column_stack([np.zeros(len(p)), p[:, 0]])

        with pytest.raises(ValidationError):
            CocycleBundle("flipped", cocycle, rho).validate()

    def test_curvature_densities(self):
        pts = np.random.default_rng(1).uniform(-2, 2, size=(20, 2))
        np.testing.assert_allclose(HEIS.curvature_density(pts), 1.0, atol=1e-8)
        np.testing.assert_allclose(make_flat_plane_bundle(0.3, 0.4).curvature_density(pts), 0.0,
                                   atol=1e-10)

    def test_zero_flat_bundle_has_trivial_holonomy(self):
        flat = make_flat_plane_bundle(0.0, 0.0)
        loop = C.planar_polyline([(0, 0), (1.3, 0.2), (0.4, 2.0)], closed=True)
        assert holonomy(flat, loop).distance(holonomy(flat, loop) ** 0) < 1e-12

    def test_no_momentum_for_discrete_groups(self):
        with pytest.raises(TypeError):
            momentum(HEIS, [1.0, 0.0], [0.0, 0.0])


class TestSphereFrameBundle:
    def test_connection_form_closed_form(self):
        # rho = -cos(theta) dphi / 2 pi in the chart regular away from the poles
        th, ph = 1.0, 0.4
        x = spherical(th, ph)
        e_phi = np.array([-math.sin(ph), math.cos(ph), 0.0])
        got = SPHERE.connection_form(x, e_phi, chart=0)[0]
        assert got == pytest.approx(-math.cos(th) / (TWO_PI * math.sin(th)), abs=1e-9)
        e_theta = np.array([math.cos(th) * math.cos(ph), math.cos(th) * math.sin(ph), -math.sin(th)])
        assert SPHERE.connection_form(x, e_theta, chart=0)[0] == pytest.approx(0.0, abs=1e-9)

    def test_curvature_density(self):
        pts = np.array([spherical(0.2, 0.0), spherical(1.3, 2.0), spherical(2.9, -1.0),
                        [0.0, 0.0, 1.0]])
        np.testing.assert_allclose(SPHERE.curvature_density(pts), 1 / TWO_PI, atol=1e-7)

    def test_momentum_examples(self):
        assert momentum(SPHERE, [0, 0, 1], [1, 0, 0]) == pytest.approx(0.0, abs=1e-9)
        assert momentum(SPHERE, [0, 0, 1], [0, 0, 1]) == pytest.approx(-1 / TWO_PI, abs=1e-9)

    @settings(max_examples=25, deadline=None)
    @given(algebra, unit_vectors)
    def test_momentum_magnitude(self, v, x):
        mu = momentum(SPHERE, v, x)
        assert abs(mu) == pytest.approx(abs(v @ x) / TWO_PI, abs=1e-7)
        assert mu == pytest.approx(momentum_closed_form(v, x), abs=1e-7)

    @settings(max_examples=20, deadline=None)
    @given(algebra, algebra, unit_vectors, st.floats(-2, 2), st.floats(-2, 2))
    def test_momentum_linear(self, v, w, x, a, b):
        lhs = momentum(SPHERE, a * v + b * w, x)
        rhs = a * momentum(SPHERE, v, x) + b * momentum(SPHERE, w, x)
        assert lhs == pytest.approx(rhs, abs=1e-7)

    def test_momentum_independent_of_chart(self):
        x = spherical(1.2, 0.9)
        v = np.array([0.4, -1.0, 0.3])
        assert SPHERE.momentum(v, x, chart=0) == pytest.approx(SPHERE.momentum(v, x, chart=1), abs=1e-8)

    def test_equivariant_curvature(self):
        x = spherical(0.8, 0.1)
        dens, mu = equivariant_curvature(SPHERE, [0.0, 0.0, 0.0], x)
        assert dens == pytest.approx(1 / TWO_PI, abs=1e-7)
        assert mu == 0.0

    @settings(max_examples=10, deadline=None)
    @given(algebra, unit_vectors)
    def test_cartan_closedness(self, v, x):
        assert cartan_residual(SPHERE, v, x) < 1e-6

    def test_transition_phase_of_a_z_rotation(self):
        x = spherical(1.0, 0.3)
        from equihol.lie import Rotation
        assert SPHERE.chart_phase(Rotation.about((0, 0, 1), 0.8), x, 0) == pytest.approx(0.0, abs=1e-12)


class TestShift:
    def test_zero_shift_changes_nothing(self):
        loop = C.latitude_loop(0.9)
        shifted = shift_connection(SPHERE, axial_form(0.0))
        assert holonomy(shifted, loop).distance(holonomy(SPHERE, loop)) < 1e-12
        assert shifted.group == "SO(3)"

    def test_axial_shift_restricts_group(self):
        shifted = shift_connection(SPHERE, axial_form(0.3))
        assert shifted.group == "SO(2)_z"
        from equihol.lie import so3_exp
        assert not shifted.contains(so3_exp([1.0, 0.0, 0.0]))
        assert shifted.contains(so3_exp([0.0, 0.0, 1.0]))

    def test_flat_shift_multiplies_lift_holonomy(self):
        base, c = make_flat_plane_bundle(0.1, 0.2), 0.35
        lift = C.planar_polyline([(0, 0), (0.4, 0.9), (1, 0)])
        before = equivariant_holonomy(base, DeckElement(1, 0), lift)
        after = equivariant_holonomy(shift_connection(base, constant_form(c, 0.0)),
                                     DeckElement(1, 0), lift)
        expected = np.exp(1j * TWO_PI * c)
        assert abs(after.value - before.value * expected) < 1e-12

    def test_shifted_momentum(self):
        beta = axial_form(0.25)
        shifted = shift_connection(SPHERE, beta)
        x, v = spherical(0.7, 1.9), np.array([0.0, 0.0, 1.4])
        expected = momentum(SPHERE, v, x) - float(beta(x, fundamental_field(v, x))[0])
        assert momentum(shifted, v, x) == pytest.approx(expected, abs=1e-8)

    def test_shifted_curvature(self):
        shifted = shift_connection(SPHERE, axial_form(0.25))
        # d(c (x dy - y dx)) restricted to the sphere is 2 c z dA
        x = spherical(0.7, 1.9)
        assert curvature(shifted, x) == pytest.approx(1 / TWO_PI + 2 * 0.25 * x[2], abs=1e-6)

    def test_non_invariant_shift_rejected(self):
        bad = InvariantOneForm(lambda p, v: p[:, 0] * v[:, 1], (DeckElement(1, 0),), "x dy")
        with pytest.raises(ValidationError):
            shift_connection(HEIS, bad)
        bad_sphere = InvariantOneForm(lambda p, v: p[:, 0] * v[:, 1],
                                      axial_form(1.0).generators, "x dy", dim=3)
        with pytest.raises(ValidationError):
            shift_connection(SPHERE, bad_sphere)

    def test_periodic_form_is_accepted(self):
        shifted = shift_connection(HEIS, periodic_form(0.3))
        assert shifted.invariance_residual(np.random.default_rng(2)) < 1e-8

    def test_sum_keeps_only_shared_symmetries(self):
        s = axial_form(0.0) + axial_form(0.2)
        north = np.array([0.0, 0.0, 1.0])
        assert all(np.allclose(g.act(north), north) for g in s.generators)
