import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equihol.errors import ValidationError
from equihol.lie import (FIELD_SIGN, DeckElement, Frame, Phase, PhasePath, Rotation, RotationPath,
                         act_on_frame, fundamental_field, hat, so3_exp, vee)

vectors = st.lists(st.floats(-4, 4, allow_nan=False), min_size=3, max_size=3).map(np.array)
small_vectors = st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=3).map(np.array)
angles = st.floats(-10, 10, allow_nan=False)


def series_exp(A, terms=20):
    out, term = np.eye(3), np.eye(3)
    for k in range(1, terms):
        term = term @ A / k
        out = out + term
    return out


# expm(hat(0.3, -1.2, 0.7)) evaluated with mpmath at 30 digits
EXPM_REFERENCE = np.array([
    [0.1868897464370817, -0.63869065678244168, -0.74642244581436362],
    [0.33535418913202657, 0.75564562328161004, -0.56261644114525131],
    [0.9233687186104391, -0.14516865003905063, 0.35541000624286787],
])


class TestExponential:
    def test_zero_is_identity(self):
        assert np.array_equal(so3_exp([0, 0, 0]).matrix, np.eye(3))

    def test_quarter_turn_about_z(self):
        R = so3_exp([0, 0, math.pi / 2])
        np.testing.assert_allclose(R.act([1, 0, 0]), [0, 1, 0], atol=1e-15)
        np.testing.assert_allclose(R.matrix, series_exp(hat([0, 0, math.pi / 2])), atol=1e-14)

    def test_against_high_precision_reference(self):
        np.testing.assert_allclose(so3_exp([0.3, -1.2, 0.7]).matrix, EXPM_REFERENCE, atol=1e-14)

    def test_z_generator_exponentiates_to_z_rotations(self):
        Z = np.array([[0.0, -1, 0], [1, 0, 0], [0, 0, 0]])
        np.testing.assert_allclose(vee(Z), [0, 0, 1])
        for a in (0.3, 2.0, -1.1):
            c, s = math.cos(a), math.sin(a)
            np.testing.assert_allclose(so3_exp(a * vee(Z)).matrix,
                                       [[c, -s, 0], [s, c, 0], [0, 0, 1]], atol=1e-15)

    def test_tiny_angles_use_series_limit(self):
        v = np.array([1e-10, -2e-10, 3e-10])
        np.testing.assert_allclose(so3_exp(v).matrix, np.eye(3) + hat(v), atol=1e-19)

    @settings(max_examples=60, deadline=None)
    @given(vectors)
    def test_matches_matrix_series(self, v):
        np.testing.assert_allclose(so3_exp(v).matrix, series_exp(hat(v), 40), atol=1e-10)

    @settings(max_examples=60, deadline=None)
    @given(small_vectors, angles, angles)
    def test_one_parameter_subgroup(self, v, s, t):
        lhs = so3_exp((s + t) * v).matrix
        rhs = (so3_exp(s * v) * so3_exp(t * v)).matrix
        np.testing.assert_allclose(lhs, rhs, atol=1e-11)

    @settings(max_examples=60, deadline=None)
    @given(vectors)
    def test_result_is_a_rotation(self, v):
        R = so3_exp(v).matrix
        np.testing.assert_allclose(R.T @ R, np.eye(3), atol=1e-13)
        assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)


class TestHatVee:
    def test_zero(self):
        np.testing.assert_array_equal(vee(np.zeros((3, 3))), [0, 0, 0])

    def test_inverse_pair(self):
        np.testing.assert_array_equal(vee(hat([3, -2, 5])), [3, -2, 5])

    def test_hat_is_cross_product(self):
        v, w = np.array([0.2, -1.0, 0.5]), np.array([1.5, 0.3, -0.7])
        np.testing.assert_allclose(hat(v) @ w, np.cross(v, w))

    def test_upper_a_entry_convention(self):
        # X = ((0, a, b), (-a, 0, c), (-b, -c, 0)) with a = 1 is minus the z generator
        X = np.array([[0.0, 1, 0], [-1, 0, 0], [0, 0, 0]])
        np.testing.assert_array_equal(vee(X), [0, 0, -1])

    def test_rejects_non_antisymmetric(self):
        with pytest.raises(ValidationError):
            vee(np.eye(3))
        with pytest.raises(ValidationError):
            vee(np.zeros((2, 2)))

    @given(vectors, vectors)
    def test_bracket_is_cross_product(self, v, w):
        A, B = hat(v), hat(w)
        np.testing.assert_allclose(vee(A @ B - B @ A, tol=1e-9), np.cross(v, w), atol=1e-10)


class TestFundamentalField:
    def test_fixed_point(self):
        np.testing.assert_array_equal(fundamental_field([0, 0, 1], [0, 0, 1]) + 0.0, [0, 0, 0])

    def test_equator_value(self):
        np.testing.assert_allclose(fundamental_field([0, 0, 1], [1, 0, 0]), [0, -1, 0])

    def test_matches_finite_difference_of_the_flow(self):
        v, x, h = np.array([0.3, -0.8, 0.4]), np.array([0.6, 0.0, 0.8]), 1e-5
        fd = (so3_exp(-h * v).act(x) - so3_exp(h * v).act(x)) / (2 * h)
        np.testing.assert_allclose(fundamental_field(v, x), fd, atol=1e-9)
        assert FIELD_SIGN == -1

    @given(vectors, vectors.filter(lambda x: np.linalg.norm(x) > 1e-3))
    def test_tangent(self, v, x):
        x = x / np.linalg.norm(x)
        assert abs(fundamental_field(v, x) @ x) < 1e-12


class TestRotation:
    def test_rejects_reflections_and_garbage(self):
        with pytest.raises(ValidationError):
            Rotation(np.diag([1.0, 1.0, -1.0]))
        with pytest.raises(ValidationError):
            Rotation(np.ones((3, 3)))
        with pytest.raises(ValidationError):
            Rotation(np.eye(2))

    def test_reorthonormalises_small_drift(self):
        m = so3_exp([0.1, 0.2, 0.3]).matrix + 1e-9
        R = Rotation(m)
        np.testing.assert_allclose(R.matrix.T @ R.matrix, np.eye(3), atol=1e-14)

    def test_group_laws(self):
        R, S = so3_exp([0.3, 0.1, -0.4]), so3_exp([-1.0, 0.5, 0.2])
        assert (R * R.inverse()).is_identity()
        x = np.array([0.2, 0.3, -0.9])
        np.testing.assert_allclose((R * S).act(x), R.act(S.act(x)))

    def test_about_normalises_axis(self):
        np.testing.assert_allclose(Rotation.about((0, 0, 5), 0.4).matrix,
                                   so3_exp([0, 0, 0.4]).matrix)


class TestFrames:
    def test_identity_action(self):
        f = Frame(np.array([1.0, 0, 0]), np.array([0, 0, 1.0]))
        g = act_on_frame(Rotation.identity(), f)
        np.testing.assert_array_equal(g.x, f.x)
        np.testing.assert_array_equal(g.e, f.e)

    def test_quarter_turn(self):
        g = act_on_frame(Rotation.about((0, 0, 1), math.pi / 2),
                         Frame(np.array([1.0, 0, 0]), np.array([0, 0, 1.0])))
        np.testing.assert_allclose(g.x, [0, 1, 0], atol=1e-15)
        np.testing.assert_allclose(g.e, [0, 0, 1], atol=1e-15)

    def test_composition(self):
        f = Frame(np.array([0.0, 0.6, 0.8]), np.array([1.0, 0, 0]))
        R1, R2 = so3_exp([0.2, 0.9, -0.3]), so3_exp([1.1, -0.4, 0.0])
        a = act_on_frame(R1, act_on_frame(R2, f))
        b = act_on_frame(R1 * R2, f)
        np.testing.assert_allclose(a.e, b.e, atol=1e-14)

    def test_invalid_frame(self):
        with pytest.raises(ValidationError):
            Frame(np.array([1.0, 0, 0]), np.array([1.0, 0, 0]))

    def test_rotated_and_angle(self):
        f = Frame(np.array([0.0, 0, 1]), np.array([1.0, 0, 0]))
        assert f.angle_to(f.rotated(0.7)) == pytest.approx(0.7)
        assert f.rotated(0.7).angle_to(f) == pytest.approx(-0.7)


class TestPhaseAndDeck:
    def test_phase_normalises(self):
        assert abs(Phase(3 + 4j).value) == pytest.approx(1.0)
        with pytest.raises(ValidationError):
            Phase(0.0)

    def test_angle_interval(self):
        assert Phase(-1.0).angle == math.pi
        assert Phase.from_angle(-math.pi).angle == math.pi

    @given(angles, angles)
    def test_phase_group(self, a, b):
        p, q = Phase.from_angle(a), Phase.from_angle(b)
        assert (p * q).distance(Phase.from_angle(a + b)) < 1e-12
        assert (p / q).distance(p * q.inverse()) < 1e-12
        assert (p ** 3).distance(p * p * p) < 1e-12

    def test_phase_acts_on_c2(self):
        z = Phase.from_angle(math.pi / 2).act([1.0, 0.0, 0.0, 2.0])
        np.testing.assert_allclose(z, [0, 1, -2, 0], atol=1e-15)

    def test_deck_group(self):
        a, b = DeckElement(1, -2), DeckElement(3, 4)
        assert a * b == DeckElement(4, 2)
        assert (a * a.inverse()).is_identity()
        np.testing.assert_array_equal(a.act([0.5, 0.5]), [1.5, -1.5])
        np.testing.assert_array_equal(a.push([0.5, 0.5]), [0.5, 0.5])

    def test_deck_needs_integers(self):
        with pytest.raises((ValidationError, TypeError)):
            DeckElement(0.5, 0)


class TestGroupPaths:
    def test_exp_path_derivative(self):
        path = RotationPath.exp_path([0.3, -0.2, 0.9])
        np.testing.assert_allclose(path.algebra_derivative(0.4), [0.3, -0.2, 0.9], atol=1e-7)

    def test_segment_reparametrises(self):
        path = RotationPath.exp_path([0, 0, 2.0])
        seg = path.segment(0.25, 0.75)
        assert seg.element(0.0).distance(path.element(0.25)) < 1e-14
        assert seg.element(1.0).distance(path.element(0.75)) < 1e-14

    def test_phase_path(self):
        path = PhasePath.exp_path(1.5)
        assert path.element(1.0).distance(Phase.from_angle(1.5)) < 1e-15
        assert path.algebra_derivative(0.3) == pytest.approx(1.5)
