import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from equihol import curves as C
from equihol.errors import ValidationError
from equihol.lie import DeckElement, Rotation, RotationPath, so3_exp

T = np.linspace(0, 1, 101)


def test_latitude_loop_convention():
    eq = C.latitude_loop(math.pi / 2)
    np.testing.assert_allclose(eq.start, [1, 0, 0], atol=1e-15)
    assert eq.is_closed()
    np.testing.assert_allclose(eq(0.25), [0, 1, 0], atol=1e-15)


def test_quarter_arcs_make_a_half_arc():
    th = 0.8
    half = C.concat(C.latitude_arc(th, 0.0, math.pi / 2), C.latitude_arc(th, math.pi / 2, math.pi))
    s, phi = math.sin(th), T * math.pi
    closed = np.column_stack([s * np.cos(phi), s * np.sin(phi), np.full_like(phi, math.cos(th))])
    np.testing.assert_allclose(half(T), closed, atol=1e-12)


def test_concat_with_constant_keeps_image():
    g = C.latitude_arc(1.0, 0.0, 2.0)
    both = C.concat(g, C.constant(g.end))
    np.testing.assert_allclose(both(T / 2), g(T), atol=1e-12)
    np.testing.assert_allclose(both(0.5 + T / 2), np.tile(g.end, (len(T), 1)), atol=1e-12)


def test_concat_rejects_gaps_and_mixed_spaces():
    with pytest.raises(ValidationError):
        C.concat(C.latitude_arc(1.0, 0, 1), C.latitude_arc(1.0, 2, 3))
    with pytest.raises(ValidationError):
        C.concat(C.constant([1.0, 0.0, 0.0]), C.constant([1.0, 0.0]))


def test_concat_associativity_of_images():
    a, b, c = (C.latitude_arc(0.7, k, k + 1) for k in range(3))
    left, right = C.concat(C.concat(a, b), c), C.concat(a, C.concat(b, c))
    # same image, different parametrisation: compare on matching parameters
    np.testing.assert_allclose(left(T / 4), a(T), atol=1e-12)
    np.testing.assert_allclose(right(T / 2), a(T), atol=1e-12)
    np.testing.assert_allclose(left.end, right.end, atol=1e-15)


def test_velocity_sides_at_knots():
    poly = C.planar_polyline([(0, 0), (1, 0), (1, 1)])
    np.testing.assert_allclose(poly.velocity(0.5, -1), [2, 0])
    np.testing.assert_allclose(poly.velocity(0.5, 1), [0, 2])


def test_nested_concat_knot_survives_round_off():
    g = C.planar_polyline([(0, 0), (1, 0), (1, 1), (0, 1)])
    nested = C.concat(C.concat(g, C.reverse(g)), g)
    # 2/3 is not exactly representable; the right-sided velocity still belongs to the third piece
    v = nested.velocity(np.array([2 / 3 + 1e-15]), 1)[0]
    np.testing.assert_allclose(v, nested.velocity(np.array([2 / 3 + 1e-6]), 1)[0], atol=1e-6)


def test_reverse():
    const = C.constant([0.0, 0.6, 0.8])
    np.testing.assert_array_equal(C.reverse(const)(T), const(T))
    g = C.latitude_arc(1.2, 0.0, 2.0)
    np.testing.assert_allclose(C.reverse(C.reverse(g))(T), g(T), atol=1e-12)
    np.testing.assert_allclose(C.reverse(g)(T), C.latitude_arc(1.2, 2.0, 0.0)(T), atol=1e-12)
    np.testing.assert_allclose(C.reverse(g).velocity(0.3), -g.velocity(0.7), atol=1e-12)


def test_act():
    g = C.latitude_loop(1.0)
    np.testing.assert_array_equal(C.act(Rotation.identity(), g)(T), g(T))
    beta = 0.9
    moved = C.act(Rotation.about((0, 0, 1), beta), g)
    np.testing.assert_allclose(moved(T), C.latitude_loop(1.0, beta)(T), atol=1e-12)


def test_act_moves_loop_class():
    phi2 = so3_exp([0, 0, 1.3])
    x = np.array([0.6, 0.0, 0.8])
    g = C.rotation_orbit(RotationPath.exp_path([0, 0, 1.3]), x)
    C.EquivariantLoopClass(phi2, g)
    phi = so3_exp([0.4, -0.2, 0.9])
    C.EquivariantLoopClass(phi * phi2 * phi.inverse(), C.act(phi, g))


def test_orbits():
    north = np.array([0.0, 0.0, 1.0])
    orbit = C.rotation_orbit(RotationPath.exp_path([0, 0, 2.0]), north)
    np.testing.assert_allclose(orbit(T), np.tile(north, (len(T), 1)), atol=1e-15)
    eq = C.rotation_orbit(RotationPath.exp_path([0, 0, 2.0]), [1.0, 0, 0])
    np.testing.assert_allclose(eq(T), C.latitude_arc(math.pi / 2, 0.0, 2.0)(T), atol=1e-12)
    v, x = np.array([0.3, 1.1, -0.5]), np.array([0.0, 0.6, -0.8])
    np.testing.assert_allclose(C.rotation_orbit(RotationPath.exp_path(v), x).end,
                               so3_exp(v).act(x), atol=1e-10)


def test_lengths():
    assert C.geodesic_arc([1, 0, 0], [0, 1, 0]).length() == pytest.approx(math.pi / 2, abs=1e-10)
    assert C.latitude_loop(1.0).length() == pytest.approx(2 * math.pi * math.sin(1.0), abs=1e-10)
    assert C.square_loop(0.5).length() == pytest.approx(2.0, abs=1e-12)


def test_lattice_lift_class():
    g = C.planar_segment_loop((1, 0))
    np.testing.assert_array_equal(g.start, [0, 0])
    np.testing.assert_array_equal(g.end, [1, 0])
    C.EquivariantLoopClass(DeckElement(1, 0), g)
    with pytest.raises(ValidationError):
        C.EquivariantLoopClass(DeckElement(0, 1), g)


def test_spherical_polygon_is_closed_on_sphere():
    poly = C.spherical_polygon([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert poly.is_closed()
    np.testing.assert_allclose(np.linalg.norm(poly(T), axis=1), 1.0, atol=1e-14)


def test_csv_round_trip(tmp_path):
    g = C.latitude_loop(0.9)
    path = tmp_path / "loop.csv"
    C.write_csv(g, path, n=300)
    assert path.read_text(encoding="utf-8").splitlines()[0] == "t,x,y,z"
    pts = C.read_csv(path)
    assert pts.shape == (300, 3)
    back = C.from_samples(pts)
    assert back.length() == pytest.approx(g.length(), rel=1e-4)


def test_hermite_interpolates_and_snaps_knots():
    t = np.linspace(0, 1, 9)
    P = np.column_stack([np.cos(t), np.sin(t)])
    D = np.column_stack([-np.sin(t), np.cos(t)])
    h = C.hermite(t, P, D)
    np.testing.assert_allclose(h(t), P, atol=1e-15)
    np.testing.assert_allclose(h(0.37), [math.cos(0.37), math.sin(0.37)], atol=1e-6)
    np.testing.assert_allclose(h.velocity(np.array([t[3] - 1e-13]), 1)[0], D[3], atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-3, 3), st.floats(-3, 3)), min_size=2, max_size=6))
def test_polyline_reverse_and_endpoints(points):
    pts = np.array(points, dtype=float)
    if np.any(np.linalg.norm(np.diff(pts, axis=0), axis=1) < 1e-6):
        return
    g = C.planar_polyline(pts)
    np.testing.assert_allclose(g.start, pts[0], atol=1e-12)
    np.testing.assert_allclose(g.end, pts[-1], atol=1e-12)
    np.testing.assert_allclose(C.reverse(g)(T), g(1 - T), atol=1e-12)
