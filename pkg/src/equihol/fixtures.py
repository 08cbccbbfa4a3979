"""Text descriptions of bundles, curves, group elements, points and regions.

Grammar: ``name`` or ``name:key=value,key=value`` or ``name(a,b)``.  Values
that are vectors use commas (``x=0,0,1``); lists of points use semicolons
(``vertices=1,0,0;0,1,0;0,0,1``).  Numbers accept a ``pi`` factor, e.g.
``-2pi``, ``pi/2`` or ``1/4pi``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import curves as C
from . import holonomy as H
from .bundle import (SphereFrameBundle, axial_form, make_flat_plane_bundle,
                     make_heisenberg_torus_bundle, shift_connection)
from .errors import ValidationError
from .lie import DeckElement, Phase, Rotation, RotationPath, so3_exp
from .quotient import WeightedHopfBundle

_NUMBER = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?(?:e[+-]?\d+)?)\s*\*?\s*(pi)?"
                     r"(?:\s*/\s*((?:\d+\.?\d*|\.\d+))\s*(pi)?)?$", re.I)
_KEY_SPLIT = re.compile(r",(?=\s*[A-Za-z_][A-Za-z0-9_]*\s*=)")

POINTS = {
    "north": (0.0, 0.0, 1.0),
    "south": (0.0, 0.0, -1.0),
    "equator": (1.0, 0.0, 0.0),
    "origin": (0.0, 0.0),
}


def parse_number(text: str) -> float:
    s = str(text).strip().replace(" ", "")
    try:
        return float(s)
    except ValueError:
        pass
    m = _NUMBER.match(s)
    if not m or not (m.group(1) or m.group(2)):
        raise ValidationError(f"cannot read a number from {text!r}")
    head, pi1, den, pi2 = m.groups()
    if head in ("", "+", "-"):
        head += "1"
    val = float(head) * (math.pi if pi1 else 1.0)
    if den is not None:
        val /= float(den) * (math.pi if pi2 else 1.0)
    return val


def parse_vector(text, dim: int | None = None) -> np.ndarray:
    if isinstance(text, (list, tuple, np.ndarray)):
        v = np.asarray([float(t) for t in text])
    else:
        key = str(text).strip().lower()
        if key in POINTS:
            v = np.asarray(POINTS[key], float)
        else:
            v = np.array([parse_number(t) for t in str(text).split(",") if t.strip()])
    if dim is not None and len(v) != dim:
        raise ValidationError(f"expected {dim} components, got {len(v)} in {text!r}")
    return v


def parse_point_list(text: str) -> np.ndarray:
    rows = [parse_vector(r) for r in str(text).split(";") if r.strip()]
    if len({len(r) for r in rows}) != 1:
        raise ValidationError(f"points of mixed dimension in {text!r}")
    return np.array(rows)


def split_spec(spec: str) -> tuple[str, dict, list]:
    """``name:k=v,...`` or ``name(a,b)`` into (name, keyword params, positional params)."""
    spec = str(spec).strip()
    m = re.match(r"^([A-Za-z0-9_+\-]+)\((.*)\)$", spec)
    if m:
        return m.group(1), {}, [p.strip() for p in m.group(2).split(",") if p.strip()]
    name, _, rest = spec.partition(":")
    params = {}
    if rest and "=" not in rest:
        return name.strip(), {}, [p.strip() for p in rest.split(",") if p.strip()]
    if rest:
        for part in _KEY_SPLIT.split(rest):
            key, eq, val = part.partition("=")
            if not eq:
                raise ValidationError(f"parameter {part!r} in {spec!r} is not key=value")
            params[key.strip()] = val.strip()
    return name.strip(), params, []


def _take(params: dict, allowed: set, spec: str) -> None:
    extra = set(params) - allowed
    if extra:
        raise ValidationError(f"unknown parameter(s) {sorted(extra)} in {spec!r}")


# -- bundles -----------------------------------------------------------------

BUNDLE_NAMES = ("sphere-frame", "sphere-frame+shift", "heisenberg-torus", "flat-plane",
                "hopf-weighted", "so3-weighted")


def parse_bundle(spec: str):
    name, kw, pos = split_spec(spec)
    if name == "sphere-frame":
        _take(kw, set(), spec)
        return SphereFrameBundle()
    if name == "sphere-frame+shift":
        _take(kw, {"c"}, spec)
        c = parse_number(pos[0] if pos else kw.get("c", "0"))
        return shift_connection(SphereFrameBundle(), axial_form(c))
    if name == "heisenberg-torus":
        _take(kw, set(), spec)
        return make_heisenberg_torus_bundle()
    if name == "flat-plane":
        _take(kw, {"c1", "c2"}, spec)
        vals = pos if pos else [kw.get("c1", "0"), kw.get("c2", "0")]
        if len(vals) != 2:
            raise ValidationError(f"flat-plane needs two coefficients: {spec!r}")
        return make_flat_plane_bundle(parse_number(vals[0]), parse_number(vals[1]))
    if name in ("hopf-weighted", "so3-weighted"):
        _take(kw, {"k", "c"}, spec)
        vals = pos if pos else [kw.get("k", "1"), kw.get("c", "0")]
        k = parse_number(vals[0])
        if k != int(k):
            raise ValidationError(f"weight must be an integer: {spec!r}")
        return WeightedHopfBundle(int(k), parse_number(vals[1] if len(vals) > 1 else "0")).validate()
    raise ValidationError(f"unknown bundle {name!r}; known: {', '.join(BUNDLE_NAMES)}")


# -- group elements ----------------------------------------------------------

def parse_element(spec: str, bundle=None):
    name, kw, pos = split_spec(spec)
    if name in ("e", "identity"):
        if bundle is None:
            raise ValidationError("the identity needs a bundle to fix its group")
        return bundle.identity
    if name == "rot":
        _take(kw, {"axis", "angle", "v"}, spec)
        if "v" in kw:
            return so3_exp(parse_vector(kw["v"], 3))
        axis = parse_vector(kw.get("axis", "0,0,1"), 3)
        if np.linalg.norm(axis) == 0:
            raise ValidationError("rotation axis must be non-zero")
        return Rotation.about(axis, parse_number(kw.get("angle", "0")))
    if name == "deck":
        _take(kw, {"m", "n"}, spec)
        vals = pos if pos else [kw.get("m", "0"), kw.get("n", "0")]
        if len(vals) != 2:
            raise ValidationError(f"deck element needs two integers: {spec!r}")
        m, n = (parse_number(v) for v in vals)
        if m != int(m) or n != int(n):
            raise ValidationError(f"deck element needs integers: {spec!r}")
        return DeckElement(int(m), int(n))
    if name == "phase":
        _take(kw, {"angle"}, spec)
        return Phase.from_angle(parse_number(pos[0] if pos else kw.get("angle", "0")))
    raise ValidationError(f"unknown group element {spec!r}; use rot:..., deck:m,n, phase:angle=... or e")


# -- curves ---------------------------------------------------------------------

CURVE_FAMILIES = ("latitude", "equator", "constant", "geodesic", "polygon", "polyline",
                  "orbit", "square", "segment", "lattice", "bump", "file")


@dataclass(frozen=True, eq=False)
class CurveSpec:
    curve: C.Curve
    element: object | None = None


def parse_curve(spec: str, bundle=None, grid: int = C.DEFAULT_GRID) -> CurveSpec:
    """Curve from a family spec; orbit and lattice families imply their group element."""
    if "://" in str(spec):
        raise ValidationError("curves are read from local files only")
    name, kw, pos = split_spec(spec)
    if name == "equator":
        _take(kw, set(), spec)
        return CurveSpec(C.latitude_loop(math.pi / 2))
    if name == "latitude":
        _take(kw, {"theta", "phi0"}, spec)
        theta = parse_number(pos[0] if pos else kw.get("theta", "pi/2"))
        return CurveSpec(C.latitude_loop(theta, parse_number(kw.get("phi0", "0"))))
    if name == "constant":
        _take(kw, {"x"}, spec)
        return CurveSpec(C.constant(parse_vector(kw.get("x", "north"))))
    if name == "geodesic":
        _take(kw, {"p", "q"}, spec)
        return CurveSpec(C.geodesic_arc(parse_vector(kw["p"], 3), parse_vector(kw["q"], 3)))
    if name in ("polygon", "polyline"):
        _take(kw, {"vertices", "points", "closed"}, spec)
        pts = parse_point_list(kw.get("vertices", kw.get("points", "")))
        closed = name == "polygon" or kw.get("closed", "0") in ("1", "true", "yes")
        if pts.shape[1] == 3:
            return CurveSpec(C.spherical_polyline(pts, closed=closed))
        return CurveSpec(C.planar_polyline(pts, closed=closed))
    if name == "orbit":
        _take(kw, {"x", "v", "axis", "angle"}, spec)
        x = parse_vector(kw.get("x", "equator"), 3)
        if "v" in kw:
            v = parse_vector(kw["v"], 3)
        else:
            axis = parse_vector(kw.get("axis", "0,0,1"), 3)
            v = axis / np.linalg.norm(axis) * parse_number(kw.get("angle", "1"))
        return CurveSpec(C.rotation_orbit(RotationPath.exp_path(v), x), so3_exp(v))
    if name == "square":
        _take(kw, {"side", "x0", "y0"}, spec)
        return CurveSpec(C.square_loop(parse_number(kw.get("side", "1")),
                                       (parse_number(kw.get("x0", "0")), parse_number(kw.get("y0", "0")))))
    if name == "segment":
        _take(kw, {"p", "q"}, spec)
        return CurveSpec(C.planar_segment(parse_vector(kw["p"], 2), parse_vector(kw["q"], 2)))
    if name == "lattice":
        _take(kw, {"m", "n", "x0", "y0"}, spec)
        m, n = parse_number(kw.get("m", "1")), parse_number(kw.get("n", "0"))
        if m != int(m) or n != int(n):
            raise ValidationError(f"lattice class needs integers: {spec!r}")
        start = (parse_number(kw.get("x0", "0")), parse_number(kw.get("y0", "0")))
        return CurveSpec(C.planar_segment_loop((m, n), start), DeckElement(int(m), int(n)))
    if name == "bump":
        _take(kw, {"p", "q", "amp", "waves"}, spec)
        fam = H.bump_family(parse_vector(kw.get("p", "0,0"), 2), parse_vector(kw.get("q", "1,0"), 2),
                            parse_number(kw.get("amp", "0.3")), int(parse_number(kw.get("waves", "1"))))
        return CurveSpec(fam(1.0))
    if name == "file":
        _take(kw, {"path"}, spec)
        try:
            pts = C.read_csv(kw["path"])
        except (OSError, KeyError, ValueError, IndexError) as exc:
            raise ValidationError(f"cannot read curve file: {exc}") from exc
        return CurveSpec(C.from_samples(pts, grid))
    raise ValidationError(f"unknown curve family {name!r}; known: {', '.join(CURVE_FAMILIES)}")


# -- regions ---------------------------------------------------------------------

REGION_NAMES = ("cap", "octant", "triangle", "unit-square", "rect", "empty")


def parse_region(spec: str, bundle):
    name, kw, pos = split_spec(spec)
    if name == "cap":
        _take(kw, {"theta"}, spec)
        return H.SphericalCap(parse_number(pos[0] if pos else kw.get("theta", "1")))
    if name == "octant":
        return H.SphericalTriangle((1, 0, 0), (0, 1, 0), (0, 0, 1))
    if name == "triangle":
        _take(kw, {"vertices"}, spec)
        V = parse_point_list(kw.get("vertices", ""))
        if V.shape != (3, 3):
            raise ValidationError("triangle needs three points on the sphere")
        return H.SphericalTriangle(*(tuple(v) for v in V))
    if name == "unit-square":
        return H.PlanarRectangle(0.0, 0.0, 1.0, 1.0)
    if name == "rect":
        _take(kw, {"x0", "y0", "x1", "y1"}, spec)
        return H.PlanarRectangle(*(parse_number(kw.get(k, d)) for k, d in
                                   (("x0", "0"), ("y0", "0"), ("x1", "1"), ("y1", "1"))))
    if name == "empty":
        return H.SphericalCap(0.0) if bundle.dim == 3 else H.PlanarRectangle(0.0, 0.0, 0.0, 0.0)
    raise ValidationError(f"unknown region {name!r}; known: {', '.join(REGION_NAMES)}")


def check_region_fits(region, bundle) -> None:
    spherical = isinstance(region, (H.SphericalCap, H.SphericalTriangle))
    if spherical != (bundle.dim == 3):
        raise ValidationError(f"region {type(region).__name__} does not live on the base of {bundle.name}")
