"""Named check suites.

Every item declares an anchor (a short descriptive key of the statement it
tests) and the source of its expected value; :func:`evaluate` refuses items
without a recognised source.  Items are built lazily and identified by
sortable ids, so a suite can be sharded across processes and reassembled in a
fixed order.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import curves as C
from . import holonomy as H
from . import properties as P
from . import quotient as Q
from .bundle import (SphereFrameBundle, axial_form, cartan_residual, constant_form,
                     make_flat_plane_bundle, make_heisenberg_torus_bundle, momentum,
                     momentum_closed_form, periodic_form, shift_connection)
from .errors import ValidationError
from .lie import ConstantPath, DeckElement, PhasePath, Rotation, RotationPath
from .report import HolonomyCheckReport, Verdict, require_source
from .sampling import PlaneSampler, SphereSampler, random_unit

TWO_PI = 2 * math.pi

SUITES = ("all", "prop-hol", "area-law", "isotropy", "gauss-bonnet", "derivative", "inf-hol",
          "orbit", "flat", "quotient", "validation", "cartan", "prequant", "classification")
DEFAULT_N = {"all": 6}
DEFAULT_N_OTHER = 25
# expected verdict of items whose outcome is reported rather than judged
ANY_VERDICT = "any"


@dataclass(frozen=True)
class SuiteItem:
    id: str
    anchor: str
    source: str | None
    run: Callable[[], object]
    expect: str | None = None


def _check(identity, left, right, tol, **details) -> HolonomyCheckReport:
    """Phase comparison when either side is complex, scalar comparison otherwise."""
    if np.iscomplexobj(left) or np.iscomplexobj(right):
        left, right = complex(left), complex(right)
    else:
        left, right = float(left), float(right)
    return HolonomyCheckReport(identity, left, right, tol, details=details)


def _rng(seed, *tags):
    return np.random.default_rng([int(seed), *[int(t) for t in tags]])


# -- item groups ----------------------------------------------------------------

def area_law_items(seed, n):
    b = SphereFrameBundle()
    out = []
    for i, th in enumerate([0.3, 0.7, 1.0, math.pi / 2, 2.0]):
        def run(th=th):
            hol = H.holonomy(b, C.latitude_loop(th))
            return _check("latitude-holonomy", hol.value, np.exp(1j * TWO_PI * (1 - math.cos(th))),
                          1e-6, theta=th)
        out.append(SuiteItem(f"area-law/{i:02d}", "cap-area-law", "derived", run))
    return out


def isotropy_items(seed, n):
    b = SphereFrameBundle()
    out = []
    for i, a in enumerate([0.1, 1.0, math.pi, 5.0]):
        def run(a=a):
            chi = H.isotropy_character(b, Rotation.about((0, 0, 1), a), (0, 0, 1))
            return _check("isotropy-character", chi.value, np.exp(-1j * a), 1e-8, angle=a)
        out.append(SuiteItem(f"isotropy/{i:02d}", "isotropy-character", "literature", run))

    def homomorphism():
        r1, r2 = Rotation.about((0, 0, 1), 0.7), Rotation.about((0, 0, 1), 2.9)
        lhs = H.isotropy_character(b, r1 * r2, (0, 0, 1))
        rhs = H.isotropy_character(b, r1, (0, 0, 1)) * H.isotropy_character(b, r2, (0, 0, 1))
        return _check("isotropy-homomorphism", lhs.value, rhs.value, 1e-10)
    out.append(SuiteItem("isotropy/homomorphism", "isotropy-character", "derived", homomorphism))

    for i in range(max(3, min(n, 10))):
        def equator(i=i):
            rng = _rng(seed, 11, i)
            a, lon = rng.uniform(-math.pi, math.pi), rng.uniform(0, TWO_PI)
            x = np.array([math.cos(lon), math.sin(lon), 0.0])
            sigma = C.rotation_orbit(RotationPath.exp_path([0, 0, a]), x)
            hol = H.equivariant_holonomy(b, Rotation.about((0, 0, 1), a), sigma)
            return _check("equator-orbit", hol.value, 1.0, 1e-7, angle=a, longitude=lon)
        out.append(SuiteItem(f"isotropy/equator-orbit/{i:03d}", "equator-orbit-holonomy",
                             "literature", equator))
    return out


def prop_hol_items(seed, n, bundles=("sphere-frame", "heisenberg-torus")):
    from .fixtures import parse_bundle
    out = []
    for name in bundles:
        for lab in "abcde":
            for i in range(n):
                def run(name=name, lab=lab, i=i):
                    return P.run_identity(parse_bundle(name), lab, seed, i)
                ident = P.IDENTITIES[lab].__name__.replace("_", "-")
                out.append(SuiteItem(f"prop-hol/{name}/{lab}/{i:03d}",
                                     f"equivariant-holonomy-identities:{ident}", "literature", run))
    return out


def gauss_bonnet_items(seed, n):
    s, h = SphereFrameBundle(), make_heisenberg_torus_bundle()
    rows = [
        ("cap", s, H.SphericalCap(1.0), "derived"),
        ("octant", s, H.SphericalTriangle((1, 0, 0), (0, 1, 0), (0, 0, 1)), "derived"),
        ("heisenberg-unit-square", h, H.PlanarRectangle(0, 0, 1, 1), "derived"),
        ("heisenberg-quarter-square", h, H.PlanarRectangle(0, 0, 0.5, 0.5), "derived"),
        ("empty", s, H.SphericalCap(0.0), "trivial"),
    ]
    out = [SuiteItem(f"gauss-bonnet/{tag}", "boundary-holonomy-curvature", src,
                     lambda b=b, r=r: H.gauss_bonnet_check(b, r))
           for tag, b, r, src in rows]

    def octant_area():
        val = H.curvature_integral(s, rows[1][2])
        return _check("octant-curvature-integral", val, 0.25, 1e-6)
    out.append(SuiteItem("gauss-bonnet/octant-integral", "boundary-holonomy-curvature",
                         "derived", octant_area))
    return out


def derivative_items(seed, n):
    b = SphereFrameBundle()
    x = random_unit(_rng(seed, 21))
    v = random_unit(_rng(seed, 22)) * 1.3
    rows = [("north", [0, 0, 1.0], [0, 0, 1.0], "derived"),
            ("equator", [0, 0, 1.0], [1.0, 0, 0], "derived"),
            ("random", v, x, "derived"),
            ("zero", [0, 0, 0.0], x, "trivial")]
    out = []
    for tag, vv, xx, src in rows:
        def run(vv=vv, xx=xx):
            return H.holonomy_derivative_check(b, RotationPath.exp_path(vv), xx)
        out.append(SuiteItem(f"derivative/{tag}", "holonomy-derivative-momentum", src, run))
        if tag in ("north", "random"):
            def order(vv=vv, xx=xx):
                rep = H.holonomy_derivative_check(b, RotationPath.exp_path(vv), xx)
                return _check("difference-quotient-order", rep.details["order"], 2.0, 0.1)
            out.append(SuiteItem(f"derivative/{tag}-order", "holonomy-derivative-momentum",
                                 "trivial", order))
    return out


def inf_hol_items(seed, n):
    b = SphereFrameBundle()
    out = []
    for i in range(n):
        def run(i=i):
            rng = _rng(seed, 31, i)
            v = random_unit(rng) * rng.uniform(0.1, 3.0)
            return H.exp_orbit_holonomy_check(b, v, random_unit(rng))

        def magnitude(i=i):
            rng = _rng(seed, 32, i)
            v, x = rng.normal(size=3), random_unit(rng)
            mu = momentum(b, v, x)
            return _check("momentum-magnitude", abs(mu), abs(v @ x) / TWO_PI, 1e-7)
        out.append(SuiteItem(f"inf-hol/sphere/{i:03d}", "exp-orbit-holonomy", "derived", run))
        out.append(SuiteItem(f"inf-hol/momentum/{i:03d}", "frame-bundle-momentum", "literature",
                             magnitude))
    for k, c in ((1, 0.0), (2, 0.1), (-1, 0.3)):
        def hopf(k=k, c=c):
            hb = Q.WeightedHopfBundle(k, c).validate()
            z = np.array([0.6, 0.0, 0.0, 0.8])
            return H.exp_orbit_holonomy_check(hb, 0.9, z)
        out.append(SuiteItem(f"inf-hol/hopf/k{k:+d}", "exp-orbit-holonomy", "derived", hopf))
    return out


def orbit_items(seed, n):
    out = []
    z = np.array([0.6, 0.0, 0.48, 0.64])

    def hopf_flat(k, c):
        hb = Q.WeightedHopfBundle(k, c).validate()
        path = PhasePath(lambda t: 2.3 * np.asarray(t) ** 2 + 0.4 * np.asarray(t),
                         lambda t: 4.6 * np.asarray(t) + 0.4)
        return _check("orbit-holonomy", H.orbit_holonomy(hb, path, z).value, 1.0, 1e-8,
                      momentum=hb.momentum(1.0, z))
    out.append(SuiteItem("orbit/hopf-k0", "orbit-holonomy-vanishing-momentum", "derived",
                         lambda: hopf_flat(0, 0.0)))
    out.append(SuiteItem("orbit/hopf-k2-balanced", "orbit-holonomy-vanishing-momentum", "derived",
                         lambda: hopf_flat(2, 2 / TWO_PI)))

    def plane():
        f = make_flat_plane_bundle(0.3, 0.2)
        return _check("orbit-holonomy", H.orbit_holonomy(f, ConstantPath(DeckElement(1, 1)),
                                                         np.array([0.2, 0.1])).value, 1.0, 1e-12)
    out.append(SuiteItem("orbit/flat-plane-discrete", "orbit-holonomy-vanishing-momentum",
                         "trivial", plane))

    def sphere_equator():
        s = SphereFrameBundle()
        hol = H.orbit_holonomy(s, RotationPath.exp_path([0, 0, 1.7]), np.array([0, 1.0, 0]))
        return _check("orbit-holonomy-measurement", hol.value, 1.0, 1e-7)
    out.append(SuiteItem("orbit/sphere-equator", "equator-orbit-holonomy", "literature",
                         sphere_equator))
    return out


def flat_items(seed, n):
    c1, c2 = 0.3, 0.2
    f = make_flat_plane_bundle(c1, c2)
    p, q = np.zeros(2), np.array([1.0, 0.0])
    fams = {"bump": H.bump_family(p, q, 0.4), "double-bump": H.bump_family(p, q, 0.3, waves=2),
            "kink": H.kink_family(p, q, (0.2, -0.7))}
    out = []
    for tag, fam in fams.items():
        out.append(SuiteItem(f"flat/homotopy/{tag}", "flat-homotopy-invariance", "derived",
                             lambda fam=fam: H.homotopy_invariance_check(
                                 f, fam, lambda t: DeckElement(1, 0))))
    out.append(SuiteItem("flat/homotopy/constant", "flat-homotopy-invariance", "trivial",
                         lambda: H.homotopy_invariance_check(
                             f, lambda t: C.planar_segment(p, q), lambda t: DeckElement(1, 0))))
    for i in range(n):
        def character(i=i):
            rng = _rng(seed, 41, i)
            m, k = (int(v) for v in rng.integers(-3, 4, 2))
            start = rng.uniform(-1, 1, 2)
            hol = H.equivariant_holonomy(f, DeckElement(m, k), C.planar_segment_loop((m, k), start))
            return _check("lattice-character", hol.value, np.exp(1j * TWO_PI * (c1 * m + c2 * k)),
                          1e-8, m=m, n=k)
        out.append(SuiteItem(f"flat/character/{i:03d}", "flat-lattice-character", "derived",
                             character))

    def control():
        hb = make_heisenberg_torus_bundle()
        amp = 0.4
        rep = H.homotopy_invariance_check(hb, fams["bump"], lambda t: DeckElement(1, 0))
        predicted = np.exp(-1j * TWO_PI * H.bump_stokes_area(amp, 1, 1.0))
        return _check("curved-control-stokes-factor", rep.details["end_ratio"], predicted, 1e-6,
                      homotopy_discrepancy=rep.discrepancy,
                      homotopy_check_fails=not rep.passed)
    out.append(SuiteItem("flat/curved-control", "flat-homotopy-invariance", "derived", control))
    return out


def quotient_items(seed, n):
    out = []
    bundles = {"flat-plane": make_flat_plane_bundle(0.3, 0.1),
               "heisenberg-torus": make_heisenberg_torus_bundle()}
    for name, b in bundles.items():
        for i in range(n):
            def run(b=b, i=i):
                rng = _rng(seed, 51, i)
                m, k = (int(v) for v in rng.integers(-3, 4, 2))
                start = rng.uniform(-2, 2, 2)
                via = [start + rng.uniform(-1.5, 1.5, 2) for _ in range(int(rng.integers(0, 3)))]
                return Q.discrete_quotient_holonomy(b, Q.lattice_loop(m, k, start, via))
            out.append(SuiteItem(f"quotient/torus/{name}/{i:03d}", "torus-quotient-holonomy",
                                 "derived", run))

    def heis_row():
        y0 = 0.25
        rep = Q.discrete_quotient_holonomy(bundles["heisenberg-torus"], Q.lattice_loop(1, 0, (0, y0)))
        return _check("torus-quotient-closed-form", rep.left, np.exp(-2j * math.pi * y0), 1e-9)
    out.append(SuiteItem("quotient/torus/heisenberg-closed-form", "torus-quotient-holonomy",
                         "derived", heis_row))

    def chern():
        val = H.curvature_integral(bundles["heisenberg-torus"], H.PlanarRectangle(0, 0, 1, 1))
        return _check("chern-number", val, 1.0, 1e-6)
    out.append(SuiteItem("quotient/torus/chern-number", "torus-quotient-holonomy", "derived", chern))

    equator = C.latitude_loop(math.pi / 2)

    def weight_power(k):
        base, _ = Q.hopf_quotient_holonomy(Q.WeightedHopfBundle(1, 0.0), equator)
        val, _ = Q.hopf_quotient_holonomy(Q.WeightedHopfBundle(k, 0.0), equator)
        return _check("hopf-weight-power", val.value, (base ** k).value, 1e-6, k=k)
    for k in range(-2, 3):
        out.append(SuiteItem(f"quotient/hopf/power/k{k:+d}", "hopf-quotient-holonomy", "derived",
                             lambda k=k: weight_power(k)))

    def half_area(theta0):
        ref = np.exp(1j * Q.latitude_cap_area(theta0) / 2)
        return Q.hopf_quotient_holonomy(Q.WeightedHopfBundle(1, 0.0), C.latitude_loop(theta0),
                                        reference=ref, tol=1e-5)[1]
    for j, th in enumerate((math.pi / 2, 1.0, 2.4)):
        out.append(SuiteItem(f"quotient/hopf/half-area/{j:02d}", "hopf-quotient-holonomy",
                             "derived", lambda th=th: half_area(th)))
    return out


def validation_items(seed, n):
    out = []
    fixtures = {"heisenberg-torus": make_heisenberg_torus_bundle,
                "flat-plane": lambda: make_flat_plane_bundle(0.3, 0.1),
                "hopf-weighted": lambda: Q.WeightedHopfBundle(2, 0.4)}
    for name, make in fixtures.items():
        def cocycle(make=make):
            return _check("cocycle-condition", make().cocycle_residual(_rng(seed, 61)), 0.0, 1e-10)

        def invariance(make=make):
            return _check("connection-invariance", make().invariance_residual(_rng(seed, 62)),
                          0.0, 1e-8)
        out.append(SuiteItem(f"validation/{name}/cocycle", "cocycle-condition", "trivial", cocycle))
        out.append(SuiteItem(f"validation/{name}/invariance", "connection-invariance", "derived",
                             invariance))

    def rejects_non_invariant():
        try:
            shift_connection(make_heisenberg_torus_bundle(), periodic_form(0.3))
            ok = True
        except ValidationError:
            ok = False
        try:
            shift_connection(make_heisenberg_torus_bundle(),
                             _non_invariant_plane_form())
            bad_ok = False
        except ValidationError:
            bad_ok = True
        return Verdict("shift-validation", "pass" if ok and bad_ok else "fail", 0.0, 0.0)
    out.append(SuiteItem("validation/shift-form-invariance", "connection-shift", "trivial",
                         rejects_non_invariant, expect="pass"))

    for i in range(n):
        def charts(i=i):
            rng = _rng(seed, 63, i)
            while True:
                x = random_unit(rng)
                if abs(x[2]) < 0.85 and abs(x[0]) < 0.85:
                    break
            v = rng.normal(size=3)
            s = SphereFrameBundle()
            return _check("momentum-chart-independence", s.momentum(v, x, chart=0),
                          s.momentum(v, x, chart=1), 1e-7)
        out.append(SuiteItem(f"validation/momentum-charts/{i:03d}", "momentum-global", "trivial",
                             charts))

    def shifted_momentum():
        rng = _rng(seed, 64)
        beta = axial_form(0.2)
        s, t = SphereFrameBundle(), shift_connection(SphereFrameBundle(), beta)
        x, v = random_unit(rng), np.array([0, 0, 0.8])
        from .lie import fundamental_field
        expected = momentum(s, v, x) - float(beta(x, fundamental_field(v, x))[0])
        return _check("shifted-momentum", momentum(t, v, x), expected, 1e-8)
    out.append(SuiteItem("validation/shifted-momentum", "connection-shift", "derived",
                         shifted_momentum))

    def shift_composition():
        base = make_flat_plane_bundle(0.1, 0.0)
        b1, b2 = constant_form(0.2, 0.1), constant_form(-0.05, 0.3)
        twice = shift_connection(shift_connection(base, b1), b2)
        once = shift_connection(base, b1 + b2)
        loop = H.bump_family((0, 0), (1, 0), 0.3)(1.0)
        return _check("shift-composition", H.equivariant_holonomy(twice, DeckElement(1, 0), loop).value,
                      H.equivariant_holonomy(once, DeckElement(1, 0), loop).value, 1e-9)
    out.append(SuiteItem("validation/shift-composition", "connection-shift", "trivial",
                         shift_composition))
    return out


def _non_invariant_plane_form():
    from .bundle import InvariantOneForm
    gens = (DeckElement(1, 0), DeckElement(0, 1))
    return InvariantOneForm(lambda p, v: p[:, 0] * v[:, 1], gens, "x dy")


def cartan_items(seed, n):
    b = SphereFrameBundle()
    out = []
    for i in range(n):
        def run(i=i):
            rng = _rng(seed, 71, i)
            v, x = rng.normal(size=3), random_unit(rng)
            return _check("cartan-closedness", cartan_residual(b, v, x), 0.0, 1e-6)
        out.append(SuiteItem(f"cartan/{i:03d}", "equivariant-closedness", "derived", run))

    def momentum_closed():
        rng = _rng(seed, 72)
        v, x = rng.normal(size=3), random_unit(rng)
        return _check("momentum-closed-form", momentum(b, v, x), momentum_closed_form(v, x), 1e-8)
    out.append(SuiteItem("cartan/momentum-closed-form", "frame-bundle-momentum", "derived",
                         momentum_closed))
    return out


def prequant_items(seed, n):
    quarter, half = Q.EquivariantTwoForm(1 / (4 * math.pi)), Q.EquivariantTwoForm(1 / TWO_PI)
    Y = np.array([0, 0, -TWO_PI])
    out = [SuiteItem("prequant/quarter-level-north", "prequantization-obstruction", "literature",
                     lambda: Q.prequantization_obstruction_check(quarter, Y, (0, 0, 1)),
                     expect="obstructed")]
    axis_points = [((0, 0, 1), Y), ((0, 0, -1), Y), ((0, 0, 1), 2 * Y)]
    rng = _rng(seed, 81)
    for _ in range(3):
        a = random_unit(rng)
        axis_points.append((a, a * TWO_PI))
    for j, (x, v) in enumerate(axis_points):
        out.append(SuiteItem(f"prequant/half-level-axis/{j:02d}", "prequantization-obstruction",
                             "literature",
                             lambda x=x, v=v: Q.prequantization_obstruction_check(half, v, x),
                             expect="not-obstructed"))
    out.append(SuiteItem("prequant/zero-level", "prequantization-obstruction", "trivial",
                         lambda: Q.prequantization_obstruction_check(Q.EquivariantTwoForm(0.0), Y,
                                                                     (0, 0, 1)),
                         expect="not-obstructed"))
    x_off = np.array([0.6, 0.0, 0.8])
    out.append(SuiteItem("prequant/half-level-orbit", "prequantization-obstruction", "derived",
                         lambda: Q.prequantization_obstruction_check(half, Y, x_off),
                         expect="not-obstructed"))
    out.append(SuiteItem("prequant/quarter-level-orbit", "prequantization-obstruction", "derived",
                         lambda: Q.prequantization_obstruction_check(quarter, Y, x_off),
                         expect="inconclusive"))

    def quarter_cartan():
        return _check("two-form-closedness", quarter.cartan_residual([0.3, -1, 2], x_off), 0.0, 1e-6)
    out.append(SuiteItem("prequant/quarter-level-closedness", "equivariant-closedness", "derived",
                         quarter_cartan))
    return out


def classification_items(seed, n):
    m = max(n, 20)
    f = make_flat_plane_bundle(0.3, 0.0)
    g = make_flat_plane_bundle(0.4, 0.0)
    s = SphereFrameBundle()
    out = [
        SuiteItem("classification/self-plane", "equivariant-isomorphism", "trivial",
                  lambda: Q.isomorphism_test(f, f, PlaneSampler(seed), m, tol=1e-9),
                  expect="indistinguishable-at-n"),
        SuiteItem("classification/self-sphere", "equivariant-isomorphism", "trivial",
                  lambda: Q.isomorphism_test(s, SphereFrameBundle(), SphereSampler(seed), m,
                                             tol=1e-9),
                  expect="indistinguishable-at-n"),
        SuiteItem("classification/sphere-zero-shift", "equivariant-isomorphism", "trivial",
                  lambda: Q.isomorphism_test(s, shift_connection(s, axial_form(0.0)),
                                             SphereSampler(seed), max(4, n), tol=1e-9),
                  expect="indistinguishable-at-n"),
        SuiteItem("classification/perturbed-plane", "equivariant-isomorphism", "derived",
                  lambda: Q.isomorphism_test(f, g, PlaneSampler(seed), m),
                  expect="distinguished"),
        SuiteItem("classification/correct-witness", "triviality-witness", "derived",
                  lambda: Q.triviality_witness_check(f, constant_form(0.3, 0.0), PlaneSampler(seed), m),
                  expect="pass"),
        SuiteItem("classification/wrong-witness", "triviality-witness", "derived",
                  lambda: Q.triviality_witness_check(f, constant_form(0.25, 0.0), PlaneSampler(seed), m),
                  expect="fail"),
    ]

    def symmetric():
        ab = Q.isomorphism_test(f, g, PlaneSampler(seed), m)
        ba = Q.isomorphism_test(g, f, PlaneSampler(seed), m)
        same = (ab.verdict == ba.verdict
                and ab.details["witness_indices"] == ba.details["witness_indices"])
        return Verdict("isomorphism-symmetry", "pass" if same else "fail",
                       abs(ab.max_discrepancy - ba.max_discrepancy), 0.0, n=m, seed=seed)
    out.append(SuiteItem("classification/symmetry", "equivariant-isomorphism", "trivial",
                         symmetric, expect="pass"))
    h = make_heisenberg_torus_bundle()
    for j, (a, b_) in enumerate(((0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.25, -0.75))):
        out.append(SuiteItem(f"classification/heisenberg-witness/{j:02d}", "triviality-witness",
                             "derived",
                             lambda a=a, b_=b_: Q.triviality_witness_check(
                                 h, constant_form(a, b_), PlaneSampler(seed), m),
                             expect="fail"))
    return out


GROUPS = {
    "area-law": area_law_items,
    "isotropy": isotropy_items,
    "gauss-bonnet": gauss_bonnet_items,
    "derivative": derivative_items,
    "inf-hol": inf_hol_items,
    "orbit": orbit_items,
    "flat": flat_items,
    "quotient": quotient_items,
    "validation": validation_items,
    "cartan": cartan_items,
    "prequant": prequant_items,
    "classification": classification_items,
}


def resolve_n(suite: str, n: int | None) -> int:
    return int(n) if n is not None else DEFAULT_N.get(suite, DEFAULT_N_OTHER)


def build_suite(suite: str, seed: int, n: int | None = None,
                bundle: str | None = None) -> list[SuiteItem]:
    """Items of a suite, sorted by id.

    ``prop-hol`` runs on ``bundle`` (default ``sphere-frame``); ``all`` runs it on
    the sphere frame bundle and the Heisenberg bundle.
    """
    if suite not in SUITES:
        raise ValidationError(f"unknown suite {suite!r}; known: {', '.join(SUITES)}")
    n = resolve_n(suite, n)
    if suite == "prop-hol":
        from .fixtures import parse_bundle
        name = bundle or "sphere-frame"
        parse_bundle(name)
        items = prop_hol_items(seed, n, (name,))
    elif suite == "all":
        items = prop_hol_items(seed, n)
        for make in GROUPS.values():
            items.extend(make(seed, n))
    else:
        items = GROUPS[suite](seed, n)
    items.sort(key=lambda it: it.id)
    ids = [it.id for it in items]
    if len(set(ids)) != len(ids):
        raise RuntimeError("duplicate suite item ids")
    return items


def evaluate(item: SuiteItem, timings: bool = False) -> dict:
    """Run one item; refuses to run an item whose expected value has no source."""
    require_source(item.source)
    start = time.perf_counter()
    res = item.run()
    elapsed = time.perf_counter() - start
    res.anchor, res.source = item.anchor, item.source
    if isinstance(res, Verdict):
        if item.expect is None:
            raise ValidationError(f"{item.id}: a verdict item needs an expected verdict")
        ok = item.expect == ANY_VERDICT or res.verdict == item.expect
    else:
        ok = bool(res.passed)
    out = {"id": item.id, "anchor": item.anchor, "source": item.source, "pass": ok,
           "expect": item.expect, "result": res.to_json()}
    if timings:
        out["wall_time"] = round(elapsed, 4)
    return out


_WORKER_CACHE: dict = {}


def _run_by_index(args):
    suite, seed, n, bundle, index, timings = args
    key = (suite, seed, n, bundle)
    if key not in _WORKER_CACHE:
        _WORKER_CACHE.clear()
        _WORKER_CACHE[key] = build_suite(suite, seed, n, bundle)
    return evaluate(_WORKER_CACHE[key][index], timings)


def run_suite(suite: str, seed: int, n: int | None = None, bundle: str | None = None,
              workers: int = 1, timings: bool = False) -> list[dict]:
    items = build_suite(suite, seed, n, bundle)
    if workers <= 1:
        return [evaluate(it, timings) for it in items]
    jobs = [(suite, seed, n, bundle, i, timings) for i in range(len(items))]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_run_by_index, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    return sorted(results, key=lambda r: r["id"])
