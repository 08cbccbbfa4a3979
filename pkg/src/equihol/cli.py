"""Command-line front end.

Every command builds a list of report items, evaluates them and writes a JSON
report (sorted keys, UTF-8).  Exit codes: 0 all items pass, 1 some item
fails, 2 configuration or validation error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from importlib import resources
from importlib.metadata import PackageNotFoundError, version

import jsonschema
import numpy as np

from . import curves as C
from . import holonomy as H
from . import quotient as Q
from .bundle import SphereFrameBundle, curvature, momentum, momentum_closed_form
from .errors import IntegrationError, ProvenanceError, ValidationError
from .fixtures import (check_region_fits, parse_bundle, parse_curve, parse_element, parse_number,
                       parse_vector)
from .lie import fundamental_field
from .report import HolonomyCheckReport
from .suite import ANY_VERDICT, SUITES, SuiteItem, evaluate, resolve_n, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("hol", "equihol", "momentum", "curv", "quotient", "prequant", "check")
# keys that change what is computed; output paths, timings and worker count do not
ECHOED = ("bundle", "curve", "phi", "X", "x", "region", "class", "start", "level", "steps",
          "tol", "seed", "suite", "n")
DEFAULTS = {"steps": H.DEFAULT_STEPS, "workers": 1, "timings": False}


def artifact_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0.0.0"


def load_schema(name: str) -> dict:
    return json.loads(resources.files("equihol").joinpath("schemas", name).read_text("utf-8"))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    add = common.add_argument
    add("--config", help="JSON config file; flags override its values")
    add("--bundle", help="bundle fixture, e.g. sphere-frame, heisenberg-torus, flat-plane:c1=0.3,c2=0")
    add("--curve", help="curve family, e.g. latitude:theta=1.0, square:side=0.5, file:path=loop.csv")
    add("--phi", help="group element: rot:axis=0,0,1,angle=pi/2 | deck:1,0 | phase:angle=1 | e")
    add("--X", dest="X", help="Lie algebra element (vector for SO(3), number for U(1))")
    add("--x", dest="x", help="base point, a vector or north/south/equator/origin")
    add("--region", help="region for curv: cap:theta=1, octant, unit-square, rect:x1=..,y1=.., empty")
    add("--class", dest="class_", metavar="M,N", help="lattice class for quotient")
    add("--start", help="start point of the lattice lift for quotient")
    add("--level", help="scale s of the two-form s(vol + height), e.g. 1/4pi")
    add("--steps", type=int, help=f"integration steps (default {H.DEFAULT_STEPS})")
    add("--tol", type=float, help="tolerance of the reported check")
    add("--seed", type=int, help="seed; falls back to EQUIHOL_SEED, then 0")
    add("--report", help="write the JSON report here instead of stdout")
    add("--dump-curve", dest="dump_curve", help="write the curve samples as CSV t,x,y(,z)")
    add("--dump-region", dest="dump_region", help="write the region quadrature nodes as CSV")
    add("--timings", action="store_true", default=None, help="add wall times to the report")
    add("--workers", type=int, help="worker processes for check")
    add("--suite", choices=SUITES, help="suite for check (default all)")
    add("--n", type=int, help="fixtures per randomised family for check")

    p = _Parser(prog="equihol", allow_abbrev=False, description="Equivariant holonomy of invariant U(1) connections.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {"hol": "holonomy of a closed loop",
             "equihol": "equivariant holonomy Hol_phi(gamma)",
             "momentum": "momentum mu_X(x)",
             "curv": "curvature integral over a region and its boundary holonomy",
             "quotient": "holonomy of a loop in a quotient, computed upstairs and downstairs",
             "prequant": "obstruction check for an equivariant prequantisation",
             "check": "run a named check suite"}
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return p


# -- configuration ------------------------------------------------------------

def resolve_config(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from exc
        jsonschema.validate(cfg, load_schema("config.schema.json"))
    flags = {k: v for k, v in vars(args).items() if v is not None and k not in ("config", "command")}
    if "class_" in flags:
        flags["class"] = flags.pop("class_")
    cfg.update(flags)
    if "seed" not in cfg:
        env = os.environ.get("EQUIHOL_SEED")
        try:
            cfg["seed"] = int(env) if env not in (None, "") else 0
        except ValueError as exc:
            raise ValidationError(f"EQUIHOL_SEED must be an integer, got {env!r}") from exc
    for k, v in DEFAULTS.items():
        cfg.setdefault(k, v)
    jsonschema.validate(cfg, load_schema("config.schema.json"))
    return cfg


def _need(cfg, key, command):
    if key not in cfg:
        raise ValidationError(f"{command} needs --{key.replace('_', '-')}")
    return cfg[key]


def _reject(cfg, keys, command):
    extra = [k for k in keys if k in cfg]
    if extra:
        raise ValidationError(f"{command} does not use {', '.join('--' + k for k in extra)}")


def _check_curve_fits(curve: C.Curve, b, base: bool = True) -> None:
    dim = 3 if isinstance(b, Q.WeightedHopfBundle) and base else b.dim
    if curve.dim != dim:
        raise ValidationError(f"curve lives in R^{curve.dim} but {b.name} needs R^{dim}")
    if not isinstance(b, Q.WeightedHopfBundle) and b.dim == 3:
        r = abs(float(np.linalg.norm(curve.start)) - 1.0)
        if r > 1e-9:
            raise ValidationError(f"curve does not start on the unit sphere (off by {r:.3e})")


def _algebra(cfg, b):
    text = _need(cfg, "X", "momentum")
    return parse_number(text) if isinstance(b, Q.WeightedHopfBundle) else parse_vector(text, 3)


def _point(cfg, b, command):
    dim = 4 if isinstance(b, Q.WeightedHopfBundle) else b.dim
    return parse_vector(_need(cfg, "x", command), dim)


# -- commands -----------------------------------------------------------------

def cmd_hol(cfg) -> list[SuiteItem]:
    _reject(cfg, ("phi", "region", "class", "level", "suite", "n"), "hol")
    b = parse_bundle(cfg.get("bundle", "sphere-frame"))
    spec = parse_curve(_need(cfg, "curve", "hol"), b)
    _check_curve_fits(spec.curve, b, base=False)
    steps, tol = cfg["steps"], cfg.get("tol", 1e-6)
    gamma = spec.curve
    if not np.allclose(gamma.start, gamma.end, atol=C.ENDPOINT_TOL):
        raise ValidationError(f"hol needs a closed loop (endpoint gap "
                              f"{np.linalg.norm(gamma.end - gamma.start):.3e}); use equihol")
    if b.kind == "trivialized":
        def run():
            lifted = H.holonomy(b, gamma, steps=steps)
            local = H.hol_local(b, b.identity, gamma)
            return HolonomyCheckReport("loop-holonomy", lifted.value, local.value, tol,
                                       details={"holonomy": lifted.value,
                                                "routes": "integrated lift vs closed form"})
    else:
        def run():
            fine = H.holonomy(b, gamma, steps=steps)
            coarse = H.holonomy(b, gamma, steps=max(H.MIN_STEPS, steps // 2))
            return HolonomyCheckReport("loop-holonomy", fine.value, coarse.value, tol,
                                       details={"holonomy": fine.value,
                                                "routes": "step doubling"})
    _dump(cfg, gamma)
    return [SuiteItem("hol", "loop-holonomy", "derived", run)]


def cmd_equihol(cfg) -> list[SuiteItem]:
    _reject(cfg, ("region", "class", "level", "suite", "n"), "equihol")
    b = parse_bundle(cfg.get("bundle", "sphere-frame"))
    spec = parse_curve(_need(cfg, "curve", "equihol"), b)
    _check_curve_fits(spec.curve, b, base=False)
    if "phi" in cfg:
        phi = parse_element(cfg["phi"], b)
    else:
        phi = spec.element if spec.element is not None else b.identity
    steps, tol = cfg["steps"], cfg.get("tol", 1e-6)
    gamma = spec.curve
    C.EquivariantLoopClass(phi, gamma)
    H._require_member(b, phi)

    def run():
        value = H.equivariant_holonomy(b, phi, gamma, steps=steps)
        if b.kind == "trivialized":
            other = H.equivariant_holonomy_by_lift(b, phi, gamma, steps=steps)
            routes = "closed form vs integrated lift"
        else:
            other = H.equivariant_holonomy(b, phi, gamma, steps=max(H.MIN_STEPS, steps // 2))
            routes = "step doubling"
        return HolonomyCheckReport("equivariant-holonomy", value.value, other.value, tol,
                                   details={"holonomy": value.value, "element": phi.to_json(),
                                            "routes": routes})
    _dump(cfg, gamma)
    return [SuiteItem("equihol", "equivariant-holonomy", "derived", run)]


def cmd_momentum(cfg) -> list[SuiteItem]:
    _reject(cfg, ("curve", "phi", "region", "class", "level", "suite", "n"), "momentum")
    b = parse_bundle(cfg.get("bundle", "sphere-frame"))
    if b.dim == 2:
        raise ValidationError(f"{b.name} has a discrete group; it has no momentum")
    v, x = _algebra(cfg, b), _point(cfg, b, "momentum")
    if abs(float(np.linalg.norm(x)) - 1.0) > 1e-9:
        raise ValidationError("the base point must be a unit vector")
    tol = cfg.get("tol", 1e-7)

    def run():
        mu = momentum(b, v, x)
        if isinstance(b, Q.WeightedHopfBundle):
            expected = Q.hopf_momentum_closed_form(b.k, b.c, v)
        else:
            expected = momentum_closed_form(v, x)
            if b.shift is not None:
                expected -= float(b.shift(x, fundamental_field(v, x))[0])
        return HolonomyCheckReport("momentum", mu, expected, tol, details={"momentum": mu})
    return [SuiteItem("momentum", "momentum", "derived", run)]


def cmd_curv(cfg) -> list[SuiteItem]:
    from .fixtures import parse_region
    _reject(cfg, ("curve", "phi", "class", "level", "suite", "n"), "curv")
    b = parse_bundle(cfg.get("bundle", "sphere-frame"))
    if isinstance(b, Q.WeightedHopfBundle):
        raise ValidationError("curv works on the sphere frame bundle and the plane bundles")
    region = parse_region(_need(cfg, "region", "curv"), b)
    check_region_fits(region, b)
    steps, tol = cfg["steps"], cfg.get("tol", 1e-6)
    items = [SuiteItem("curv/boundary", "boundary-holonomy-curvature", "derived",
                       lambda: H.gauss_bonnet_check(b, region, tol=tol, steps=steps))]
    if "x" in cfg:
        x = _point(cfg, b, "curv")
        items.append(SuiteItem("curv/density", "curvature", "derived",
                               lambda: _density_item(b, x)))
    if cfg.get("dump_region"):
        pts, w = region.nodes(12)
        cols = ["x", "y", "z"][: pts.shape[1]] + ["weight"]
        _write_rows(cfg["dump_region"], cols, np.column_stack([pts, w]))
    return items


def _density_item(b, x):
    val = float(np.asarray(curvature(b, x)).ravel()[0])
    expected = 1.0 / (2 * math.pi) if isinstance(b, SphereFrameBundle) and b.shift is None else val
    return HolonomyCheckReport("curvature-density", val, expected, 1e-6, details={"density": val})


def cmd_quotient(cfg) -> list[SuiteItem]:
    _reject(cfg, ("phi", "region", "level", "suite", "n"), "quotient")
    b = parse_bundle(_need(cfg, "bundle", "quotient"))
    tol = cfg.get("tol")
    if isinstance(b, Q.WeightedHopfBundle):
        _reject(cfg, ("class", "start"), "quotient on the Hopf bundle")
        gamma = parse_curve(_need(cfg, "curve", "quotient"), b).curve
        _check_curve_fits(gamma, b)
        _dump(cfg, gamma)
        return [SuiteItem("quotient", "hopf-quotient-holonomy", "derived",
                          lambda: Q.hopf_quotient_holonomy(b, gamma, cfg["steps"],
                                                           tol=tol or 1e-6)[1])]
    if b.dim != 2:
        raise ValidationError("quotient works on the plane bundles and the weighted Hopf bundle")
    _reject(cfg, ("curve",), "quotient on a plane bundle")
    m, n = parse_vector(_need(cfg, "class", "quotient"), 2)
    if m != int(m) or n != int(n):
        raise ValidationError("--class needs two integers")
    start = parse_vector(cfg.get("start", "0,0"), 2)
    loop = Q.lattice_loop(int(m), int(n), start)
    _dump(cfg, loop.lift)
    return [SuiteItem("quotient", "torus-quotient-holonomy", "derived",
                      lambda: Q.discrete_quotient_holonomy(b, loop, tol=tol or 1e-7))]


def cmd_prequant(cfg) -> list[SuiteItem]:
    _reject(cfg, ("bundle", "curve", "phi", "region", "class", "suite", "n"), "prequant")
    form = Q.EquivariantTwoForm(parse_number(_need(cfg, "level", "prequant")))
    v = parse_vector(_need(cfg, "X", "prequant"), 3)
    x = parse_vector(_need(cfg, "x", "prequant"), 3)
    tol = cfg.get("tol", 1e-6)

    # every verdict is a legitimate outcome here; only a failed internal check fails
    return [SuiteItem("prequant", "prequantization-obstruction", "derived",
                      lambda: Q.prequantization_obstruction_check(form, v, x, tol=tol),
                      expect=ANY_VERDICT)]


def cmd_check(cfg) -> list[dict]:
    _reject(cfg, ("curve", "phi", "X", "x", "region", "class", "start", "level", "tol"), "check")
    if "steps" in cfg and cfg["steps"] != H.DEFAULT_STEPS:
        raise ValidationError("check uses fixed per-item step counts; drop --steps")
    suite = cfg.get("suite", "all")
    cfg["suite"] = suite
    cfg["n"] = resolve_n(suite, cfg.get("n"))
    if "bundle" in cfg and suite != "prop-hol":
        raise ValidationError("--bundle only selects the bundle of the prop-hol suite")
    return run_suite(suite, cfg["seed"], cfg["n"], cfg.get("bundle"), cfg["workers"],
                     cfg["timings"])


# -- output -------------------------------------------------------------------

def _write_rows(path, cols, rows) -> None:
    import csv
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in rows:
            w.writerow([repr(float(v)) for v in r])


def _dump(cfg, curve: C.Curve) -> None:
    if cfg.get("dump_curve"):
        C.write_csv(curve, cfg["dump_curve"])


def _evaluate_items(items, cfg) -> list[dict]:
    return sorted((evaluate(it, cfg["timings"]) for it in items), key=lambda r: r["id"])


def assemble(command: str, cfg: dict, rows: list[dict]) -> dict:
    failing = [r["id"] for r in rows if not r["pass"]]
    return {
        "artifact": {"name": "equihol", "version": artifact_version()},
        "command": command,
        "config": {k: cfg[k] for k in ECHOED if k in cfg},
        "items": rows,
        "summary": {"total": len(rows), "passed": len(rows) - len(failing),
                    "failed": len(failing), "failing": failing},
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


HANDLERS = {"hol": cmd_hol, "equihol": cmd_equihol, "momentum": cmd_momentum, "curv": cmd_curv,
            "quotient": cmd_quotient, "prequant": cmd_prequant}


def run(argv=None) -> tuple[int, dict | None]:
    args = build_parser().parse_args(argv)
    cfg = resolve_config(args)
    if args.command == "check":
        rows = cmd_check(cfg)
    else:
        rows = _evaluate_items(HANDLERS[args.command](cfg), cfg)
    report = assemble(args.command, cfg, rows)
    text = dumps(report)
    if cfg.get("report"):
        with open(cfg["report"], "w", encoding="utf-8") as fh:
            fh.write(text)
        s = report["summary"]
        print(f"{s['passed']}/{s['total']} items pass; report written to {cfg['report']}")
    else:
        sys.stdout.write(text)
    for item_id in report["summary"]["failing"]:
        print(f"FAIL {item_id}", file=sys.stderr)
    return (EXIT_FAIL if report["summary"]["failed"] else EXIT_OK), report


def main(argv=None) -> int:
    try:
        code, _ = run(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_INVALID
        return EXIT_OK if code == 0 else EXIT_INVALID
    except (ValueError, ProvenanceError, jsonschema.ValidationError) as exc:
        msg = exc.message if isinstance(exc, jsonschema.ValidationError) else str(exc)
        print(f"equihol: invalid input: {msg}", file=sys.stderr)
        return EXIT_INVALID
    except (IntegrationError, FloatingPointError, ArithmeticError) as exc:
        print(f"equihol: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"equihol: cannot write output: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return code


if __name__ == "__main__":
    sys.exit(main())
