"""Command-line interface: mesh generation, verification, searches.

Exit codes: 0 success / all checks pass, 1 verification failure or refusal,
2 usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from .algebra import BranchConfiguration
from .errors import DomainError, HennebergError
from .geometry import bjorling_solve, equator_curve
from .meshing import SamplingSpec, build_mesh, write_obj, write_ply
from .period import (
    ModuliPoint,
    brute_search_m1,
    continue_from,
    family_theta2,
    h2_point,
    horizontal_residual_m2,
    period_jacobian_m2,
    period_residuals,
    symmetric_example,
    vertical_residual_m2,
)
from .reports import verification_report
from .surfaces import (
    eval_hm_even,
    surface_associated,
    surface_conjugate,
    surface_h1,
    surface_hm,
    surface_integrated,
    surface_limit_m2,
)
from .weierstrass import WeierstrassData

PERIOD_TOL = 1e-10


class CliError(Exception):
    """Usage-level failure (exit code 2)."""


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}")


def load_data_file(path) -> WeierstrassData:
    """Parse {c: [re, im], m: int, a: [[r, theta], ...]} (angles in radians)."""
    raw = _load_json(path)
    for key in ("c", "m", "a"):
        if key not in raw:
            raise CliError(f"{path}: missing field '{key}'")
    c = raw["c"]
    if not (isinstance(c, (list, tuple)) and len(c) == 2):
        raise CliError(f"{path}: field 'c' must be [re, im]")
    pairs = raw["a"]
    if not isinstance(pairs, list) or any(
        not (isinstance(p, (list, tuple)) and len(p) == 2) for p in pairs
    ):
        raise CliError(f"{path}: field 'a' must be a list of [r, theta] pairs")
    m = raw["m"]
    if not isinstance(m, int) or m < 1:
        raise CliError(f"{path}: field 'm' must be a positive integer")
    if len(pairs) != m + 1:
        raise CliError(f"{path}: field 'a' must hold m+1 = {m + 1} pairs")
    try:
        config = BranchConfiguration.from_polar(pairs)
        return WeierstrassData(complex(c[0], c[1]), config)
    except DomainError as exc:
        raise CliError(f"{path}: {exc}")


def _sampling_from(args, config: dict) -> SamplingSpec:
    base = {
        "r_min": 0.125,
        "r_max": 8.0,
        "n_r": 129,
        "n_theta": 256,
        "quotient": False,
        "wrap": True,
    }
    base.update(config.get("sampling", {}))
    if args.r_min is not None:
        base["r_min"] = args.r_min
    if args.r_max is not None:
        base["r_max"] = args.r_max
    if args.n_r is not None:
        base["n_r"] = args.n_r
    if args.n_theta is not None:
        base["n_theta"] = args.n_theta
    if args.quotient:
        base["quotient"] = True
    if args.no_wrap:
        base["wrap"] = False
    return SamplingSpec(**base)


def _emit(payload: dict, out_path=None):
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _require(args, names):
    for name in names:
        if getattr(args, name) is None:
            raise CliError(f"--{name.replace('_', '-')} is required for this selector")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    config = _load_json(args.config) if args.config else {}
    spec = _sampling_from(args, config)
    selector = args.surface
    if selector == "h1":
        smap = surface_h1()
    elif selector == "hm-odd":
        _require(args, ["m"])
        if args.m % 2 != 1:
            raise CliError("hm-odd needs odd --m")
        smap = surface_hm(args.m)
    elif selector == "hm-even":
        _require(args, ["m"])
        if args.m % 2 != 0:
            raise CliError("hm-even needs even --m")
        smap = surface_hm(args.m)
    elif selector == "conjugate":
        _require(args, ["m"])
        smap = surface_conjugate(args.m)
    elif selector == "associated":
        _require(args, ["m", "phi"])
        smap = surface_associated(symmetric_example(args.m), args.phi)
    elif selector == "limit-m2":
        smap = surface_limit_m2()
    elif selector == "family":
        _require(args, ["theta2"])
        data = family_theta2(args.theta2).weierstrass()
        smap = surface_integrated(data)
    elif selector == "custom":
        if args.data is None and not {"c", "m", "a"} <= set(config):
            raise CliError("custom needs --data FILE or a config with c/m/a")
        data = (
            load_data_file(args.data)
            if args.data
            else load_data_file_from_dict(config)
        )
        res = period_residuals(data)
        if not res.passes(PERIOD_TOL):
            _emit(
                {
                    "schema": 1,
                    "refused": True,
                    "reason": "period residuals exceed tolerance",
                    "tolerance": PERIOD_TOL,
                    "horizontal": [res.horizontal.real, res.horizontal.imag],
                    "vertical": float(res.vertical),
                    "onesided": float(res.onesided),
                }
            )
            return 1
        smap = surface_integrated(data)
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(f"unknown surface selector {selector!r}")

    mesh = build_mesh(smap, spec)
    out = args.out or f"{selector}.{args.format}"
    if args.format == "obj":
        write_obj(mesh, out)
    else:
        write_ply(mesh, out)
    _emit(
        {
            "schema": 1,
            "surface": smap.name,
            "out": out,
            "format": args.format,
            "vertices": int(len(mesh.vertices)),
            "faces": int(len(mesh.faces)),
            "sampling": spec.to_dict(),
        }
    )
    return 0


def load_data_file_from_dict(config: dict) -> WeierstrassData:
    c = config["c"]
    return WeierstrassData(
        complex(c[0], c[1]), BranchConfiguration.from_polar(config["a"])
    )


def cmd_verify(args) -> int:
    selector = args.surface
    if selector == "h1":
        data, label, iso_m = symmetric_example(1), "h1", 1
    elif selector == "hm":
        _require(args, ["m"])
        data, label, iso_m = symmetric_example(args.m), f"hm m={args.m}", args.m
    elif selector == "family":
        _require(args, ["theta2"])
        data = family_theta2(args.theta2).weierstrass()
        label, iso_m = f"family theta2={args.theta2}", None
    else:  # custom
        _require(args, ["data"])
        data, label, iso_m = load_data_file(args.data), "custom", None
    report = verification_report(
        data, label, isometries_for=iso_m, samples=args.samples, seed=args.seed
    )
    _emit(report, args.out)
    return 0 if report["pass"] else 1


def cmd_search_m1(args) -> int:
    hits = brute_search_m1(
        span=(args.r_lo, args.r_hi) if args.r_lo else args.span,
        n_radial=args.n_radial,
        n_angular=args.n_angular,
        refine_steps=args.refine_steps,
    )
    payload = {
        "schema": 1,
        "grid": {
            "span": args.span,
            "n_radial": args.n_radial,
            "n_angular": args.n_angular,
        },
        "minimizers": [
            {
                "r1": h.r1,
                "r2": h.r2,
                "theta2": h.theta2,
                "beta": h.beta,
                "residual": h.residual,
                "henneberg": h.is_henneberg(),
            }
            for h in hits
        ],
        "all_henneberg": bool(all(h.is_henneberg() for h in hits)),
    }
    _emit(payload, args.out)
    return 0 if payload["all_henneberg"] else 1


def _moduli_from_file(path) -> ModuliPoint:
    raw = _load_json(path)
    try:
        return ModuliPoint(
            raw["r1"], raw["r2"], raw["r3"], raw["theta2"], raw["theta3"], raw["beta"]
        )
    except (KeyError, TypeError) as exc:
        raise CliError(f"{path}: invalid moduli point ({exc})")


def cmd_continue(args) -> int:
    start = _moduli_from_file(args.start) if args.start else h2_point()
    point = continue_from(start, args.r1, args.r2)
    f_val = horizontal_residual_m2(point)
    payload = {
        "schema": 1,
        "r1": point.r1,
        "r2": point.r2,
        "r3": point.r3,
        "theta2": point.theta2,
        "theta3": point.theta3,
        "beta": point.beta,
        "F": [f_val.real, f_val.imag],
        "G": vertical_residual_m2(point),
        "det_jacobian": float(np.linalg.det(period_jacobian_m2(point))),
    }
    _emit(payload, args.out)
    return 0


def _closed_form_for_cusps(n: int):
    """Map a cusp count to the matching closed-form exponent m."""
    if n < 3:
        raise CliError("cusp counts below 3 are not supported")
    if n % 2 == 1:
        return n - 1
    if n % 4 == 0:
        return (n - 2) // 2
    return Fraction(1, (n - 2) // 2)  # n = 4k+2  ->  m = 1/(2k)


def cmd_bjorling(args) -> int:
    cusps = 4 if args.astroid else args.cusps
    if cusps is None:
        raise CliError("need --cusps N or --astroid")
    m = _closed_form_for_cusps(cusps)
    curve = equator_curve(m)
    patch = bjorling_solve(curve, quad_order=args.quad_order)

    us = np.linspace(curve.domain[0], curve.domain[1], args.n_u)
    vs = np.linspace(-args.strip, args.strip, args.n_v)
    sup_err = 0.0
    for v in vs:
        got = patch.at(us, np.full_like(us, v))
        want = eval_hm_even(m, math.exp(-v) * np.ones_like(us), us)
        sup_err = max(sup_err, float(np.abs(got - want).max()))

    payload = {
        "schema": 1,
        "cusps": int(cusps),
        "closed_form_m": float(m),
        "strip": args.strip,
        "sup_error": sup_err,
        "quad_order": args.quad_order,
    }
    if args.out:
        spec = SamplingSpec(
            r_min=math.exp(-args.strip),
            r_max=math.exp(args.strip),
            n_r=args.n_v,
            n_theta=args.n_u,
            wrap=False,
        )
        mesh = build_mesh(patch.surface_map(), spec)
        if args.out.endswith(".ply"):
            write_ply(mesh, args.out)
        else:
            write_obj(mesh, args.out)
        payload["out"] = args.out
        payload["vertices"] = int(len(mesh.vertices))
    _emit(payload)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="henneberg",
        description="Branched minimal surfaces from Weierstrass data: "
        "generation, verification, and period-problem tooling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="tessellate a surface and export a mesh")
    gen.add_argument(
        "surface",
        choices=[
            "h1",
            "hm-odd",
            "hm-even",
            "conjugate",
            "associated",
            "limit-m2",
            "family",
            "custom",
        ],
    )
    gen.add_argument("--m", type=int)
    gen.add_argument("--phi", type=float, help="associated-family angle")
    gen.add_argument("--theta2", type=float, help="family parameter")
    gen.add_argument("--data", help="custom Weierstrass data JSON file")
    gen.add_argument("--config", help="config JSON (data fields + sampling block)")
    gen.add_argument("--out")
    gen.add_argument("--format", choices=["obj", "ply"], default="obj")
    gen.add_argument("--r-min", dest="r_min", type=float)
    gen.add_argument("--r-max", dest="r_max", type=float)
    gen.add_argument("--nr", dest="n_r", type=int)
    gen.add_argument("--ntheta", dest="n_theta", type=int)
    gen.add_argument("--quotient", action="store_true")
    gen.add_argument("--no-wrap", dest="no_wrap", action="store_true")
    gen.set_defaults(func=cmd_generate)

    ver = sub.add_parser("verify", help="run verification checks, emit JSON report")
    ver.add_argument("surface", choices=["h1", "hm", "family", "custom"])
    ver.add_argument("--m", type=int)
    ver.add_argument("--theta2", type=float)
    ver.add_argument("--data")
    ver.add_argument("--samples", type=int, default=240)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--out")
    ver.set_defaults(func=cmd_verify)

    sea = sub.add_parser("search-m1", help="brute-force the complexity-1 moduli")
    sea.add_argument("--span", type=float, default=4.0)
    sea.add_argument("--r-lo", dest="r_lo", type=float)
    sea.add_argument("--r-hi", dest="r_hi", type=float)
    sea.add_argument("--n-radial", dest="n_radial", type=int, default=33)
    sea.add_argument("--n-angular", dest="n_angular", type=int, default=48)
    sea.add_argument("--refine-steps", dest="refine_steps", type=int, default=50)
    sea.add_argument("--out")
    sea.set_defaults(func=cmd_search_m1)

    con = sub.add_parser("continue", help="continue a complexity-2 solution")
    con.add_argument("--r1", type=float, required=True)
    con.add_argument("--r2", type=float, required=True)
    con.add_argument("--from", dest="start", help="starting moduli point JSON")
    con.add_argument("--out")
    con.set_defaults(func=cmd_continue)

    bjo = sub.add_parser("bjorling", help="solve a hypocycloid Björling problem")
    bjo.add_argument("--curve", choices=["hypocycloid"], default="hypocycloid")
    bjo.add_argument("--cusps", type=int)
    bjo.add_argument("--astroid", action="store_true")
    bjo.add_argument("--quad-order", dest="quad_order", type=int, default=24)
    bjo.add_argument("--strip", type=float, default=0.05)
    bjo.add_argument("--n-u", dest="n_u", type=int, default=64)
    bjo.add_argument("--n-v", dest="n_v", type=int, default=9)
    bjo.add_argument("--out")
    bjo.set_defaults(func=cmd_bjorling)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HennebergError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
