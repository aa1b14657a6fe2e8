"""Command-line entry point: ``spindlekit <command> [options]``.

Exit status is 0 on success, 1 when a computation fails (or a verification
claim fails) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import BadRegionSpec, OutOfRange, SpindleKitError
from .io import csv_text, dumps_json

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, payload: dict, header=None, rows=None) -> None:
    """Write JSON (``payload``) or CSV (``header``/``rows``) to stdout or ``--out``."""
    fmt, path = _resolve_output(args, default="csv" if rows is not None else "json")
    if fmt == "csv":
        if rows is None:
            header = list(payload)
            rows = [[payload[k] for k in header]]
        text = csv_text(header, rows)
    else:
        text = dumps_json(payload)
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _resolve_output(args, default: str):
    out = getattr(args, "out", None)
    fmt = getattr(args, "format", None)
    path = None
    if out in ("csv", "json"):
        fmt = fmt or out
    elif out:
        path = out
        if fmt is None:
            fmt = "csv" if out.endswith(".csv") else "json" if out.endswith(".json") else None
    return fmt or default, path


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


# commands


def cmd_cap_eigen(args) -> int:
    from .spectral import cap_eigenvalue, char_exponent

    r = cap_eigenvalue(args.b, args.tol or 1e-9)
    payload = {
        "b": args.b,
        "lambda": r.value,
        "alpha": char_exponent(r.value).alpha,
        "error_estimate": r.error_estimate,
        "method": r.method,
        "step": r.discretization,
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_bkp_table(args) -> int:
    from .spectral import bkp_sum, cap_eigenvalue, char_exponent

    if args.n < 1:
        raise UsageError("--n must be positive")
    tol = args.tol or 1e-9
    rows = []
    for b in np.linspace(args.bmin, args.bmax, args.n):
        b = float(b)
        lam = cap_eigenvalue(b, tol).value
        rows.append([b, lam, char_exponent(lam).alpha, bkp_sum(b, tol)])
    header = ["b", "lambda", "alpha", "bkp_sum"]
    fmt, _ = _resolve_output(args, "csv")
    if fmt == "json":
        _emit(args, {"rows": [dict(zip(header, r)) for r in rows]})
    else:
        _emit(args, {}, header, rows)
    return EXIT_OK


def cmd_iso_verify(args) -> int:
    from .isoperimetry import IsoTestCurveFamily, check_curve, check_doubled, polygon_family
    from .regions import parse_polygon

    kind, value = args.surface
    rows = []
    if kind == "spindle":
        try:
            a = float(value)
        except ValueError as exc:
            raise UsageError(f"spindle parameter must be a number, got {value!r}") from exc
        fam = IsoTestCurveFamily(a, args.seed, args.family, args.n)
        for label, curves, eq in fam.generate():
            r = check_curve(a, curves, label=label, equality_expected=eq)
            rows.append(r)
    elif kind == "polygon":
        W = parse_polygon(_load_json(value))
        for label, parts in polygon_family(W, args.seed, args.n):
            if args.family in ("all", label.rsplit("-", 1)[0]):
                rows.append(check_doubled(W, parts, label=label))
    else:
        raise UsageError("--surface must be 'spindle <a>' or 'polygon <file>'")
    header = ["curve_id", "L", "A", "margin", "relative_margin"]
    table = [[r.label, r.L, r.A, r.margin, r.relative_margin] for r in rows]
    fmt, _ = _resolve_output(args, "csv")
    if fmt == "json":
        _emit(args, {"rows": [dict(zip(header, t)) | {"passed": r.passed} for t, r in zip(table, rows)]})
    else:
        _emit(args, {}, header, table)
    return EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


def cmd_smooth(args) -> int:
    from .smoothing import (
        curvature_budget,
        sign_conditions,
        smooth_tip,
        smoothed_curvature,
        tip_curvature_mass,
        total_curvature_smoothed,
    )

    s = smooth_tip(args.a, args.eps)
    rep = sign_conditions(s)
    rho = np.linspace(0.0, args.eps, args.grid)
    mass = tip_curvature_mass(s)
    c_hat = args.c_hat
    budget = curvature_budget(0.0, [math.pi * args.a], args.eps, c_hat)
    payload = {
        "a": args.a,
        "eps": args.eps,
        "coefficients": {"b0": s.b0, "b1": s.b1, "b2": s.b2},
        "matching_residuals": list(s.matching_residuals),
        "sign_conditions": {
            "slope_positive": rep.slope_positive,
            "third_negative": rep.third_negative,
            "second_bounded": rep.second_bounded,
            "curvature_monotone": rep.curvature_monotone,
        },
        "curvature_grid": {"rho": rho.tolist(), "K": smoothed_curvature(s, rho).tolist()},
        "budget": {
            "tip_mass": mass,
            "tip_bound": budget,
            "c_hat": c_hat,
            "within_bound": mass <= budget,
            "total_curvature": total_curvature_smoothed(args.a, args.eps),
        },
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_dn_eigen(args) -> int:
    from .fem import dn_eigenvalue, mesh_region
    from .regions import build_region, parse_polygon

    spec = _load_json(args.region)
    if "W" not in spec:
        raise UsageError("region file needs a 'W' entry")
    W = parse_polygon(spec["W"])
    region = build_region(W, spec.get("V"), spec.get("dirichlet"), spec.get("neumann"))
    r = dn_eigenvalue(W, spec.get("V"), args.h, args.tol or 1e-8, spec.get("dirichlet"), spec.get("neumann"))
    if args.mesh_out:
        with open(args.mesh_out, "w", encoding="utf-8") as fh:
            fh.write(mesh_region(region, h=args.h).to_off())
    payload = {
        "mu": r.value,
        "error_estimate": r.error_estimate,
        "h": r.discretization,
        "method": r.method,
        "area": region.area(),
    }
    _emit(args, payload)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import SUITES, run_all

    rep = run_all(args.seed) if args.suite == "all" else SUITES[args.suite](args.seed)
    fmt, path = _resolve_output(args, "json")
    if fmt == "csv":
        _emit(args, {}, ["id", "anchor", "verdict", "tolerance", "inputs_digest"], list(rep.to_csv_rows()))
    else:
        text = rep.to_json()
        if path is None:
            sys.stdout.write(text)
        else:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
    for c in rep.failures():
        print(f"FAIL {c.claim_id}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=7, help="random seed (default 7)")
    common.add_argument("--out", default=None, help="output path, or 'csv'/'json' for stdout in that format")
    common.add_argument("--format", choices=["csv", "json"], default=None, help="output format")
    common.add_argument("--tol", type=float, default=None, help="solver tolerance (command-specific default)")

    p = argparse.ArgumentParser(prog="spindlekit", description="Isoperimetry and eigenvalues on spindles and doubled spherical polygons.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("cap-eigen", parents=[common], help="first Dirichlet eigenvalue of the cap u >= b")
    s.add_argument("--b", type=float, required=True)
    s.set_defaults(func=cmd_cap_eigen)

    s = sub.add_parser("bkp-table", parents=[common], help="table of alpha(b) + alpha(-b)")
    s.add_argument("--bmin", type=float, default=-1.5)
    s.add_argument("--bmax", type=float, default=1.5)
    s.add_argument("--n", type=int, default=100)
    s.set_defaults(func=cmd_bkp_table)

    s = sub.add_parser("iso-verify", parents=[common], help="isoperimetric margins over a curve family")
    s.add_argument("--surface", nargs=2, metavar=("KIND", "VALUE"), required=True, help="'spindle <a>' or 'polygon <file.json>'")
    s.add_argument("--family", default="all")
    s.add_argument("--n", type=int, default=200)
    s.set_defaults(func=cmd_iso_verify)

    s = sub.add_parser("smooth", parents=[common], help="quartic tip smoothing report")
    s.add_argument("--a", type=float, required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--grid", type=int, default=101, help="points in the reported curvature grid")
    s.add_argument("--c-hat", type=float, default=1.0, help="budget constant in the tip-mass bound")
    s.add_argument("--report", choices=["json", "csv"], default=None, help="alias for --format")
    s.set_defaults(func=cmd_smooth)

    s = sub.add_parser("dn-eigen", parents=[common], help="mixed Dirichlet-Neumann eigenvalue by finite elements")
    s.add_argument("--region", required=True, help="region JSON file")
    s.add_argument("--h", type=float, default=0.05)
    s.add_argument("--mesh-out", default=None, help="write the fine mesh as OFF with boundary tags")
    s.set_defaults(func=cmd_dn_eigen)

    s = sub.add_parser("verify", parents=[common], help="run verification suites")
    s.add_argument("suite", choices=["all", "iso", "faber-krahn", "lemma"])
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "report", None) and args.format is None:
        args.format = args.report
    try:
        return args.func(args)
    except (UsageError, OutOfRange, BadRegionSpec) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpindleKitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
