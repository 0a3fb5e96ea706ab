"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 bad norm spec or
arguments, 3 estimator failure, 4 output path not writable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from .birkhoff import SCAN_TOL, NoCompanionFound
from .constants import (
    KIND_NAMES,
    DomainError,
    GridParams,
    GridTooCoarse,
    classify_nonsquare,
    estimate_constant,
    kind_from_name,
    radon_defect,
)
from .normed_plane import NormError, resolve_norm
from .verify import RADON_TOL, SingularMap, hexagon_family_check, run_checks

log = logging.getLogger("heinzconst")

CONSTANT_COLUMNS = ("kind", "nu", "value", "x_angle", "y_angle", "theta_count", "psi_scan", "refine_levels", "tolerance")
SWEEP_COLUMNS = ("nu", "H", "x_angle", "y_angle")
CHECK_COLUMNS = ("name", "nu", "relation", "lhs", "rhs", "margin", "slack", "applicable", "passed")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_num(row[c]) for c in columns])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}", 4) from exc


def _grid(args) -> GridParams:
    try:
        return GridParams(theta_count=args.grid_theta, psi_scan=args.grid_psi, refine_levels=args.refine,
                          ortho_tol=args.tol)
    except ValueError as exc:
        raise CliError(str(exc), 2) from exc


def _norm(args):
    try:
        return resolve_norm(args.norm)
    except (NormError, OSError) as exc:
        raise CliError(f"norm spec error ({type(exc).__name__}): {exc}", 2) from exc


def _check_nus(nus):
    for v in nus:
        if not 0.0 <= v <= 1.0:
            raise CliError(f"nu must lie in [0, 1], got {v}", 2)


def _estimate_row(est) -> dict:
    return {
        "kind": est.kind.name,
        "nu": est.kind.nu,
        "value": est.value,
        "x_angle": est.witness.x.angle,
        "y_angle": est.witness.y.angle,
        "theta_count": est.grid[0],
        "psi_scan": est.grid[1],
        "refine_levels": est.grid[2],
        "tolerance": est.tolerance,
    }


def cmd_constants(args) -> int:
    norm = _norm(args)
    grid = _grid(args)
    _check_nus(args.nu)
    rows, estimates = [], []
    for name in args.kind:
        nus = args.nu if KIND_NAMES[name] == "HeinzB" else [None]
        for nu in nus:
            est = estimate_constant(norm, kind_from_name(name, nu), grid)
            estimates.append(est)
            rows.append(_estimate_row(est))
    if args.format == "svg":
        est = estimates[0]
        _sphere(norm, est, args.out or "constants.svg", f"{norm.label}: {est.kind.name} = {est.value:.6f}")
    elif args.format == "json":
        _emit(json.dumps({"norm": norm.label, "rows": rows}, indent=2) + "\n", args.out)
    else:
        _emit(_csv(CONSTANT_COLUMNS, rows), args.out)
    return 0


def cmd_sweep(args) -> int:
    norm = _norm(args)
    grid = _grid(args)
    if args.nu_steps < 2:
        raise CliError("--nu-steps must be at least 2", 2)
    _check_nus([args.nu_start, args.nu_stop])
    nus = np.linspace(args.nu_start, args.nu_stop, args.nu_steps)
    rows = []
    for nu in nus:
        est = estimate_constant(norm, kind_from_name("H", float(nu)), grid)
        rows.append({"nu": float(nu), "H": est.value, "x_angle": est.witness.x.angle, "y_angle": est.witness.y.angle})
    if args.format == "json":
        _emit(json.dumps({"norm": norm.label, "rows": rows}, indent=2) + "\n", args.out)
    else:
        _emit(_csv(SWEEP_COLUMNS, rows), args.out)
    if args.plot:
        from .plotting import sweep_figure

        try:
            sweep_figure([r["nu"] for r in rows], [r["H"] for r in rows], args.plot, label=norm.label)
        except OSError as exc:
            raise CliError(f"cannot write {args.plot}: {exc}", 4) from exc
    return 0


def cmd_verify(args) -> int:
    norm = _norm(args)
    grid = _grid(args)
    _check_nus(args.nu)
    report = run_checks(norm, args.nu, grid)
    if args.format == "csv":
        _emit(_csv(CHECK_COLUMNS, [c.as_dict() for c in report.checks]), args.out)
    else:
        _emit(report.to_json(), args.out)
    if args.figures:
        # one witness figure per H_nu estimate, next to the report
        stem = args.out.rsplit(".", 1)[0] if args.out and args.out != "-" else "verify"
        for est in report.constants:
            if est.kind.tag == "HeinzB":
                path = f"{stem}.H{est.kind.nu:g}.svg"
                _sphere(norm, est, path, f"{norm.label}: H_{est.kind.nu:g} = {est.value:.6f}")
    for c in report.failures():
        log.error("check %s failed at nu=%s: margin %.3g (slack %.3g)", c.name, c.nu, c.margin, c.slack)
    return 0 if report.passed else 1


def cmd_radon(args) -> int:
    norm = _norm(args)
    grid = _grid(args)
    value = radon_defect(norm, grid)
    payload = {"norm": norm.label, "radon_defect": value, "tolerance": RADON_TOL, "radon": value <= RADON_TOL}
    if args.format == "json":
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _emit(_csv(tuple(payload), [payload]), args.out)
    return 0


def cmd_nonsquare(args) -> int:
    norm = _norm(args)
    grid = _grid(args)
    _check_nus(args.nu)
    rows = []
    for nu in args.nu:
        est = estimate_constant(norm, kind_from_name("H", nu), grid)
        cls = classify_nonsquare(norm, nu, args.margin, grid, estimate=est)
        rows.append({"nu": nu, "H": est.value, "class": cls.value})
    if args.format == "json":
        _emit(json.dumps({"norm": norm.label, "rows": rows}, indent=2) + "\n", args.out)
    else:
        _emit(_csv(("nu", "H", "class"), rows), args.out)
    return 0


def cmd_hexagons(args) -> int:
    grid = _grid(args)
    try:
        results = hexagon_family_check(args.count, args.seed, grid)
    except (SingularMap, ValueError) as exc:
        raise CliError(str(exc), 2) from exc
    rows = [
        {"a11": A[0, 0], "a12": A[0, 1], "a21": A[1, 0], "a22": A[1, 1], "H": est.value}
        for A, est in results
    ]
    rows = [{k: float(v) for k, v in r.items()} for r in rows]
    if args.format == "json":
        _emit(json.dumps({"seed": args.seed, "rows": rows}, indent=2) + "\n", args.out)
    else:
        _emit(_csv(("a11", "a12", "a21", "a22", "H"), rows), args.out)
    return 0


def _sphere(norm, est, path, title) -> None:
    from .plotting import sphere_figure

    try:
        sphere_figure(norm, path, witness=(est.witness.x.coords, est.witness.y.coords), title=title)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", 4) from exc
    log.info("wrote %s", path)


def cmd_sphere(args) -> int:
    norm = _norm(args)
    grid = _grid(args)
    _check_nus(args.nu)
    est = estimate_constant(norm, kind_from_name("H", args.nu[0]), grid)
    _sphere(norm, est, args.out or "sphere.svg", f"{norm.label}: H_{args.nu[0]:g} = {est.value:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--norm", default="euclid",
                        help="alias (euclid, l1, linf, lp:P, lP, linf-l1, sqrt2max, hexagon), inline spec or spec file")
    common.add_argument("--grid-theta", type=int, default=2048)
    common.add_argument("--grid-psi", type=int, default=512)
    common.add_argument("--refine", type=int, default=3)
    common.add_argument("--tol", type=float, default=SCAN_TOL, help="orthogonality defect tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="heinzconst", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", parents=[common], help="estimate geometric constants")
    c.add_argument("--nu", type=float, nargs="+", default=[0.5])
    c.add_argument("--kind", action="append", choices=sorted(KIND_NAMES), help="constant to compute (repeatable)")
    c.add_argument("--format", choices=("csv", "json", "svg"), default="csv",
                   help="svg draws the witness of the first requested constant")
    c.set_defaults(func=cmd_constants)

    s = sub.add_parser("sweep", parents=[common], help="tabulate H_nu over a range of nu")
    s.add_argument("--nu-start", type=float, default=0.0)
    s.add_argument("--nu-stop", type=float, default=1.0)
    s.add_argument("--nu-steps", type=int, default=11)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.add_argument("--plot", default=None, help="also write an SVG plot of the sweep")
    s.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", parents=[common], help="run the inequality catalogue")
    v.add_argument("--nu", type=float, nargs="+", default=[0.0, 0.25, 0.5])
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--figures", action="store_true", help="also write one witness SVG per H_nu next to --out")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("radon", parents=[common], help="measure asymmetry of Birkhoff orthogonality")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    r.set_defaults(func=cmd_radon)

    n = sub.add_parser("nonsquare", parents=[common], help="classify uniform non-squareness from H_nu")
    n.add_argument("--nu", type=float, nargs="+", default=[0.5])
    n.add_argument("--margin", type=float, default=1e-2)
    n.add_argument("--format", choices=("csv", "json"), default="csv")
    n.set_defaults(func=cmd_nonsquare)

    h = sub.add_parser("hexagons", parents=[common], help="H_1/2 on random affine images of the regular hexagon")
    h.add_argument("--count", type=int, default=5)
    h.add_argument("--format", choices=("csv", "json"), default="csv")
    h.set_defaults(func=cmd_hexagons)

    g = sub.add_parser("sphere", parents=[common], help="draw the unit sphere and the H_nu witness as SVG")
    g.add_argument("--nu", type=float, nargs=1, default=[0.5])
    g.add_argument("--format", choices=("svg",), default="svg")
    g.set_defaults(func=cmd_sphere)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    log.handlers = [handler]
    log.propagate = False
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    if getattr(args, "kind", None) is None and args.command == "constants":
        args.kind = ["H"]
    try:
        return args.func(args)
    except CliError as exc:
        log.error("%s", exc)
        return exc.code
    except DomainError as exc:
        log.error("DomainError: %s", exc)
        return 2
    except (NoCompanionFound, GridTooCoarse) as exc:
        log.error("estimator failure (%s): %s", type(exc).__name__, exc)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
