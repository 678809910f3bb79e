"""Command-line front end.

Exit codes: 0 pass, 1 mathematical failure, 2 usage or parse failure.
"""

from __future__ import annotations

import argparse
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import report
from .axiom import NotASpaceFormError, ThetaRangeError, check_theta, schur_scan, theorem_check
from .charts import (
    CHART_TOL,
    KAHLER_TOL,
    CatalogError,
    ChartError,
    catalog,
    catalog_names,
    hermitian_point,
    load_chart,
    nabla_J_residual,
    riemann_coordinates,
)
from .planes import orthonormal_frame
from .submanifold import patch_names
from .tensor import HypothesisError, require_even_dim, structure_residuals, symmetry_residuals

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_SPACE_RE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\((.*)\))?\s*$")


class UsageError(Exception):
    pass


def parse_space(text: str):
    """``name``, ``name(4)``, ``name(c=4)`` or a path to a catalog JSON file."""
    if text.endswith(".json") or Path(text).is_file():
        return load_chart(text)
    m = _SPACE_RE.match(text)
    if not m:
        raise UsageError(f"cannot parse space {text!r}")
    name, args = m.group(1), m.group(2)
    if name not in catalog_names():
        raise UsageError(f"unknown space {name!r}; known: {', '.join(catalog_names())}")
    params = {}
    if args and args.strip():
        defaults = list(catalog(name).params)
        for i, part in enumerate(a.strip() for a in args.split(",")):
            key, _, val = part.rpartition("=")
            if not key:
                if i >= len(defaults):
                    raise UsageError(f"too many parameters for {name!r}")
                key = defaults[i]
            try:
                params[key.strip()] = float(val)
            except ValueError:
                raise UsageError(f"parameter {part!r} is not a number") from None
    return catalog(name, params)


def _parse_point(text: str | None, chart) -> np.ndarray:
    if text is None:
        if chart.points:
            return np.array(chart.points[0])
        return (chart.lower + chart.upper) / 2
    try:
        pt = np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"--point must be comma-separated numbers, got {text!r}") from None
    if pt.shape != (chart.dim,):
        raise UsageError(f"--point needs {chart.dim} coordinates")
    return pt


def _emit(args, payload: dict, lines: list[str]) -> None:
    if args.json:
        sys.stdout.write(report.dumps(payload) + "\n")
    else:
        sys.stdout.write("\n".join(lines) + "\n")


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def cmd_validate(args) -> int:
    try:
        chart = load_chart(args.file)
    except (OSError, CatalogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        require_even_dim(chart.dim)
    except HypothesisError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_FAIL
    pts = [np.array(p) for p in chart.points] + list(chart.sample_points(args.points, args.seed))
    results = []
    worst: dict[str, float] = {}
    failures: set[str] = set()
    for u in pts:
        try:
            g = chart.metric(u)
            res = {}
            if chart.has_J:
                res.update(structure_residuals(g, chart.structure(u)))
            else:
                res["metric_symmetry"] = float(np.max(np.abs(g - g.T)))
                res["metric_min_eigenvalue"] = float(np.linalg.eigvalsh((g + g.T) / 2).min())
            if res["metric_min_eigenvalue"] > 0:
                R = riemann_coordinates(chart, u).in_frame(orthonormal_frame(g))
                res.update(symmetry_residuals(R))
        except ChartError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        for k, v in res.items():
            bad = v <= 0 if k == "metric_min_eigenvalue" else v > args.tol
            if bad:
                failures.add(k)
            if k == "metric_min_eigenvalue":
                worst[k] = min(worst.get(k, math.inf), v)
            else:
                worst[k] = max(worst.get(k, 0.0), v)
        results.append({"point": u, "residuals": res})
    ok = not failures
    payload = {
        "schema": report.SCHEMA_VERSION,
        "command": "validate",
        "space": chart.name,
        "tol": args.tol,
        "valid": ok,
        "failures": sorted(failures),
        "worst": worst,
        "points": results,
    }
    lines = [f"space: {chart.name} ({len(pts)} points, tol {args.tol:g})"]
    lines += [f"  {k:<22} {_fmt(v)}{'  FAIL' if k in failures else ''}" for k, v in worst.items()]
    lines.append("valid" if ok else f"invalid: {', '.join(sorted(failures))}")
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_FAIL


def _theta(args) -> float:
    theta = math.radians(args.theta) if args.degrees else args.theta
    check_theta(theta)
    return theta


def kahler_sweep(chart, u, seed: int, k: int = 4) -> tuple[bool | None, float | None]:
    """Kahler verdict from ``nabla J`` at ``u``, the documented points and ``k`` seeded points."""
    if not chart.has_J:
        return None, None
    pts = [u] + [np.array(p) for p in chart.points] + list(chart.sample_points(k, seed))
    worst = max(nabla_J_residual(chart, p) for p in pts)
    return worst <= KAHLER_TOL, worst


def cmd_axiom(args) -> int:
    chart = parse_space(args.space)
    theta = _theta(args)
    u = _parse_point(args.point, chart)
    p = hermitian_point(chart, u)
    kahler, nj = kahler_sweep(chart, u, args.seed)
    rep = theorem_check(p, theta, args.samples, args.seed, args.tol, kahler=kahler)
    worst = rep.scan.worst
    payload = {
        "schema": report.SCHEMA_VERSION,
        "command": "axiom",
        "space": chart.name,
        "params": dict(chart.params),
        "point": u,
        "theta": theta,
        "samples": args.samples,
        "seed": args.seed,
        "tol": args.tol,
        "verdict": rep.scan.verdict,
        "max_residual": rep.scan.max_residual,
        "worst": report.record_dict(worst),
        "c_star": rep.defect.c_star,
        "defect_norm": rep.defect.defect_norm,
        "theorem": rep.theorem,
        "kahler": kahler,
        "nabla_J_residual": nj,
        "corollary": rep.corollary,
    }
    lines = [
        f"space: {chart.name} {dict(chart.params) or ''} at u = {np.round(u, 6).tolist()}",
        f"theta: {theta:.10g} rad, {args.samples} samples, seed {args.seed}, tol {args.tol:g}",
        f"axiom: {rep.scan.verdict} (max |eq1|,|eq2| = {_fmt(rep.scan.max_residual)})",
        "worst record: " + ", ".join(f"{k}={_fmt(v)}" for k, v in worst.residuals().items()),
        f"c_star: {_fmt(rep.defect.c_star)}  defect_norm: {_fmt(rep.defect.defect_norm)}",
        f"theorem: {rep.theorem}",
        f"kahler: {kahler} (max nabla J = {_fmt(nj) if nj is not None else 'n/a'})  corollary: {rep.corollary}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK if rep.scan.holds and rep.ok else EXIT_FAIL


def cmd_schur(args) -> int:
    chart = parse_space(args.space)
    pts = chart.sample_points(args.points, args.seed)
    hps = [hermitian_point(chart, u) for u in pts]
    try:
        res = schur_scan(hps, args.tol)
    except NotASpaceFormError as exc:
        idx = int(re.search(r"point (\d+)", str(exc)).group(1))
        msg = f"{exc}; u = {np.round(pts[idx], 6).tolist()}"
        if args.json:
            _emit(args, {"schema": report.SCHEMA_VERSION, "command": "schur", "space": chart.name,
                         "error": "not_a_space_form", "message": msg, "point": pts[idx]}, [])
        else:
            print(f"not a space form: {msg}", file=sys.stderr)
        return EXIT_FAIL
    payload = {
        "schema": report.SCHEMA_VERSION,
        "command": "schur",
        "space": chart.name,
        "params": dict(chart.params),
        "seed": args.seed,
        "tol": args.tol,
        "points": [{"u": u, "c": c} for u, c in zip(pts, res.c_values)],
        "spread": res.spread,
        "constant": res.constant,
    }
    lines = [f"space: {chart.name} {dict(chart.params) or ''}, {len(pts)} points"]
    lines += [f"  u = {np.round(u, 4).tolist()}  c = {c:.10g}" for u, c in zip(pts, res.c_values)]
    lines.append(f"spread: {_fmt(res.spread)} ({'constant' if res.constant else 'NOT constant'})")
    _emit(args, payload, lines)
    return EXIT_OK if res.constant else EXIT_FAIL


def cmd_list(args) -> int:
    print("spaces:  " + " ".join(catalog_names()))
    print("patches: " + " ".join(patch_names()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thetaplanes",
        description="Check the theta-holomorphic plane axiom on almost Hermitian models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a catalog file's metric, J and curvature identities")
    v.add_argument("file")
    v.add_argument("--points", type=int, default=3, help="extra seeded sample points")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=CHART_TOL)
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_validate)

    a = sub.add_parser("axiom", help="scan the axiom and check the theorem at a chart point")
    a.add_argument("space", help="catalog name such as sphere(1), or a catalog JSON file")
    a.add_argument("--theta", type=float, default=math.pi / 4)
    a.add_argument("--degrees", action="store_true", help="read --theta in degrees")
    a.add_argument("--samples", type=int, default=1000)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--tol", type=float, default=CHART_TOL)
    a.add_argument("--point", help="chart point as comma-separated coordinates")
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_axiom)

    s = sub.add_parser("schur", help="compare the fitted curvature constant across seeded points")
    s.add_argument("space")
    s.add_argument("--points", type=int, default=10)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tol", type=float, default=CHART_TOL)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_schur)

    ls = sub.add_parser("list", help="list built-in spaces and patches")
    ls.set_defaults(func=cmd_list)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "samples", 1) < 1:
        parser.error("--samples must be positive")
    if args.command == "validate" and args.points < 0:
        parser.error("--points must be non-negative")
    if args.command == "schur" and args.points < 2:
        parser.error("schur needs --points >= 2")
    try:
        return args.func(args)
    except ThetaRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, CatalogError, ChartError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
