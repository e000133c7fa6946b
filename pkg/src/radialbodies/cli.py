"""radialbodies command line.

    radialbodies covariogram --body K.json [--grid 33] [--ray 1,0]
    radialbodies ballbody    --function g.json --p 1 [--grid 64]
    radialbodies radialmean  --body K.json --p -0.5 [--grid 64] [--mc-samples N]
    radialbodies limits      --body K.json [--p-list -0.999,200]
    radialbodies verify      --suite suites/default.json [--seed 7]
    radialbodies study       --body K.json --p 1

Exit status: 0 success/pass, 1 check failure, 2 input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .ballbody import PIndex, QuadratureError, QuadratureSpec, ball_gauge, radial_samples
from .geometry import (DirectionGrid, covariogram, difference_body, difference_body_gauge,
                       polar_projection_gauge, volume)
from .io import InputError, dump_json, load_json, parse_body, parse_function, radial_csv, table_csv
from .logconcave import CovariogramFn
from .radialmean import radial_mean_direct_mc, radial_mean_samples, scaled_limit_samples

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_LIMIT_PS = "-0.999,-0.99,-0.9,50,100,200"


def _p(text: str) -> PIndex:
    try:
        return PIndex.parse(text)
    except ValueError as e:
        raise InputError(f"--p: {e}") from None


def _p_list(text: str):
    return [_p(t) for t in text.split(",") if t.strip()]


def _quadrature(args) -> QuadratureSpec:
    return QuadratureSpec(legendre_tol=args.tol) if args.tol else QuadratureSpec()


def _grid(n: int, args) -> DirectionGrid:
    if args.grid < 8:
        raise InputError("--grid: need at least 8 directions")
    return DirectionGrid.make(n, args.grid, seed=args.seed)


def _emit(args, text: str, summary: dict | None = None):
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        if summary is not None:
            out.with_suffix(".json").write_text(dump_json(summary))
            sys.stdout.write(dump_json(summary))
    else:
        sys.stdout.write(text)
        if summary is not None:
            sys.stderr.write(dump_json(summary))


def _summary(source, p: PIndex, grid: DirectionGrid, radii) -> dict:
    finite = radii[np.isfinite(radii)]
    return {"body": source, "p": p.value if np.isfinite(p.value) else "inf",
            "grid": {"dimension": grid.dimension, "count": len(grid), "scheme": grid.scheme,
                     "seed": grid.seed},
            "min_radius": float(radii.min()), "max_radius": float(finite.max()) if len(finite) else "inf"}


# ------------------------------------------------------------- subcommands


def cmd_covariogram(args) -> int:
    spec = load_json(args.body)
    K = parse_body(spec)
    n = K.dimension
    if args.ray:
        x = np.array([float(t) for t in args.ray.split(",")])
        if len(x) != n or not np.any(x):
            raise InputError(f"--ray: need a nonzero vector in R^{n}")
        x = x / np.linalg.norm(x)
        tau = 1.0 / float(difference_body_gauge(K, x))
        pts = np.linspace(0.0, tau, args.grid)[:, None] * x
    else:
        if args.grid < 2:
            raise InputError("--grid: need at least 2 lattice points per axis")
        lo, hi = difference_body(K).bounding_box
        axes = [np.linspace(l, h, args.grid) for l, h in zip(lo, hi)]
        pts = np.column_stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")])
    vals = np.asarray(covariogram(K, pts)).reshape(len(pts))
    header = ["index"] + [f"x_{i + 1}" for i in range(n)] + ["value"]
    _emit(args, table_csv(header, [[i, *pts[i], vals[i]] for i in range(len(pts))]))
    return EXIT_OK


def cmd_ballbody(args) -> int:
    spec = load_json(args.function)
    g = parse_function(spec)
    p = _p(args.p)
    grid = _grid(g.dimension, args)
    S = radial_samples(g, p, grid, _quadrature(args))
    _emit(args, radial_csv(grid.directions, S.radii), _summary(spec, p, grid, S.radii))
    return EXIT_OK


def cmd_radialmean(args) -> int:
    spec = load_json(args.body)
    K = parse_body(spec)
    p = _p(args.p)
    grid = _grid(K.dimension, args)
    q = _quadrature(args)
    S = radial_mean_samples(K, p, grid, q)
    summary = _summary(spec, p, grid, S.radii)
    if args.mc_samples:
        x = grid.directions[0]
        mc = radial_mean_direct_mc(K, p, x, args.mc_samples, args.seed)
        summary["monte_carlo"] = {"direction": x.tolist(), "gauge": 1.0 / S.radii[0],
                                  "estimate": mc.value, "stderr": mc.stderr,
                                  "finite_variance": mc.finite_variance}
    _emit(args, radial_csv(grid.directions, S.radii), summary)
    return EXIT_OK


def cmd_limits(args) -> int:
    """p vs max relative deviation from DK (p > 0) or the polar projection body
    (p < 0, after dilation by (1+p)^{1/p}); the volume-scaled column compares
    with Vol(K) times the polar projection body instead."""
    K = parse_body(load_json(args.body))
    if K.dimension > 3:
        raise InputError("limits: bodies of dimension <= 3 only")
    grid = _grid(K.dimension, args) if K.dimension > 1 else DirectionGrid.make(1, 2)
    q = _quadrature(args)
    D = grid.directions
    dk = 1.0 / np.asarray(difference_body_gauge(K, D)).reshape(len(grid))
    pp = np.array([1.0 / polar_projection_gauge(K, th) for th in D])
    vol = volume(K)
    tol = args.tol_limit
    rows, failed = [], False
    for P in _p_list(args.p_list or DEFAULT_LIMIT_PS):
        if P.value > 0:
            r = radial_mean_samples(K, P, grid, q).radii
            dev, dev_v, target = np.max(np.abs(r - dk) / dk), float("nan"), "difference_body"
        elif -1 < P.value <= -0.9:
            r = scaled_limit_samples(K, P, grid, q).radii
            dev = np.max(np.abs(r - pp) / pp)
            dev_v = np.max(np.abs(r - vol * pp) / (vol * pp))
            target = "polar_projection"
        else:
            raise InputError(f"--p-list: {P.value:g} is neither > 0 nor in (-1, -0.9]")
        if P.value in (200.0, -0.999) and dev > tol:
            failed = True
        rows.append([f"{P.value:g}", target, dev, dev_v])
    _emit(args, table_csv(["p", "target", "max_rel_deviation", "max_rel_deviation_volume_scaled"],
                          rows))
    return EXIT_FAIL if failed else EXIT_OK


def cmd_verify(args) -> int:
    from .verify.suite import run_suite

    reports = run_suite(load_json(args.suite), args.seed if args.seed_given else None, args.tol)
    _emit(args, dump_json([r.to_dict(timing=args.timing) for r in reports]))
    passed = sum(r.passed for r in reports)
    for r in reports:
        sys.stderr.write(r.line() + "\n")
    sys.stderr.write(f"verify: {passed}/{len(reports)} checks passed\n")
    return EXIT_OK if passed == len(reports) else EXIT_FAIL


def cmd_study(args) -> int:
    """Gauge values on the grid as the quadrature settings vary, against the finest setting."""
    if args.body:
        g = CovariogramFn(parse_body(load_json(args.body)))
    elif args.function:
        g = parse_function(load_json(args.function))
    else:
        raise InputError("study: needs --body or --function")
    p = _p(args.p)
    grid = _grid(g.dimension, args) if g.dimension > 1 else DirectionGrid.make(1, 2)
    settings = [(j, t) for j in (8, 16, 32, 48, 64) for t in (1e-6, 1e-9, 1e-12)]
    vals = {s: np.asarray(ball_gauge(g, p, grid.directions,
                                     QuadratureSpec(jacobi_nodes=s[0], legendre_tol=s[1])))
            for s in settings}
    ref = vals[settings[-1]]
    rows = [[j, f"{t:.0e}", float(np.max(np.abs(v - ref))), float(np.max(np.abs(v - ref) / ref)),
             float(v[0])] for (j, t), v in vals.items()]
    _emit(args, table_csv(["jacobi_nodes", "legendre_tol", "max_abs_diff", "max_rel_diff",
                           "gauge_first_direction"], rows))
    return EXIT_OK


COMMANDS = {"covariogram": cmd_covariogram, "ballbody": cmd_ballbody,
            "radialmean": cmd_radialmean, "limits": cmd_limits, "verify": cmd_verify,
            "study": cmd_study}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="radialbodies", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, grid=64):
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--grid", type=int, default=grid, help="number of directions")
        sp.add_argument("--tol", type=float, default=None, help="tolerance override")
        sp.add_argument("--out", default=None, help="output path (default: stdout)")
        return sp

    sp = common(sub.add_parser("covariogram", help="g_K on a lattice or along a ray"), grid=33)
    sp.add_argument("--body", required=True)
    sp.add_argument("--ray", default=None, help="comma-separated direction")
    sp = common(sub.add_parser("ballbody", help="radial samples of K_p(g)"))
    sp.add_argument("--function", required=True)
    sp.add_argument("--p", required=True)
    sp = common(sub.add_parser("radialmean", help="radial samples of R_p K"))
    sp.add_argument("--body", required=True)
    sp.add_argument("--p", required=True)
    sp.add_argument("--mc-samples", type=int, default=0)
    sp = common(sub.add_parser("limits", help="deviation from the limit bodies"))
    sp.add_argument("--body", required=True)
    sp.add_argument("--p-list", default=None)
    sp.add_argument("--tol-limit", type=float, default=0.01)
    sp = common(sub.add_parser("verify", help="run a verification suite"))
    sp.add_argument("--suite", required=True)
    sp.add_argument("--timing", action="store_true", help="include runtimes in the reports")
    sp = common(sub.add_parser("study", help="quadrature convergence table"), grid=16)
    sp.add_argument("--body")
    sp.add_argument("--function")
    sp.add_argument("--p", required=True)
    return ap


def _join_values(argv):
    """Allow "--p-list -0.999,200": argparse would read the value as an option."""
    out, it = [], iter(argv)
    for a in it:
        if a in ("--p", "--p-list", "--ray"):
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    ap = build_parser()
    argv = _join_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    args.seed_given = args.seed is not None
    if args.seed is None:
        args.seed = 0
    try:
        return COMMANDS[args.command](args)
    except InputError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    except QuadratureError as e:
        sys.stderr.write(f"quadrature failure: {e}\n")
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
