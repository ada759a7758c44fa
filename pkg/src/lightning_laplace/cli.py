"""Command-line front end: ``lightning solve | demo | eval | theory``.

Exit codes: 0 success, 2 the solver (or a check) ran but did not meet its
target, 1 bad input or any other error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import math
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import theorylab as tl
from .demos import DEMO_NAMES, demo_data, demo_domain
from .errors import LightningError
from .evaluator import eval_grad, eval_grid, eval_points_safe
from .files import load_bc, load_domain, load_solution, read_points_csv, save_solution, write_rows_csv
from .solver import SolverConfig, ablation_shifted_poles, solve

EXIT_OK, EXIT_ERROR, EXIT_NOT_CONVERGED = 0, 1, 2


def _thread_limit():
    n = os.environ.get("LIGHTNING_THREADS")
    if not n:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=int(n))


def _config(args) -> SolverConfig:
    return SolverConfig(
        tolerance=args.tol,
        sigma=args.sigma,
        max_dofs=args.max_dofs,
        weighted_norm=args.weighted,
    )


def _summary(sol) -> str:
    status = "converged" if sol.converged else "NOT converged"
    return (
        f"{status}: n={sol.n} N={sol.N} M={sol.M} boundary_error={sol.boundary_error:.3e} "
        f"fine_mesh_error={sol.fine_mesh_error:.3e} seconds={sol.metadata['solve_seconds']:.3f}"
    )


def cmd_solve(args) -> int:
    domain = load_domain(args.domain)
    h = load_bc(args.bc, domain)
    sol, report = solve(domain, h, _config(args))
    if args.report:
        report.write_csv(args.report)
    if args.out:
        save_solution(sol, args.out, domain)
    print(_summary(sol))
    return EXIT_OK if sol.converged else EXIT_NOT_CONVERGED


def cmd_demo(args) -> int:
    if args.name not in DEMO_NAMES:
        raise ValueError(f"unknown demo {args.name!r}; choose from {', '.join(DEMO_NAMES)}")
    domain = demo_domain(args.name, args.m, args.seed)
    h = demo_data(domain, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "domain.json").write_text(json.dumps(domain.to_json(), indent=1), encoding="utf-8")
    bc = {"arcs": [{"randnfun": _randn_params(f)} for f in h.arcs]}
    (out / "bc.json").write_text(json.dumps(bc, indent=1), encoding="utf-8")
    config = _config(args)
    sol, report = solve(domain, h, config)
    report.write_csv(out / "convergence.csv")
    save_solution(sol, out / "solution.json", domain)
    print(f"{args.name}: {len(domain.corners)} corners; {_summary(sol)}")
    if args.ablate_shift is not None:
        # same n range as the main run, so the two reports line up row by row
        sched = tuple(n for n in config.n_schedule if n <= sol.n)
        shifted = ablation_shifted_poles(
            domain, h, replace(config, stop_on_growth=False, n_schedule=sched), args.ablate_shift
        )
        shifted.write_csv(out / "ablation.csv")
        print(f"ablation (poles shifted {args.ablate_shift} x diameter): final error {shifted.rows[-1].boundary_error:.3e}")
    return EXIT_OK if sol.converged else EXIT_NOT_CONVERGED


def _randn_params(expr) -> dict:
    # demo data are Expression("randnfun(seed, wavelength)")
    inner = expr.source[expr.source.index("(") + 1 : -1]
    seed, wl = (s.strip() for s in inner.split(","))
    return {"seed": int(seed), "wavelength": float(wl)}


def cmd_eval(args) -> int:
    sol, domain = load_solution(args.solution)
    if (args.points is None) == (args.grid is None):
        raise ValueError("give exactly one of --points or --grid")
    if args.points is not None:
        z = read_points_csv(args.points)
        if len(z) == 0:
            raise ValueError(f"{args.points}: no points")
        inside = np.ones(len(z), dtype=bool)
    else:
        if domain is None:
            raise ValueError("--grid needs a solution file that includes its domain")
        nx, ny = (int(v) for v in args.grid.split(","))
        g = eval_grid(sol, domain, nx, ny)
        X, Y = np.meshgrid(g.x, g.y)
        z = (X + 1j * Y).ravel()
        inside = np.isfinite(g.values).ravel()
    t0 = time.perf_counter()
    r = np.full(len(z), np.nan + 0j)
    ok = np.zeros(len(z), dtype=bool)
    r[inside], ok[inside] = eval_points_safe(sol, z[inside])
    grad = np.full(len(z), complex(np.nan, np.nan))
    if args.grad and ok.any():
        grad[ok] = eval_grad(sol, z[ok], check=False)
    seconds = time.perf_counter() - t0
    header = ["x", "y", "u"] + (["ux", "uy"] if args.grad else [])
    rows = []
    for k in range(len(z)):
        row = [z[k].real, z[k].imag, r[k].real]
        if args.grad:
            row += [grad[k].real, grad[k].imag]
        rows.append(row)
    write_rows_csv(args.out, header, rows)
    n_ok = int(ok.sum())
    rate = n_ok / seconds if seconds > 0 else math.inf
    print(f"evaluated {n_ok} points in {seconds:.4f} s ({rate:.3g} points/s)")
    failed = int(inside.sum()) - n_ok
    if failed:
        print(f"{failed} points too close to a pole (u = nan)", file=sys.stderr)
    return EXIT_ERROR if inside.any() and n_ok == 0 else EXIT_OK


def cmd_theory(args) -> int:
    if args.study == "wedge":
        problem = tl.WedgeProblem(theta=args.theta, rho=args.rho, sigma=args.sigma, delta=args.delta, log=args.log)
        if args.nmax < 4:
            raise ValueError("--nmax must be at least 4")
        ns = [k * k for k in range(2, math.isqrt(args.nmax) + 1)]
        table = tl.wedge_convergence_study(problem, ns)
        write_rows_csv(args.out or "wedge.csv", ["n", "sup_error"], table)
        for n, e in table:
            print(f"n={n:4d}  sup_error={e:.3e}")
        slope, r2 = tl.root_exponential_fit(*zip(*table))
        print(f"log10(error) vs sqrt(n): slope {slope:.4f}, R^2 {r2:.4f}")
        return EXIT_OK
    nps = tl.newman_set(args.n, args.sigma)
    if args.study == "levels":
        x, y, L = tl.level_grid(nps, nx=args.nx, ny=args.nx)
        X, Y = np.meshgrid(x, y)
        write_rows_csv(args.out or "levels.csv", ["x", "y", "log10_abs_phi"], zip(X.ravel(), Y.ravel(), L.ravel()))
        print(f"wrote {L.size} grid values for n={args.n}, sigma={args.sigma}")
        return EXIT_OK
    # energy
    value = tl.energy(nps.nodes, nps.poles)
    change, predicted = tl.energy_perturbation_check(nps, j=min(1, args.n - 1), step=1e-3)
    ok = abs(change - predicted) <= 1e-4
    print(f"energy={value:.12g}")
    print(f"perturbation +1e-3: change {change:.6e}, predicted {predicted:.6e} -> {'pass' if ok else 'FAIL'}")
    return EXIT_OK if ok and math.isfinite(value) else EXIT_NOT_CONVERGED


def _add_solver_flags(p):
    p.add_argument("--tol", type=float, default=1e-6, help="boundary error tolerance")
    p.add_argument("--sigma", type=float, default=4.0, help="pole clustering parameter")
    p.add_argument("--max-dofs", type=int, default=4000, help="cap on real degrees of freedom N")
    p.add_argument("--weighted", action="store_true", help="use the corner-distance weighted norm")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lightning", description="Rational Laplace solver for corner domains")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a Dirichlet problem from JSON files")
    p.add_argument("--domain", required=True)
    p.add_argument("--bc", required=True)
    _add_solver_flags(p)
    p.add_argument("--out", help="solution JSON")
    p.add_argument("--report", help="convergence CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("demo", help="run a built-in demo problem")
    p.add_argument("name", help="|".join(DEMO_NAMES))
    p.add_argument("--m", type=int, default=6, help="sides of the random polygon")
    p.add_argument("--seed", type=int, default=0)
    _add_solver_flags(p)
    p.add_argument("--ablate-shift", type=float, default=None, help="also run with poles shifted by this x diameter")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("eval", help="evaluate a saved solution")
    p.add_argument("--solution", required=True)
    p.add_argument("--points", help="CSV of x,y")
    p.add_argument("--grid", help="nx,ny over the domain's bounding box")
    p.add_argument("--grad", action="store_true")
    p.add_argument("--out", default="eval.csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("theory", help="wedge interpolation studies")
    p.add_argument("study", choices=["wedge", "levels", "energy"])
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--log", action="store_true", help="use z^delta log z")
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--nmax", type=int, default=100)
    p.add_argument("--nx", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_theory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        with _thread_limit():
            return args.func(args)
    except (LightningError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
