"""Convergence tables for the built-in demo domains.

    python3 scripts/convergence_demos.py --tol 1e-8 --out results/convergence
"""

import argparse
import time
from pathlib import Path

import numpy as np

from lightning_laplace.demos import DEMO_NAMES, demo_problem
from lightning_laplace.solver import SolverConfig, solve


def run(name, tol, max_dofs, out):
    d, h = demo_problem(name, m=10, seed=1)
    t0 = time.perf_counter()
    sol, rep = solve(d, h, SolverConfig(tolerance=tol, max_dofs=max_dofs))
    wall = time.perf_counter() - t0
    rep.write_csv(out / f"{name}.csv")
    N, err = rep.column("N"), rep.column("boundary_error")
    slope = np.polyfit(np.sqrt(N), np.log10(err), 1)[0] if len(N) > 2 else float("nan")
    flag = "yes" if sol.converged else "no"
    print(f"{name:12s} {flag:>4s} {sol.N:6d} {sol.boundary_error:10.2e} {sol.fine_mesh_error:10.2e} {slope:8.3f} {wall:7.2f}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-dofs", type=int, default=3000)
    p.add_argument("--demos", nargs="*", default=[n for n in DEMO_NAMES if n != "snowflake"])
    p.add_argument("--out", default="results/convergence")
    args = p.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(f"{'demo':12s} {'conv':>4s} {'N':>6s} {'err':>10s} {'fine':>10s} {'slope':>8s} {'sec':>7s}")
    for name in args.demos:
        run(name, args.tol, args.max_dofs, out)


if __name__ == "__main__":
    main()
