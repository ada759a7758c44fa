"""Condition number versus accuracy as the basis grows.

The least-squares matrices become numerically singular long before the fit
stops improving; this script prints both side by side.
"""

import argparse

import numpy as np

from lightning_laplace.basis import assemble, make_basis, plan_samples
from lightning_laplace.demos import demo_problem
from lightning_laplace.linsolve import solve_ls


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--demo", default="lshape")
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--kmax", type=int, default=9)
    args = p.parse_args()
    d, h = demo_problem(args.demo, m=args.m, seed=args.seed)
    print(f"{'n':>4s} {'N':>6s} {'M':>6s} {'sup residual':>13s} {'cond':>10s} {'rank':>6s} {'|coef|':>10s}")
    for k in range(2, args.kmax + 1):
        basis = make_basis(d, k * k)
        plan = plan_samples(d, basis)
        fit = solve_ls(assemble(d, basis, plan, h))
        print(
            f"{k * k:4d} {basis.dof_count:6d} {len(plan):6d} {fit.sup_residual:13.3e} "
            f"{fit.condition_estimate:10.2e} {fit.effective_rank:6d} {np.linalg.norm(fit.scaled_coefficients):10.2e}"
        )


if __name__ == "__main__":
    main()
