"""Interpolation of z^delta (optionally times log z) in a wedge with exponentially clustered poles.

Prints the sup error for n = 4, 9, ..., and the straight-line fit of
log10(error) against sqrt(n) for each clustering parameter.
"""

import argparse
import math

from lightning_laplace import theorylab as tl


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--log", action="store_true")
    p.add_argument("--theta", type=float, default=math.pi / 4)
    p.add_argument("--sigmas", type=float, nargs="*", default=[0.5, 1.0, 2.0, 4.0])
    p.add_argument("--nmax", type=int, default=100)
    args = p.parse_args()
    ns = [k * k for k in range(2, math.isqrt(args.nmax) + 1)]
    tables = {}
    for s in args.sigmas:
        prob = tl.WedgeProblem(theta=args.theta, sigma=s, delta=args.delta, log=args.log)
        tables[s] = [e for _, e in tl.wedge_convergence_study(prob, ns)]
    print("n     " + "".join(f"sigma={s:<9g}" for s in args.sigmas))
    for i, n in enumerate(ns):
        print(f"{n:<5d} " + "".join(f"{tables[s][i]:<15.3e}" for s in args.sigmas))
    for s in args.sigmas:
        slope, r2 = tl.root_exponential_fit(ns, tables[s])
        print(f"sigma={s:g}: slope {slope:.3f} per unit sqrt(n), R^2 {r2:.3f}")


if __name__ == "__main__":
    main()
