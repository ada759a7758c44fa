"""Tapered sqrt-spaced pole clustering against the plain geometric spacing, on the L-shape."""

from lightning_laplace.demos import demo_problem
from lightning_laplace.solver import SolverConfig, solve


def main():
    d, h = demo_problem("lshape")
    for clustering in ("sqrt", "legacy"):
        sol, rep = solve(d, h, SolverConfig(tolerance=1e-10, clustering=clustering))
        print(f"{clustering:7s} converged={sol.converged} N={sol.N} error={sol.boundary_error:.2e}")
        for r in rep.rows:
            print(f"    n={r.n:4d} N={r.N:5d} err={r.boundary_error:.2e}")


if __name__ == "__main__":
    main()
