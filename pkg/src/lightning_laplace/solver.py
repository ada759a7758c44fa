"""Adaptive driver: grow the basis until the boundary residual meets the tolerance."""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .basis import Basis, assemble, make_basis, plan_samples
from .boundarydata import BoundarySpec
from .errors import SolverError
from .evaluator import eval_r
from .geometry import Domain
from .linsolve import solve_ls

log = logging.getLogger(__name__)


def default_schedule(kmax: int = 200) -> list[int]:
    """n = k^2, k = 2, 3, ... so that sqrt(n) is evenly spaced."""
    return [k * k for k in range(2, kmax)]


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-6
    sigma: float = 4.0
    reentrant_multiplier: int = 3
    n_schedule: tuple[int, ...] = tuple(default_schedule())
    max_dofs: int = 4000
    sample_ratio: float = 3.0
    refinement_factor: int = 2
    weighted_norm: bool = False
    auto_weight: bool = True  # switch to the weighted norm when data jump at corners
    poly_degree: int | None = None  # None means ceil(n/2)
    pole_shift: float = 0.0  # fraction of the diameter; only for ablations
    clustering: str = "sqrt"
    stop_on_growth: bool = True
    growth_factor: float = 1.2
    truncation: float = 1e-14
    estimate_condition: bool = True

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        sched = list(self.n_schedule)
        if not sched or any(b <= a for a, b in zip(sched, sched[1:])):
            raise ValueError("n_schedule must be nonempty and strictly increasing")
        if self.refinement_factor < 2:
            raise ValueError("refinement_factor must be at least 2")


@dataclass(frozen=True, eq=False)
class Solution:
    basis: Basis
    a: np.ndarray  # complex residues, one per pole
    b: np.ndarray  # complex monomial coefficients, b[0] real
    diameter: float
    boundary_error: float
    fine_mesh_error: float = float("nan")
    converged: bool = False
    weighted: bool = False
    tolerance: float = float("nan")
    n: int = 0
    M: int = 0
    metadata: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return self.basis.dof_count

    def __call__(self, z):
        return eval_r(self, z)

    def u(self, z):
        return np.real(eval_r(self, z))


@dataclass(frozen=True)
class ReportRow:
    n: int
    N: int
    M: int
    boundary_error: float
    fine_mesh_error: float | None
    condition_estimate: float
    seconds: float


@dataclass
class ConvergenceReport:
    rows: list[ReportRow] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def write_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "N", "M", "err_sup", "err_fine", "cond_est", "seconds"])
            for r in self.rows:
                fine = "" if r.fine_mesh_error is None else repr(r.fine_mesh_error)
                w.writerow([r.n, r.N, r.M, repr(r.boundary_error), fine, repr(r.condition_estimate), f"{r.seconds:.6f}"])


def coefficients_from_vector(basis: Basis, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Complex (a, b) from the real coefficient vector; u = Re(sum a/(z-z_j) + sum b (z-z*)^p)."""
    N1, N2 = basis.n_poles, basis.poly_degree
    a = x[0 : 2 * N1 : 2] - 1j * x[1 : 2 * N1 : 2]
    b = x[2 * N1 : 2 * N1 + N2 + 1].astype(complex)
    b[1:] -= 1j * x[2 * N1 + N2 + 1 :]
    return a, b


def needs_weighting(h: BoundarySpec) -> bool:
    return bool(np.any(h.corner_jumps() > 1e-8 * h.scale()))


def weighted_error(residuals, domain: Domain) -> float:
    """max |value| * (distance to the nearest corner) / diameter over (point, value) pairs."""
    pts = np.array([p for p, _ in residuals], dtype=complex)
    vals = np.array([v for _, v in residuals], dtype=float)
    if len(pts) == 0:
        return 0.0
    d = np.min(np.abs(pts[:, None] - domain.vertices[None, :]), axis=1) / domain.diameter
    return float(np.max(np.abs(vals) * d))


def _norm(solution_weighted: bool, residuals, corner_distance) -> float:
    if solution_weighted:
        return float(np.max(np.abs(residuals) * corner_distance))
    return float(np.max(np.abs(residuals)))


def validate(solution: Solution, domain: Domain, h: BoundarySpec, refinement_factor: int = 2) -> float:
    """Residual norm on a boundary mesh ``refinement_factor`` times finer than the fit grid."""
    plan = plan_samples(
        domain,
        solution.basis,
        solution.metadata.get("sample_ratio", 3.0),
        refinement=refinement_factor,
        include_corners=not solution.weighted,
    )
    u = eval_r(solution, plan.points).real
    res = u - h.evaluate(plan.arc_index, plan.t)
    return _norm(solution.weighted, res, plan.corner_distance)


def solve(domain: Domain, h: BoundarySpec, config: SolverConfig | None = None):
    """Run the adaptive loop; returns ``(Solution, ConvergenceReport)``.

    Non-convergence (tolerance not met before the size cap, or a growing error)
    is reported through ``Solution.converged``; it is not an exception.
    """
    config = config or SolverConfig()
    weighted = config.weighted_norm or (config.auto_weight and needs_weighting(h))
    report = ConvergenceReport()
    best = None
    best_err = math.inf
    rises = 0
    converged = False
    t_start = time.perf_counter()
    for n in config.n_schedule:
        t0 = time.perf_counter()
        basis = make_basis(
            domain, n, config.sigma, config.reentrant_multiplier, config.poly_degree, config.pole_shift, config.clustering
        )
        if basis.dof_count > config.max_dofs:
            if not report.rows:
                raise SolverError(f"max_dofs={config.max_dofs} is below the smallest basis (N={basis.dof_count})")
            log.info("stopping: N=%d exceeds max_dofs", basis.dof_count)
            break
        plan = plan_samples(domain, basis, config.sample_ratio, include_corners=not weighted, corner_weights=weighted)
        system = assemble(domain, basis, plan, h)
        fit = solve_ls(system, config.truncation, config.estimate_condition)
        err = fit.weighted_sup_residual if weighted else fit.sup_residual
        seconds = time.perf_counter() - t0
        report.rows.append(ReportRow(n, basis.dof_count, len(plan), err, None, fit.condition_estimate, seconds))
        log.info("n=%d N=%d M=%d err=%.3e", n, basis.dof_count, len(plan), err)
        if err < best_err or best is None:
            best = (n, basis, plan, fit, err)
        if err < config.tolerance:
            converged = True
            best = (n, basis, plan, fit, err)
            break
        if err > config.growth_factor * best_err:
            rises += 1
        else:
            rises = 0
        best_err = min(best_err, err)
        if config.stop_on_growth and rises >= 2:
            log.info("stopping: error growing")
            break

    n, basis, plan, fit, err = best
    a, b = coefficients_from_vector(basis, fit.coefficients)
    sol = Solution(
        basis,
        a,
        b,
        domain.diameter,
        err,
        converged=converged,
        weighted=weighted,
        tolerance=config.tolerance,
        n=n,
        M=len(plan),
        metadata={
            "sample_ratio": config.sample_ratio,
            "solve_seconds": time.perf_counter() - t_start,
            "condition_estimate": fit.condition_estimate,
            "effective_rank": fit.effective_rank,
            "coefficient_norm": float(np.linalg.norm(fit.coefficients)),
        },
    )
    fine = validate(sol, domain, h, config.refinement_factor)
    sol = replace(sol, fine_mesh_error=fine)
    sol.metadata["seconds_per_point"] = _time_per_point(sol, plan.points)
    last = report.rows[-1]
    report.rows[-1] = replace(last, fine_mesh_error=fine if last.n == n else None)
    return sol, report


def _time_per_point(sol: Solution, pts: np.ndarray, count: int = 1000) -> float:
    z = np.resize(pts, count) * (1 - 1e-3) + 1e-3 * sol.basis.expansion_point
    t0 = time.perf_counter()
    eval_r(sol, z, check=False)
    return (time.perf_counter() - t0) / count


def ablation_shifted_poles(domain: Domain, h: BoundarySpec, config: SolverConfig, shift: float):
    """Same pipeline with every pole pushed ``shift * diameter`` further out."""
    if shift < 0:
        raise ValueError("shift must be nonnegative")
    return solve(domain, h, replace(config, pole_shift=shift))[1]
