"""Rational-function solver for Laplace's equation on domains with corners."""

from .basis import Basis, make_basis, place_poles, plan_samples
from .boundarydata import BoundarySpec, Expression, eval_h, random_smooth
from .errors import (
    AssemblyError,
    BasisError,
    DataError,
    EvaluationError,
    GeometryError,
    LightningError,
    SolverError,
)
from .evaluator import eval_grad, eval_grid, eval_r, eval_u
from .geometry import Domain, build_domain, build_polygon, contains
from .linsolve import solve_ls
from .solver import ConvergenceReport, Solution, SolverConfig, solve

__all__ = [
    "AssemblyError",
    "Basis",
    "BasisError",
    "BoundarySpec",
    "ConvergenceReport",
    "DataError",
    "Domain",
    "EvaluationError",
    "Expression",
    "GeometryError",
    "LightningError",
    "Solution",
    "SolverConfig",
    "SolverError",
    "build_domain",
    "build_polygon",
    "contains",
    "eval_grad",
    "eval_grid",
    "eval_h",
    "eval_r",
    "eval_u",
    "make_basis",
    "place_poles",
    "plan_samples",
    "random_smooth",
    "solve",
    "solve_ls",
]
