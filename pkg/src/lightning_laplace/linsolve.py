"""Least-squares solve of the column-scaled fit system by pivoted QR."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .basis import FitSystem
from .errors import DataError, SolverError

TRUNCATION = 1e-14


@dataclass(frozen=True, eq=False)
class FitResult:
    scaled_coefficients: np.ndarray
    coefficients: np.ndarray  # multiply the unscaled basis columns
    residuals: np.ndarray  # unweighted: fit minus data at each sample
    sup_residual: float
    weighted_sup_residual: float
    condition_estimate: float
    effective_rank: int


def _check(system: FitSystem) -> None:
    if not (np.all(np.isfinite(system.matrix)) and np.all(np.isfinite(system.rhs))):
        raise DataError("fit system has non-finite entries")
    if np.any(system.column_scales == 0):
        raise SolverError(f"{int(np.sum(system.column_scales == 0))} zero columns in the fit matrix")
    M, N = system.matrix.shape
    if M < N:
        raise SolverError(f"underdetermined system ({M} rows, {N} columns)")


def solve_ls(system: FitSystem, truncation: float = TRUNCATION, estimate_condition: bool = True) -> FitResult:
    """Basic solution of min ||Ax - b|| with rank truncation at ``truncation * |R11|``."""
    _check(system)
    A, b = system.matrix, system.rhs
    N = A.shape[1]
    Q, R, perm = sla.qr(A, mode="economic", pivoting=True, check_finite=False)
    diag = np.abs(np.diag(R))
    small = np.flatnonzero(diag <= truncation * diag[0])
    rank = int(small[0]) if len(small) else N
    y = sla.solve_triangular(R[:rank, :rank], Q[:, :rank].T @ b, check_finite=False)
    xs = np.zeros(N)
    xs[perm[:rank]] = y
    # residuals come from an explicit product, not from the factorization
    w = system.samples.weights
    res = (A @ xs - b) / w
    sup = float(np.max(np.abs(res)))
    wsup = float(np.max(np.abs(res) * system.samples.corner_distance))
    cond = _cond_from_r(R) if estimate_condition else float("nan")
    return FitResult(xs, xs / system.column_scales, res, sup, wsup, cond, rank)


def _cond_from_r(R: np.ndarray, exact_limit: int = 1200, steps: int = 30) -> float:
    """sigma_max / sigma_min of R: exact for small R, else power and inverse iteration."""
    N = R.shape[1]
    if N <= exact_limit:
        s = sla.svdvals(R, check_finite=False)
        return float("inf") if s[-1] == 0 else float(s[0] / s[-1])
    if np.any(np.diag(R) == 0):
        return float("inf")
    rng = np.random.default_rng(0)
    x = rng.standard_normal(N)
    smax = 0.0
    for _ in range(steps):
        x /= np.linalg.norm(x)
        y = R @ x
        smax = np.linalg.norm(y)
        x = R.T @ y
    x = rng.standard_normal(N)
    inv = 0.0
    with np.errstate(all="ignore"):
        for _ in range(steps):
            x /= np.linalg.norm(x)
            y = sla.solve_triangular(R, x, check_finite=False)
            y = sla.solve_triangular(R, y, trans="T", check_finite=False)
            nrm = np.linalg.norm(y)
            if not np.isfinite(nrm):
                return float("inf")
            inv = np.sqrt(nrm)
            x = y
    return float(smax * inv)


def condition_estimate(system: FitSystem) -> float:
    """2-norm condition number of the scaled fit matrix."""
    _check(system)
    R = sla.qr(system.matrix, mode="r", check_finite=False)[0]
    return _cond_from_r(R[: system.matrix.shape[1]])
