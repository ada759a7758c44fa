import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lightning_laplace.basis import FitSystem, assemble, make_basis, plan_samples
from lightning_laplace.demos import demo_problem
from lightning_laplace.errors import DataError, SolverError
from lightning_laplace.linsolve import _cond_from_r, condition_estimate, solve_ls


def test_identity():
    b = np.array([1.0, -2.0, 3.5])
    r = solve_ls(FitSystem.from_arrays(np.eye(3), b))
    assert np.array_equal(r.coefficients, b)
    assert r.sup_residual == 0.0
    assert condition_estimate(FitSystem.from_arrays(np.eye(3), b)) == pytest.approx(1.0)


def test_diagonal_condition():
    s = FitSystem.from_arrays(np.diag([1.0, 1e-8]), [1.0, 1.0])
    assert condition_estimate(s) == pytest.approx(1e8, rel=1e-12)


def test_consistent_overdetermined():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((40, 7))
    b = A @ rng.standard_normal(7)
    r = solve_ls(FitSystem.from_arrays(A, b))
    assert r.sup_residual <= 1e-12 * np.max(np.abs(b))


def test_duplicated_column():
    c = np.linspace(1, 2, 10)
    r = solve_ls(FitSystem.from_arrays(np.column_stack([c, c]), c))
    assert r.effective_rank == 1
    assert r.sup_residual <= 1e-14
    assert np.linalg.norm(r.coefficients) <= 2


def _mp_least_squares_residual(A, b):
    # normal equations in 50-digit arithmetic as an independent oracle
    with mp.workdps(50):
        Am = mp.matrix(A.tolist())
        bm = mp.matrix(b.tolist())
        x = mp.lu_solve(Am.T * Am, Am.T * bm)
        return float(mp.norm(Am * x - bm))


@pytest.mark.parametrize("seed", range(5))
def test_residual_optimality(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((30, 10))
    b = rng.standard_normal(30)
    r = solve_ls(FitSystem.from_arrays(A, b))
    assert np.linalg.norm(r.residuals) <= (1 + 1e-10) * _mp_least_squares_residual(A, b)


def test_non_finite_and_shape_errors():
    with pytest.raises(DataError):
        solve_ls(FitSystem.from_arrays(np.array([[1.0], [np.nan]]), [1.0, 2.0]))
    with pytest.raises(SolverError):
        solve_ls(FitSystem.from_arrays(np.ones((2, 3)), [1.0, 2.0]))


def test_iterative_condition_estimate_matches_svd():
    rng = np.random.default_rng(3)
    U, _ = np.linalg.qr(rng.standard_normal((300, 300)))
    V, _ = np.linalg.qr(rng.standard_normal((300, 300)))
    s = np.logspace(0, -9, 300)
    R = np.linalg.qr((U * s) @ V.T, mode="r")
    exact = _cond_from_r(R, exact_limit=1000)
    approx = _cond_from_r(R, exact_limit=10, steps=60)
    assert approx == pytest.approx(exact, rel=1e-2)


def test_truncation_safety_on_demo():
    domain, h = demo_problem("lshape")
    basis = make_basis(domain, 36)
    system = assemble(domain, basis, plan_samples(domain, basis), h)
    a = solve_ls(system, truncation=1e-14).sup_residual
    b = solve_ls(system, truncation=1e-12).sup_residual
    assert b <= 10 * a


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 8), st.integers(0, 10**6))
def test_residual_is_orthogonal_to_range(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((3 * n, n))
    b = rng.standard_normal(3 * n)
    r = solve_ls(FitSystem.from_arrays(A, b))
    assert np.max(np.abs(A.T @ r.residuals)) <= 1e-10 * np.linalg.norm(A) * np.linalg.norm(b)
