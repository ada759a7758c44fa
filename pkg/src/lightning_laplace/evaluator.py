"""Fast evaluation of a computed rational function r, of u = Re r, and of grad u."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError
from .geometry import Domain, contains

POLE_GUARD = 1e-14
_CHUNK = 2048


def _prepare(solution, z):
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    poles = solution.basis.poles
    return z.shape, flat, poles


def _pole_mask(solution, flat, poles) -> np.ndarray:
    """True where a point sits within the guard distance of some pole."""
    bad = np.zeros(flat.shape, dtype=bool)
    if len(poles) == 0:
        return bad
    tol = POLE_GUARD * solution.diameter
    for s in range(0, len(flat), _CHUNK):
        d = np.abs(flat[s : s + _CHUNK, None] - poles[None, :])
        bad[s : s + _CHUNK] = np.min(d, axis=1) <= tol
    return bad


def _r(solution, flat, poles, deriv=False):
    a, b = solution.a, solution.b
    w = flat - solution.basis.expansion_point
    out = np.zeros(flat.shape, dtype=complex)
    if len(poles):
        for s in range(0, len(flat), _CHUNK):
            d = flat[s : s + _CHUNK, None] - poles[None, :]
            terms = -a / d**2 if deriv else a / d
            out[s : s + _CHUNK] = np.sum(terms, axis=1)
    # Horner for the polynomial part
    if deriv:
        c = b[1:] * np.arange(1, len(b))
    else:
        c = b
    p = np.zeros(flat.shape, dtype=complex)
    for coef in c[::-1]:
        p = p * w + coef
    return out + p


def eval_r(solution, z, check: bool = True):
    """r(z) = sum a_j/(z - z_j) + sum b_p (z - z*)^p at a point or array of points."""
    shape, flat, poles = _prepare(solution, z)
    if check and np.any(_pole_mask(solution, flat, poles)):
        raise EvaluationError("evaluation point too close to a pole")
    out = _r(solution, flat, poles).reshape(shape)
    return complex(out) if out.ndim == 0 else out


def eval_u(solution, z, check: bool = True):
    r = eval_r(solution, z, check)
    return r.real if isinstance(r, np.ndarray) else float(r.real)


def eval_deriv(solution, z, check: bool = True):
    """r'(z), the termwise derivative."""
    shape, flat, poles = _prepare(solution, z)
    if check and np.any(_pole_mask(solution, flat, poles)):
        raise EvaluationError("evaluation point too close to a pole")
    out = _r(solution, flat, poles, deriv=True).reshape(shape)
    return complex(out) if out.ndim == 0 else out


def eval_grad(solution, z, check: bool = True):
    """grad u packed as ux + i uy; equals conj(r'(z)) since u = Re r."""
    return np.conj(eval_deriv(solution, z, check))


def eval_points_safe(solution, z):
    """(r, ok) with r = nan where a point is too close to a pole instead of raising."""
    shape, flat, poles = _prepare(solution, z)
    bad = _pole_mask(solution, flat, poles)
    out = np.full(flat.shape, np.nan + 0j)
    ok = ~bad
    if np.any(ok):
        out[ok] = _r(solution, flat[ok], poles)
    return out.reshape(shape), ok.reshape(shape)


@dataclass(frozen=True, eq=False)
class EvaluationGrid:
    x: np.ndarray
    y: np.ndarray
    mask: np.ndarray  # True at interior nodes
    values: np.ndarray  # u at interior nodes, nan elsewhere
    seconds: float

    @property
    def throughput(self) -> float:
        n = int(self.mask.sum())
        return n / self.seconds if self.seconds > 0 else float("inf")

    def rows(self):
        """(x, y, u) triples of the interior nodes, row-major."""
        X, Y = np.meshgrid(self.x, self.y)
        m = self.mask
        return np.column_stack([X[m], Y[m], self.values[m]])


def eval_grid(solution, domain: Domain, nx: int, ny: int, bbox=None) -> EvaluationGrid:
    if nx < 2 or ny < 2:
        raise ValueError("grid resolution must be at least 2 x 2")
    if bbox is None:
        p = domain._polyline
        bbox = (p.real.min(), p.real.max(), p.imag.min(), p.imag.max())
    x = np.linspace(bbox[0], bbox[1], nx)
    y = np.linspace(bbox[2], bbox[3], ny)
    Z = x[None, :] + 1j * y[:, None]
    mask = contains(domain, Z)
    vals = np.full(Z.shape, np.nan)
    t0 = time.perf_counter()
    r, ok = eval_points_safe(solution, Z[mask])
    seconds = time.perf_counter() - t0
    vals[mask] = r.real
    mask = mask.copy()
    mask[mask] = ok
    return EvaluationGrid(x, y, mask, vals, seconds)
