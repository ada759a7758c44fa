"""Newman-type node/pole configurations on a wedge and the rational interpolants they define.

Independent of the least-squares solver: these objects let one check numerically
that exponentially clustered poles give root-exponential approximation of a
corner singularity such as z^(1/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import EvaluationError


@dataclass(frozen=True, eq=False)
class NodePoleSet:
    nodes: np.ndarray  # interpolation points alpha_j
    poles: np.ndarray  # beta_j

    def __len__(self):
        return len(self.poles)


def newman_set(n: int, sigma: float) -> NodePoleSet:
    """Poles -exp(-sigma j / sqrt n), j = 0..n-1; nodes 0 and the mirror images of the other poles."""
    if n < 1 or not sigma > 0:
        raise ValueError("need n >= 1 and sigma > 0")
    j = np.arange(n)
    poles = -np.exp(-sigma * j / math.sqrt(n))
    nodes = -poles.copy()
    nodes[0] = 0.0
    return NodePoleSet(nodes.astype(complex), poles.astype(complex))


def _ratio_product(z, nps: NodePoleSet):
    """prod (z - alpha_j) / (z - beta_j) as (mantissa, base-2 exponent), renormalized each step."""
    z = np.atleast_1d(z)
    mant = np.ones(z.shape, dtype=complex)
    expo = np.zeros(z.shape)
    for a, b in zip(nps.nodes, nps.poles):
        mant = mant * ((z - a) / (z - b))
        m, e = np.frexp(np.abs(mant))
        nz = m > 0
        mant[nz] = mant[nz] / 2.0 ** e[nz]
        expo = expo + np.where(nz, e, 0)
    return mant, expo


def phi(z, nps: NodePoleSet):
    """prod (z - alpha_j) / (z - beta_j), multiplied ratio by ratio with exponent tracking."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.isin(z, nps.poles)):
        raise EvaluationError("phi evaluated at a pole")
    mant, expo = _ratio_product(z, nps)
    with np.errstate(over="ignore", under="ignore"):
        out = (mant * 2.0**expo).reshape(z.shape)
    return complex(out) if out.ndim == 0 else out


def log_abs_phi(z, nps: NodePoleSet):
    """log|phi| from the ratio product (kept separate from :func:`potential`)."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.isin(z, nps.poles)):
        raise EvaluationError("phi evaluated at a pole")
    mant, expo = _ratio_product(z, nps)
    with np.errstate(divide="ignore"):
        out = (np.log(np.abs(mant)) + expo * math.log(2.0)).reshape(z.shape)
    return float(out) if out.ndim == 0 else out


def potential(z, nps: NodePoleSet):
    """sum log|z - alpha_j| - sum log|z - beta_j|; -inf at nodes, +inf at poles."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(divide="ignore", invalid="ignore"):
        la = np.sum(np.log(np.abs(z[..., None] - nps.nodes)), axis=-1)
        lb = np.sum(np.log(np.abs(z[..., None] - nps.poles)), axis=-1)
        out = la - lb
    out = np.where(np.isneginf(lb), np.inf, out)
    return float(out) if out.ndim == 0 else out


def energy(nodes, poles) -> float:
    """sum_j sum_k log|alpha_j - beta_k| - sum_{j<k} log|alpha_j - alpha_k|; -inf on coincidence."""
    a = np.asarray(nodes, dtype=complex)
    b = np.asarray(poles, dtype=complex)
    dab = np.abs(a[:, None] - b[None, :])
    iu = np.triu_indices(len(a), k=1)
    daa = np.abs(a[:, None] - a[None, :])[iu]
    if np.any(dab == 0) or np.any(daa == 0):
        return -math.inf
    return float(np.sum(np.log(dab)) - np.sum(np.log(daa)))


def energy_gradient(nodes, poles) -> np.ndarray:
    """Gradient of :func:`energy` in each node, packed as d/dx + i d/dy."""
    a = np.asarray(nodes, dtype=complex)
    b = np.asarray(poles, dtype=complex)
    g = np.sum(1.0 / np.conj(a[:, None] - b[None, :]), axis=1)
    d = a[:, None] - a[None, :]
    np.fill_diagonal(d, np.inf)
    g -= np.sum(1.0 / np.conj(d), axis=1)
    return g


# ---------------------------------------------------------------------------
# double-double helpers (value = hi + lo); enough for the cancelling sums below

_SPLIT = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_add(xh, xl, yh, yl):
    s, e = _two_sum(xh, yh)
    e = e + xl + yl
    return _two_sum(s, e)


def _dd_mul(xh, xl, yh, yl):
    p, e = _two_prod(xh, yh)
    e = e + (xh * yl + xl * yh)
    return _two_sum(p, e)


def _dd_div(xh, xl, yh, yl):
    q1 = xh / yh
    ph, pl = _dd_mul(q1, 0.0, yh, yl)
    rh, rl = _dd_add(xh, xl, -ph, -pl)
    q2 = rh / yh
    ph, pl = _dd_mul(q2, 0.0, yh, yl)
    rh, _ = _dd_add(rh, rl, -ph, -pl)
    q3 = rh / yh
    qh, ql = _two_sum(q1, q2)
    return _dd_add(qh, ql, q3, 0.0)


def _to_dd(values):
    hi = np.array([float(v) for v in values])
    lo = np.array([float(v - mp.mpf(h)) for v, h in zip(values, hi)])
    return hi, lo


def _mp_value(f, x):
    """f at a real node in extended precision when f allows it, else in double."""
    try:
        v = f(x)
        return mp.mpmathify(v)
    except Exception:
        return mp.mpmathify(complex(np.asarray(f(np.array([float(x)], dtype=complex)))[0]))


class RationalInterpolant:
    """Type (n-1, n) rational function with the given simple poles interpolating f at the nodes.

    Written as r(z) = phi(z) S(z) with S(z) = sum_j f(alpha_j) w_j / (z - alpha_j) and
    w_j = 1 / phi'(alpha_j).  For clustered nodes the terms of S are enormous and
    cancel, so the weights come from mpmath and S is summed in double-double.
    Nodes and poles must be real (the wedge configurations are).
    """

    def __init__(self, f, nps: NodePoleSet, dps: int | None = None):
        a, b = nps.nodes, nps.poles
        if len(np.unique(a)) != len(a):
            raise ValueError("interpolation nodes must be distinct")
        if np.any(a.imag != 0) or np.any(b.imag != 0):
            raise ValueError("nodes and poles must be real")
        n = len(a)
        self.nodes, self.poles = a, b
        self.dps = dps or 50 + n // 4
        with mp.workdps(self.dps):
            am = [mp.mpf(float(x)) for x in a.real]
            bm = [mp.mpf(float(x)) for x in b.real]
            fv = [_mp_value(f, x) for x in am]
            if not all(mp.isfinite(v) for v in fv):
                raise ValueError("f must be finite at the nodes")
            C = []
            for j in range(n):
                num = mp.fprod([am[j] - bk for bk in bm])
                den = mp.fprod([am[j] - am[k] for k in range(n) if k != j])
                C.append(fv[j] * num / den)
            self._cre = _to_dd([mp.re(c) for c in C])
            self._cim = _to_dd([mp.im(c) for c in C])
            self.values = np.array([complex(v) for v in fv])

    def _sum(self, z):
        """S(z) in double-double, returned rounded to complex double."""
        x, y = z.real, z.imag
        sr = (np.zeros_like(x), np.zeros_like(x))
        si = (np.zeros_like(x), np.zeros_like(x))
        y2 = _two_prod(y, y)
        for j, alpha in enumerate(self.nodes.real):
            dh, dl = _two_sum(x, -alpha)  # x - alpha_j exactly
            den = _dd_add(*_dd_mul(dh, dl, dh, dl), *y2)
            # C / (d + i y) = C (d - i y) / den, C = cre + i cim
            cr = (self._cre[0][j], self._cre[1][j])
            ci = (self._cim[0][j], self._cim[1][j])
            re_num = _dd_add(*_dd_mul(*cr, dh, dl), *_dd_mul(*ci, y, 0.0))
            im_num = _dd_add(*_dd_mul(*ci, dh, dl), *_dd_mul(-cr[0], -cr[1], y, 0.0))
            sr = _dd_add(*sr, *_dd_div(*re_num, *den))
            si = _dd_add(*si, *_dd_div(*im_num, *den))
        return (sr[0] + sr[1]) + 1j * (si[0] + si[1])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        out = np.empty(flat.shape, dtype=complex)
        hit = flat[:, None] == self.nodes[None, :]
        on_node = hit.any(axis=1)
        rest = ~on_node
        with np.errstate(all="ignore"):
            out[rest] = phi(flat[rest], NodePoleSet(self.nodes, self.poles)) * self._sum(flat[rest])
        out[on_node] = self.values[np.argmax(hit[on_node], axis=1)]
        out = out.reshape(z.shape)
        return complex(out) if out.ndim == 0 else out


def hermite_interpolant(f, nps: NodePoleSet, dps: int | None = None) -> RationalInterpolant:
    return RationalInterpolant(f, nps, dps)


# ---------------------------------------------------------------------------
# wedge studies


class PowerFunction:
    """z^delta (or z^delta log z), principal branch, with value 0 at z = 0.

    Accepts numpy arrays or mpmath scalars.
    """

    def __init__(self, delta: float, log: bool = False):
        self.delta, self.log = float(delta), bool(log)

    def __call__(self, z):
        if isinstance(z, (mp.mpf, mp.mpc)):
            if z == 0:
                return mp.mpf(0)
            lz = mp.log(z)
            return mp.exp(self.delta * lz) * (lz if self.log else 1)
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        nz = z != 0
        lz = np.log(z[nz])
        out[nz] = np.exp(self.delta * lz) * (lz if self.log else 1.0)
        return out

    def __repr__(self):
        return f"z^{self.delta}" + (" log z" if self.log else "")


def power_function(delta: float, log: bool = False) -> PowerFunction:
    return PowerFunction(delta, log)


@dataclass(frozen=True)
class WedgeProblem:
    theta: float = math.pi / 4  # half-angle, in (0, pi/2)
    rho: float = 0.5
    sigma: float = 1.0
    delta: float = 0.5
    log: bool = False

    def __post_init__(self):
        if not 0 < self.theta < math.pi / 2:
            raise ValueError("theta must lie in (0, pi/2)")
        if not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")
        if not (self.sigma > 0 and self.delta > 0):
            raise ValueError("sigma and delta must be positive")

    @property
    def f(self):
        return power_function(self.delta, self.log)


def wedge_grid(theta: float, rho: float, n_radii: int = 100, n_angles: int = 100, rmin: float = 1e-12) -> np.ndarray:
    """Polar grid on rho*A_theta with geometrically spaced radii (errors live near the tip)."""
    r = rho * np.logspace(math.log10(rmin), 0.0, n_radii)
    t = np.linspace(-theta, theta, n_angles)
    return (r[:, None] * np.exp(1j * t[None, :])).ravel()


def wedge_error(problem: WedgeProblem, n: int, grid: np.ndarray | None = None) -> float:
    if grid is None:
        grid = wedge_grid(problem.theta, problem.rho)
    r = hermite_interpolant(problem.f, newman_set(n, problem.sigma))
    return float(np.max(np.abs(r(grid) - problem.f(grid))))


def wedge_convergence_study(problem: WedgeProblem, n_list) -> list[tuple[int, float]]:
    grid = wedge_grid(problem.theta, problem.rho)
    return [(int(n), wedge_error(problem, int(n), grid)) for n in n_list]


def root_exponential_fit(ns, errors) -> tuple[float, float]:
    """(slope, R^2) of log10(error) against sqrt(n)."""
    x = np.sqrt(np.asarray(ns, dtype=float))
    y = np.log10(np.asarray(errors, dtype=float))
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    ss_res = float(np.sum((A @ coef - y) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return float(coef[0]), (1.0 - ss_res / ss_tot) if ss_tot > 0 else 1.0


def level_grid(nps: NodePoleSet, bbox=(-1.0, 1.0, -1.0, 1.0), nx: int = 200, ny: int = 200):
    """(x, y, log10|phi|) arrays on a tensor grid, for contour plots of the potential."""
    x = np.linspace(bbox[0], bbox[1], nx)
    y = np.linspace(bbox[2], bbox[3], ny)
    Z = x[None, :] + 1j * y[:, None]
    return x, y, potential(Z, nps) / math.log(10.0)


def energy_perturbation_check(nps: NodePoleSet, j: int = 1, step: float = 1e-3) -> tuple[float, float]:
    """(actual, predicted) change of the energy when node j moves by ``step`` along the real axis."""
    nodes = nps.nodes.copy()
    base = energy(nodes, nps.poles)
    nodes[j] += step
    return energy(nodes, nps.poles) - base, step * float(energy_gradient(nps.nodes, nps.poles)[j].real)
