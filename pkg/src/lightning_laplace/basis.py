"""Rational basis with poles clustered at the corners, boundary samples, and the real LS matrix.

The approximation is ``u = Re r`` with

    r(z) = sum_j a_j / (z - z_j) + sum_{p=0..N2} b_p (z - z*)^p,

which has ``N = 2 N1 + 2 N2 + 1`` real degrees of freedom (``Im b_0`` is dropped).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .boundarydata import BoundarySpec
from .errors import AssemblyError, BasisError
from .geometry import Domain, contains, distance_to_boundary, locate_at_arclength

DEFAULT_SIGMA = 4.0
DUPLICATE_TOL = 1e-13


def clustered_distances(m: int, sigma: float = DEFAULT_SIGMA) -> np.ndarray:
    """exp(-sigma (sqrt(m) - sqrt(j))) for j = 1..m, increasing to 1."""
    j = np.arange(1, m + 1)
    return np.exp(-sigma * (math.sqrt(m) - np.sqrt(j)))


def legacy_poles(n: int, sigma: float) -> np.ndarray:
    """Plain geometric clustering exp(-sigma j / sqrt(n)), j = 0..n-1 (decreasing)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    j = np.arange(n)
    return np.exp(-sigma * j / math.sqrt(n))


@dataclass(frozen=True, eq=False)
class PoleCluster:
    corner_index: int
    poles: np.ndarray
    distances: np.ndarray
    local_scale: float

    def __len__(self):
        return len(self.poles)


@dataclass(frozen=True, eq=False)
class Basis:
    clusters: tuple[PoleCluster, ...]
    poly_degree: int
    expansion_point: complex

    @property
    def poles(self) -> np.ndarray:
        if not self.clusters:
            return np.zeros(0, dtype=complex)
        return np.concatenate([c.poles for c in self.clusters])

    @property
    def n_poles(self) -> int:
        return sum(len(c) for c in self.clusters)

    @property
    def dof_count(self) -> int:
        return 2 * self.n_poles + 2 * self.poly_degree + 1


def local_scale(domain: Domain, k: int) -> float:
    i, j = domain.incident_arcs(k)
    return min(domain.arcs[i].length, domain.arcs[j].length)


def place_poles(
    domain: Domain,
    n: int,
    sigma: float = DEFAULT_SIGMA,
    reentrant_multiplier: int = 3,
    shift: float = 0.0,
    clustering: str = "sqrt",
) -> list[PoleCluster]:
    """n poles outside each salient corner, ``reentrant_multiplier * n`` outside reentrant ones.

    Poles lie on the exterior bisector at distances ``L_k exp(-sigma (sqrt m - sqrt j))``,
    where ``L_k`` is the shorter incident arc.  ``shift`` (a fraction of the diameter)
    pushes every pole further out along its bisector.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    clusters = []
    for k, corner in enumerate(domain.corners):
        m = n if corner.salient else reentrant_multiplier * n
        L = local_scale(domain, k)
        if clustering == "sqrt":
            d = L * clustered_distances(m, sigma)
        elif clustering == "legacy":
            d = L * legacy_poles(m, sigma)[::-1]
        else:
            raise ValueError(f"unknown clustering {clustering!r}")
        d = d + shift * domain.diameter
        poles = corner.position + d * corner.exterior_bisector
        inside = contains(domain, poles)
        # the innermost poles of large clusters can underflow onto the corner itself
        ok = ~inside & (distance_to_boundary(domain, poles) > 1e-14 * domain.diameter)
        if np.any(inside):
            warnings.warn(f"discarding {int(np.sum(inside))} poles inside the domain at corner {k}", stacklevel=2)
        if not np.any(ok):
            raise BasisError(f"every pole of corner {k} falls inside the domain")
        clusters.append(PoleCluster(k, poles[ok], d[ok], L))
    return clusters


def make_basis(
    domain: Domain,
    n: int,
    sigma: float = DEFAULT_SIGMA,
    reentrant_multiplier: int = 3,
    poly_degree: int | None = None,
    shift: float = 0.0,
    clustering: str = "sqrt",
) -> Basis:
    clusters = place_poles(domain, n, sigma, reentrant_multiplier, shift, clustering)
    if poly_degree is None:
        poly_degree = math.ceil(n / 2)
    return Basis(tuple(clusters), int(poly_degree), domain.center)


@dataclass(frozen=True, eq=False)
class SamplePlan:
    points: np.ndarray
    arc_index: np.ndarray
    t: np.ndarray
    pole_induced: np.ndarray  # bool per point; False means uniform fill or corner
    weights: np.ndarray
    corner_distance: np.ndarray  # distance to the nearest corner over the diameter

    def __len__(self):
        return len(self.points)


def boundary_points(domain: Domain, arc_index, t) -> np.ndarray:
    arc_index = np.asarray(arc_index, dtype=int)
    t = np.asarray(t, dtype=float)
    z = np.empty(t.shape, dtype=complex)
    for k in np.unique(arc_index):
        sel = arc_index == k
        z[sel] = domain.arcs[k].point(t[sel])
    return z


def _dedupe(domain: Domain, arc_index, t, flags):
    """Drop repeated samples on the same arc.

    Points count as repeats within ``DUPLICATE_TOL`` times their distance to the
    nearest corner (a few ulps at least), so the sub-1e-12 samples that resolve
    the innermost poles survive.
    """
    z = boundary_points(domain, arc_index, t)
    order = np.lexsort((t, arc_index))
    z, arc_index, t, flags = z[order], arc_index[order], t[order], flags[order]
    cd = np.min(np.abs(z[:, None] - domain.vertices[None, :]), axis=1)
    tol = np.maximum(DUPLICATE_TOL * np.minimum(cd, domain.diameter), 8 * np.finfo(float).eps * np.abs(z))
    keep = np.ones(len(z), dtype=bool)
    gap = np.abs(np.diff(z))
    keep[1:] = ~((arc_index[1:] == arc_index[:-1]) & ((gap <= tol[1:]) | (gap <= tol[:-1])))
    return z[keep], arc_index[keep], t[keep], flags[keep]


def plan_samples(
    domain: Domain,
    basis: Basis,
    target_ratio: float = 3.0,
    refinement: int = 1,
    include_corners: bool = True,
    corner_weights: bool = False,
) -> SamplePlan:
    """Boundary sample points clustered like the poles, padded to ``M >= target_ratio * N``.

    Each pole at distance d from its corner contributes points at distances
    d/3, 2d/3, d along both incident arcs (``3 * refinement`` points per side in
    general).  Uniform points in the arc parameter are then added until the
    ratio is reached.  ``corner_weights`` sets weights to distance-to-nearest-corner
    over diameter.
    """
    per_side = 3 * refinement
    arc_idx: list[int] = []
    ts: list[float] = []
    for cl in basis.clusters:
        for d in cl.distances:
            for i in range(1, per_side + 1):
                s = d * i / per_side
                for side in ("previous", "next"):
                    loc = locate_at_arclength(domain, cl.corner_index, side, s)
                    if loc is not None:
                        arc_idx.append(loc[0])
                        ts.append(loc[1])
    flags = [True] * len(ts)
    if include_corners:
        for k in range(len(domain.arcs)):
            arc_idx.append(k)
            ts.append(0.0)
            flags.append(False)
    arc_idx_a = np.array(arc_idx, dtype=int)
    t_a = np.array(ts, dtype=float)
    flags_a = np.array(flags, dtype=bool)
    z, arc_idx_a, t_a, flags_a = _dedupe(domain, arc_idx_a, t_a, flags_a)

    target = math.ceil(target_ratio * refinement * basis.dof_count)
    lengths = np.array([a.length for a in domain.arcs])
    fill = max(target - len(z), 0)
    while len(z) < target:
        counts = np.maximum(np.ceil(fill * lengths / lengths.sum()).astype(int), 1)
        extra_k = np.concatenate([np.full(c, k) for k, c in enumerate(counts)])
        extra_t = np.concatenate([np.arange(1, c + 1) / (c + 1) for c in counts])
        z2, k2, t2, f2 = _dedupe(
            domain,
            np.concatenate([arc_idx_a, extra_k]),
            np.concatenate([t_a, extra_t]),
            np.concatenate([flags_a, np.zeros(len(extra_t), dtype=bool)]),
        )
        if len(z2) >= target:
            z, arc_idx_a, t_a, flags_a = z2, k2, t2, f2
            break
        fill += target - len(z2)

    cdist = np.min(np.abs(z[:, None] - domain.vertices[None, :]), axis=1) / domain.diameter
    if corner_weights:
        # the outermost pole sits one arc length out, so its farthest samples land on vertices;
        # those rows would carry zero weight
        off = cdist > 0
        z, arc_idx_a, t_a, flags_a, cdist = z[off], arc_idx_a[off], t_a[off], flags_a[off], cdist[off]
    w = cdist.copy() if corner_weights else np.ones(len(z))
    return SamplePlan(z, arc_idx_a, t_a, flags_a, w, cdist)


@dataclass(frozen=True, eq=False)
class FitSystem:
    matrix: np.ndarray  # weighted, column-normalized
    rhs: np.ndarray  # weighted
    column_scales: np.ndarray
    samples: SamplePlan
    basis: Basis
    values: np.ndarray  # unweighted boundary data at the samples

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @classmethod
    def from_arrays(cls, A, b) -> "FitSystem":
        """A bare system (unit weights, no column scaling) for testing the solver in isolation."""
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        M = A.shape[0]
        ones = np.ones(M)
        plan = SamplePlan(np.zeros(M, dtype=complex), np.zeros(M, dtype=int), np.zeros(M), ones > 0, ones, ones)
        return cls(A, b, np.ones(A.shape[1]), plan, None, b)


def basis_columns(basis: Basis, z: np.ndarray) -> np.ndarray:
    """Unscaled real basis matrix at points z, in the canonical column order."""
    z = np.asarray(z, dtype=complex)
    poles = basis.poles
    N1, N2 = len(poles), basis.poly_degree
    A = np.empty((len(z), 2 * N1 + 2 * N2 + 1))
    if N1:
        diff = z[:, None] - poles[None, :]
        if np.any(diff == 0):
            raise AssemblyError("a sample point coincides with a pole")
        R = 1.0 / diff
        A[:, 0 : 2 * N1 : 2] = R.real
        A[:, 1 : 2 * N1 : 2] = R.imag
    w = z - basis.expansion_point
    P = np.ones((len(z), N2 + 1), dtype=complex)
    for p in range(1, N2 + 1):
        P[:, p] = P[:, p - 1] * w
    A[:, 2 * N1 : 2 * N1 + N2 + 1] = P.real
    A[:, 2 * N1 + N2 + 1 :] = P[:, 1:].imag
    return A


def assemble(domain: Domain, basis: Basis, plan: SamplePlan, h: BoundarySpec) -> FitSystem:
    poles = basis.poles
    if len(poles):
        gap = np.min(np.abs(plan.points[:, None] - poles[None, :]))
        if gap <= 1e-14 * domain.diameter:
            raise AssemblyError("a sample point coincides with a pole")
    values = h.evaluate(plan.arc_index, plan.t)
    A = basis_columns(basis, plan.points) * plan.weights[:, None]
    b = values * plan.weights
    scales = np.linalg.norm(A, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        A = np.where(scales > 0, A / np.where(scales > 0, scales, 1.0), 0.0)
    return FitSystem(A, b, scales, plan, basis, values)
