"""Domains bounded by piecewise-smooth Jordan curves with corners.

Points of the plane are Python/numpy complex numbers throughout.  A domain
is a cyclic sequence of corners joined by arcs; arc ``k`` runs from corner
``k`` to corner ``k + 1`` and the boundary is traversed counterclockwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .errors import GeometryError

TWO_PI = 2 * math.pi

# corners closer than this to a straight angle are treated as smooth joins
STRAIGHT_ANGLE_TOL = 1e-12
CUSP_ANGLE_TOL = 1e-6
# boundary proximity (relative to the diameter) that counts as "on the boundary"
BOUNDARY_TOL = 1e-14


# ---------------------------------------------------------------------------
# arcs


@dataclass(frozen=True)
class LineArc:
    start: complex
    end: complex

    kind = "line"

    def point(self, t):
        return self.start + np.asarray(t) * (self.end - self.start)

    def derivative(self, t):
        return np.full(np.shape(t), self.end - self.start, dtype=complex)

    @cached_property
    def length(self) -> float:
        return abs(self.end - self.start)

    @property
    def speed_bound(self) -> float:
        return self.length

    def length_between(self, t0: float, t1: float) -> float:
        return abs(t1 - t0) * self.length

    def t_at_length(self, s: float, from_end: bool = False) -> float:
        t = s / self.length
        return 1.0 - t if from_end else t

    def reversed(self) -> "LineArc":
        return LineArc(self.end, self.start)

    def to_json(self) -> dict:
        return {"kind": "line"}


@dataclass(frozen=True)
class CircularArc:
    center: complex
    radius: float
    theta0: float
    sweep: float  # signed; positive means counterclockwise

    kind = "circular"

    @classmethod
    def through(cls, start: complex, end: complex, center: complex, radius: float, ccw: bool = True):
        for p in (start, end):
            if abs(abs(p - center) - radius) > 1e-9 * max(radius, 1.0):
                raise GeometryError(f"endpoint {p} is not on the circle |z - {center}| = {radius}")
        th0 = math.atan2((start - center).imag, (start - center).real)
        th1 = math.atan2((end - center).imag, (end - center).real)
        if ccw:
            sweep = (th1 - th0) % TWO_PI
        else:
            sweep = -((th0 - th1) % TWO_PI)
        if sweep == 0:
            raise GeometryError("circular arc with coincident endpoints")
        return cls(complex(center), float(radius), th0, sweep)

    def point(self, t):
        return self.center + self.radius * np.exp(1j * (self.theta0 + np.asarray(t) * self.sweep))

    def derivative(self, t):
        th = self.theta0 + np.asarray(t) * self.sweep
        return 1j * self.sweep * self.radius * np.exp(1j * th)

    @property
    def start(self) -> complex:
        return complex(self.point(0.0))

    @property
    def end(self) -> complex:
        return complex(self.point(1.0))

    @cached_property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    @property
    def speed_bound(self) -> float:
        return self.length

    def length_between(self, t0: float, t1: float) -> float:
        return abs(t1 - t0) * self.length

    def t_at_length(self, s: float, from_end: bool = False) -> float:
        t = s / self.length
        return 1.0 - t if from_end else t

    def reversed(self) -> "CircularArc":
        return CircularArc(self.center, self.radius, self.theta0 + self.sweep, -self.sweep)

    def to_json(self) -> dict:
        c = self.center
        return {"kind": "circular", "center": [c.real, c.imag], "radius": self.radius, "ccw": self.sweep > 0}


@dataclass(frozen=True)
class EllipticArc:
    center: complex
    semi_axes: tuple[float, float]
    rotation: float
    s0: float
    sweep: float

    kind = "elliptic"

    @classmethod
    def through(cls, start, end, center, semi_axes, rotation=0.0, ccw=True):
        a, b = semi_axes
        rot = np.exp(-1j * rotation)

        def param(p):
            q = (p - center) * rot
            if abs((q.real / a) ** 2 + (q.imag / b) ** 2 - 1) > 1e-9:
                raise GeometryError(f"endpoint {p} is not on the ellipse")
            return math.atan2(q.imag / b, q.real / a)

        s0, s1 = param(start), param(end)
        sweep = (s1 - s0) % TWO_PI if ccw else -((s0 - s1) % TWO_PI)
        if sweep == 0:
            raise GeometryError("elliptic arc with coincident endpoints")
        return cls(complex(center), (float(a), float(b)), float(rotation), s0, sweep)

    def point(self, t):
        a, b = self.semi_axes
        s = self.s0 + np.asarray(t) * self.sweep
        return self.center + np.exp(1j * self.rotation) * (a * np.cos(s) + 1j * b * np.sin(s))

    def derivative(self, t):
        a, b = self.semi_axes
        s = self.s0 + np.asarray(t) * self.sweep
        return self.sweep * np.exp(1j * self.rotation) * (-a * np.sin(s) + 1j * b * np.cos(s))

    @property
    def start(self) -> complex:
        return complex(self.point(0.0))

    @property
    def end(self) -> complex:
        return complex(self.point(1.0))

    def _speed(self, t):
        return abs(self.derivative(t))

    def length_between(self, t0: float, t1: float) -> float:
        lo, hi = min(t0, t1), max(t0, t1)
        if hi == lo:
            return 0.0
        val, _ = quad(self._speed, lo, hi, epsabs=0.0, epsrel=1e-13, limit=200)
        return val

    @cached_property
    def length(self) -> float:
        return self.length_between(0.0, 1.0)

    @property
    def speed_bound(self) -> float:
        return max(self.semi_axes) * abs(self.sweep)

    def t_at_length(self, s: float, from_end: bool = False) -> float:
        # safeguarded Newton on the arc-length function
        if from_end:
            g = lambda t: self.length_between(1.0 - t, 1.0) - s  # noqa: E731
            dg = lambda t: self._speed(1.0 - t)  # noqa: E731
        else:
            g = lambda t: self.length_between(0.0, t) - s  # noqa: E731
            dg = self._speed
        lo, hi = 0.0, 1.0
        t = min(s / float(dg(0.0)), 1.0)
        for _ in range(100):
            val = g(t)
            if val > 0:
                hi = t
            else:
                lo = t
            step = val / float(dg(t))
            t_new = t - step
            if not lo < t_new < hi:
                t_new = 0.5 * (lo + hi)
            if abs(t_new - t) <= 4e-16 * max(t, 1e-300):
                t = t_new
                break
            t = t_new
        return 1.0 - t if from_end else t

    def reversed(self) -> "EllipticArc":
        return EllipticArc(self.center, self.semi_axes, self.rotation, self.s0 + self.sweep, -self.sweep)

    def to_json(self) -> dict:
        c = self.center
        return {
            "kind": "elliptic",
            "center": [c.real, c.imag],
            "semi_axes": list(self.semi_axes),
            "rotation": self.rotation,
            "ccw": self.sweep > 0,
        }


BoundaryArc = LineArc | CircularArc | EllipticArc


# ---------------------------------------------------------------------------
# domain


@dataclass(frozen=True)
class Corner:
    position: complex
    interior_angle: float
    exterior_bisector: complex

    @property
    def salient(self) -> bool:
        return self.interior_angle < math.pi


@dataclass(frozen=True)
class Domain:
    corners: tuple[Corner, ...]
    arcs: tuple[BoundaryArc, ...]
    center: complex
    diameter: float

    @property
    def vertices(self) -> np.ndarray:
        return np.array([c.position for c in self.corners])

    @property
    def is_polygon(self) -> bool:
        return all(a.kind == "line" for a in self.arcs)

    def __len__(self):
        return len(self.corners)

    def incident_arcs(self, k: int) -> tuple[int, int]:
        """Indices of the (previous, next) arcs meeting at corner ``k``."""
        m = len(self.corners)
        return (k - 1) % m, k

    @cached_property
    def _polyline(self) -> np.ndarray:
        # dense closed polyline used for approximate distances and orientation
        if self.is_polygon:
            return self.vertices
        pts = [arc.point(np.linspace(0, 1, 513)[:-1]) for arc in self.arcs]
        return np.concatenate(pts)

    @cached_property
    def _max_chord(self) -> float:
        p = self._polyline
        return float(np.max(np.abs(np.roll(p, -1) - p)))

    def to_json(self) -> dict:
        verts = [[c.position.real, c.position.imag] for c in self.corners]
        if self.is_polygon:
            return {"vertices": verts}
        return {"corners": verts, "arcs": [a.to_json() for a in self.arcs]}

    def transformed(self, rotation: float = 0.0, shift: complex = 0.0) -> "Domain":
        """Image of the domain under z -> exp(i*rotation)*z + shift."""
        if not self.is_polygon:
            raise GeometryError("rigid motions are only implemented for polygons")
        rot = np.exp(1j * rotation)
        return build_polygon(self.vertices * rot + shift)


def _signed_area(p: np.ndarray) -> float:
    q = np.roll(p, -1)
    return 0.5 * float(np.sum(p.real * q.imag - q.real * p.imag))


def _cross(a, b):
    return (np.conj(a) * b).imag


def _check_simple(p: np.ndarray) -> None:
    """Raise if the closed polyline ``p`` touches or crosses itself."""
    n = len(p)
    a, b = p, np.roll(p, -1)
    i, j = np.triu_indices(n, k=2)
    keep = ~((i == 0) & (j == n - 1))
    i, j = i[keep], j[keep]
    p1, p2, q1, q2 = a[i], b[i], a[j], b[j]
    d1 = _cross(p2 - p1, q1 - p1)
    d2 = _cross(p2 - p1, q2 - p1)
    d3 = _cross(q2 - q1, p1 - q1)
    d4 = _cross(q2 - q1, p2 - q1)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)

    def on_seg(s0, s1, c):
        return (
            (np.minimum(s0.real, s1.real) <= c.real)
            & (c.real <= np.maximum(s0.real, s1.real))
            & (np.minimum(s0.imag, s1.imag) <= c.imag)
            & (c.imag <= np.maximum(s0.imag, s1.imag))
        )

    touching = (
        ((d1 == 0) & on_seg(p1, p2, q1))
        | ((d2 == 0) & on_seg(p1, p2, q2))
        | ((d3 == 0) & on_seg(q1, q2, p1))
        | ((d4 == 0) & on_seg(q1, q2, p2))
    )
    bad = np.flatnonzero(proper | touching)
    if len(bad):
        raise GeometryError(f"boundary is self-intersecting (edges {i[bad[0]]} and {j[bad[0]]})")


def _corner_from_arcs(prev_arc, next_arc, position: complex) -> Corner:
    d_out = complex(next_arc.derivative(0.0))
    d_in = -complex(prev_arc.derivative(1.0))
    d_out /= abs(d_out)
    d_in /= abs(d_in)
    angle = math.atan2((d_in / d_out).imag, (d_in / d_out).real) % TWO_PI
    if abs(angle - math.pi) < STRAIGHT_ANGLE_TOL:
        raise GeometryError(f"corner at {position} has a straight angle; remove it or use a smooth arc")
    if angle < CUSP_ANGLE_TOL or angle > TWO_PI - CUSP_ANGLE_TOL:
        raise GeometryError(f"corner at {position} is a cusp (angle {angle:.3g})")
    bisector = -d_out * np.exp(0.5j * angle)
    return Corner(complex(position), angle, complex(bisector / abs(bisector)))


def _assemble(positions: Sequence[complex], arcs: Sequence[BoundaryArc]) -> Domain:
    m = len(positions)
    corners = tuple(_corner_from_arcs(arcs[k - 1], arcs[k], positions[k]) for k in range(m))
    pts = np.array(positions)
    diameter = float(np.max(np.abs(pts[:, None] - pts[None, :])))
    if not all(a.kind == "line" for a in arcs):
        samples = np.concatenate([a.point(np.linspace(0, 1, 65)) for a in arcs])
        diameter = float(np.max(np.abs(samples[:, None] - samples[None, :])))
    dom = Domain(corners, tuple(arcs), 0j, diameter)
    center = choose_center(dom)
    return Domain(corners, tuple(arcs), center, diameter)


def build_polygon(vertices) -> Domain:
    """Polygonal domain from an ordered list of vertices (complex or (x, y) pairs).

    Clockwise input is traversed backwards from the same first vertex, so the
    boundary runs counterclockwise and vertex 0 keeps its label.
    """
    v = _as_complex_points(vertices)
    if len(v) < 3:
        raise GeometryError("a polygon needs at least 3 vertices")
    d = np.abs(v[:, None] - v[None, :])
    np.fill_diagonal(d, np.inf)
    if np.min(d) == 0:
        raise GeometryError("repeated vertex")
    _check_simple(v)
    area = _signed_area(v)
    if area == 0:
        raise GeometryError("degenerate polygon with zero area")
    if area < 0:
        v = np.roll(v[::-1], 1)
    arcs = [LineArc(complex(v[k]), complex(v[(k + 1) % len(v)])) for k in range(len(v))]
    return _assemble(list(v), arcs)


def build_domain(corners, arcs: Sequence[dict]) -> Domain:
    """Domain with curved sides.

    ``arcs[k]`` is a dict in the geometry-file arc format describing the arc
    from ``corners[k]`` to ``corners[k+1]``.
    """
    w = _as_complex_points(corners)
    m = len(w)
    if len(arcs) != m:
        raise GeometryError(f"{m} corners but {len(arcs)} arcs")
    built = []
    for k, spec in enumerate(arcs):
        a, b = complex(w[k]), complex(w[(k + 1) % m])
        kind = spec.get("kind", "line")
        if kind == "line":
            built.append(LineArc(a, b))
        elif kind == "circular":
            c = complex(*spec["center"])
            built.append(CircularArc.through(a, b, c, float(spec["radius"]), bool(spec.get("ccw", True))))
        elif kind == "elliptic":
            c = complex(*spec["center"])
            built.append(
                EllipticArc.through(
                    a, b, c, tuple(spec["semi_axes"]), float(spec.get("rotation", 0.0)), bool(spec.get("ccw", True))
                )
            )
        else:
            raise GeometryError(f"arc {k}: unknown kind {kind!r}")
    poly = np.concatenate([arc.point(np.linspace(0, 1, 129)[:-1]) for arc in built])
    _check_simple(poly)
    if _signed_area(poly) < 0:
        # walk backwards from corner 0: new arc k is old arc -k-1, reversed
        w = np.roll(w[::-1], 1)
        built = [built[(-k - 1) % m].reversed() for k in range(m)]
    return _assemble(list(w), built)


def domain_from_json(data: dict) -> Domain:
    if "vertices" in data:
        return build_polygon(data["vertices"])
    if "corners" in data and "arcs" in data:
        return build_domain(data["corners"], data["arcs"])
    raise GeometryError('geometry needs "vertices" or "corners" + "arcs"')


def _as_complex_points(points) -> np.ndarray:
    arr = np.asarray(points)
    if np.iscomplexobj(arr):
        return arr.astype(complex).ravel()
    arr = arr.astype(float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GeometryError("points must be complex numbers or (x, y) pairs")
    return arr[:, 0] + 1j * arr[:, 1]


# ---------------------------------------------------------------------------
# corner queries


def exterior_bisector(domain: Domain, corner_index: int) -> complex:
    return domain.corners[corner_index].exterior_bisector


def locate_at_arclength(domain: Domain, corner_index: int, side: str, distance: float):
    """(arc index, parameter) of the boundary point at ``distance`` from a corner, or None."""
    if distance < 0:
        raise ValueError("distance must be nonnegative")
    prev_arc, next_arc = domain.incident_arcs(corner_index)
    if side in ("next", "next-arc"):
        k, from_end = next_arc, False
    elif side in ("previous", "previous-arc", "prev"):
        k, from_end = prev_arc, True
    else:
        raise ValueError(f"unknown side {side!r}")
    arc = domain.arcs[k]
    if distance > arc.length:
        return None
    return k, arc.t_at_length(distance, from_end=from_end)


def point_at_arclength(domain: Domain, corner_index: int, side: str, distance: float):
    loc = locate_at_arclength(domain, corner_index, side, distance)
    if loc is None:
        return None
    k, t = loc
    return complex(domain.arcs[k].point(t))


# ---------------------------------------------------------------------------
# containment and distance


def _segment_distance(z: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from each z to the union of segments [a_k, b_k]."""
    out = np.full(z.shape, np.inf)
    for ak, bk in zip(a, b):
        d = bk - ak
        t = np.clip(((z - ak) * np.conj(d)).real / (abs(d) ** 2), 0.0, 1.0)
        np.minimum(out, np.abs(z - (ak + t * d)), out=out)
    return out


def distance_to_boundary(domain: Domain, z) -> np.ndarray:
    """Distance to the boundary (exact for polygons, dense-polyline estimate otherwise)."""
    z = np.asarray(z, dtype=complex)
    p = domain._polyline
    return _segment_distance(z, p, np.roll(p, -1))


def _winding_polyline(p: np.ndarray, z: np.ndarray) -> np.ndarray:
    wn = np.zeros(z.shape, dtype=int)
    q = np.roll(p, -1)
    zi = z.imag
    for a, b in zip(p, q):
        left = (b.real - a.real) * (zi - a.imag) - (z.real - a.real) * (b.imag - a.imag)
        up = (a.imag <= zi) & (b.imag > zi) & (left > 0)
        down = (a.imag > zi) & (b.imag <= zi) & (left < 0)
        wn += up.astype(int) - down.astype(int)
    return wn


def _winding_exact(domain: Domain, z: complex, max_depth: int = 60):
    """Winding number about z by adaptive subdivision of each arc; None if z is on an arc."""
    total = 0.0
    for arc in domain.arcs:
        stack = [(0.0, 1.0, 0)]
        while stack:
            t0, t1, depth = stack.pop()
            p0 = complex(arc.point(t0)) - z
            p1 = complex(arc.point(t1)) - z
            if p0 == 0 or p1 == 0:
                return None
            # the piece lies within speed_bound*(t1-t0) of p0, so if z is farther
            # away the piece cannot wind around it
            if abs(p0) > arc.speed_bound * (t1 - t0):
                total += math.atan2((p1 / p0).imag, (p1 / p0).real)
            elif depth >= max_depth:
                return None
            else:
                tm = 0.5 * (t0 + t1)
                stack.append((t0, tm, depth + 1))
                stack.append((tm, t1, depth + 1))
    return int(round(total / TWO_PI))


def contains(domain: Domain, z):
    """True where z lies strictly inside the domain; boundary points give False."""
    scalar = np.ndim(z) == 0
    zz = np.atleast_1d(np.asarray(z, dtype=complex))
    shape = zz.shape
    zz = zz.ravel()
    tol = BOUNDARY_TOL * domain.diameter
    p = domain._polyline
    inside = np.zeros(zz.shape, dtype=bool)
    chunk = 4096
    for s in range(0, len(zz), chunk):
        zc = zz[s : s + chunk]
        wn = _winding_polyline(p, zc)
        dist = _segment_distance(zc, p, np.roll(p, -1))
        res = (wn != 0) & (dist > tol)
        if not domain.is_polygon:
            near = np.flatnonzero(dist <= 2 * domain._max_chord)
            for i in near:
                w = _winding_exact(domain, complex(zc[i]))
                res[i] = w is not None and w != 0
        inside[s : s + chunk] = res
    inside = inside.reshape(shape)
    return bool(inside[0]) if scalar else inside


def choose_center(domain: Domain) -> complex:
    """Interior expansion point: the corner centroid, or a grid point deep inside."""
    c = complex(np.mean(domain.vertices))
    if contains(domain, c):
        return c
    p = domain._polyline
    x0, x1 = p.real.min(), p.real.max()
    y0, y1 = p.imag.min(), p.imag.max()
    X, Y = np.meshgrid(np.linspace(x0, x1, 64), np.linspace(y0, y1, 64))
    grid = (X + 1j * Y).ravel()
    grid = grid[contains(domain, grid)]
    if len(grid) == 0:
        raise GeometryError("could not find an interior point")
    dense = np.concatenate([arc.point(np.linspace(0, 1, 257)) for arc in domain.arcs])
    dist = np.min(np.abs(grid[:, None] - dense[None, :]), axis=1)
    return complex(grid[np.argmax(dist)])
