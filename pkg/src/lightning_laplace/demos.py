"""Demo domains and boundary data.

Snowflake: second Koch iterate of an equilateral triangle with unit circumradius,
a 48-gon with 18 salient corners of 60 degrees and 30 reentrant corners of 240
degrees (see ``koch_snowflake``).

Isospectral drum: one member of the Gordon-Webb-Wolpert pair, assembled from
seven right-isosceles triangles with unit legs, vertices

    (0,0) (1,0) (1,1) (2,1) (3,2) (2,2) (2,3) (0,1)

(area 7/2).  It is a standard GWW drum, not a copy of any particular figure.
"""

from __future__ import annotations

import numpy as np

from .boundarydata import BoundarySpec, random_smooth
from .geometry import Domain, build_domain, build_polygon

DEMO_NAMES = ("pentagon", "lshape", "snowflake", "isospectral", "random", "lens")
DEMO_WAVELENGTH = 1.0

GWW_DRUM = [(0, 0), (1, 0), (1, 1), (2, 1), (3, 2), (2, 2), (2, 3), (0, 1)]
L_SHAPE = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]


def regular_polygon(m: int, radius: float = 1.0) -> np.ndarray:
    return radius * np.exp(2j * np.pi * np.arange(m) / m + 0.5j * np.pi)


def koch_snowflake(levels: int = 2) -> np.ndarray:
    pts = regular_polygon(3)[::-1]  # clockwise start so the bumps point outward
    for _ in range(levels):
        out = []
        for a, b in zip(pts, np.roll(pts, -1)):
            d = (b - a) / 3
            out += [a, a + d, a + d + d * np.exp(1j * np.pi / 3), a + 2 * d]
        pts = np.array(out)
    return pts


def random_polygon(m: int, seed: int = 0) -> np.ndarray:
    """Vertices at equispaced angles with radii 0.1 + U(0, 1)."""
    rng = np.random.default_rng(seed)
    radii = 0.1 + rng.uniform(0.0, 1.0, m)
    return radii * np.exp(2j * np.pi * np.arange(m) / m)


def lens_domain() -> Domain:
    """Two corners joined by an elliptic arc (below) and a circular arc (above)."""
    return build_domain(
        [(-1, 0), (1, 0)],
        [
            {"kind": "elliptic", "center": [0, 0.5], "semi_axes": [2**0.5, 0.5**0.5], "ccw": True},
            {"kind": "circular", "center": [0, 0], "radius": 1.0, "ccw": True},
        ],
    )


def demo_domain(name: str, m: int = 6, seed: int = 0) -> Domain:
    if name == "pentagon":
        return build_polygon(regular_polygon(5))
    if name == "lshape":
        return build_polygon(L_SHAPE)
    if name == "snowflake":
        return build_polygon(koch_snowflake(2))
    if name == "isospectral":
        return build_polygon(GWW_DRUM)
    if name == "random":
        return build_polygon(random_polygon(m, seed))
    if name == "lens":
        return lens_domain()
    raise ValueError(f"unknown demo {name!r}; choose from {', '.join(DEMO_NAMES)}")


def demo_data(domain: Domain, seed: int = 0, wavelength: float = DEMO_WAVELENGTH) -> BoundarySpec:
    """Independent smooth random data on each side, zero at the corners."""
    return BoundarySpec(domain, [random_smooth(1000 * seed + k, wavelength) for k in range(len(domain.arcs))])


def demo_problem(name: str, m: int = 6, seed: int = 0):
    dom = demo_domain(name, m, seed)
    return dom, demo_data(dom, seed)
