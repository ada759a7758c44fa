import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lightning_laplace.demos import GWW_DRUM, L_SHAPE, demo_domain, lens_domain, random_polygon
from lightning_laplace.errors import GeometryError
from lightning_laplace.geometry import (
    CircularArc,
    EllipticArc,
    build_domain,
    build_polygon,
    choose_center,
    contains,
    distance_to_boundary,
    domain_from_json,
    exterior_bisector,
    point_at_arclength,
)

SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
ALL_DEMOS = ["pentagon", "lshape", "snowflake", "isospectral", "random", "lens"]


def test_square_corners():
    d = build_polygon(SQUARE)
    assert len(d.corners) == 4
    for c in d.corners:
        assert c.interior_angle == pytest.approx(math.pi / 2, abs=1e-14)
        assert c.salient


def test_lshape_reentrant_corner():
    d = build_polygon(L_SHAPE)
    angles = [c.interior_angle for c in d.corners]
    k = int(np.argmax(angles))
    assert d.corners[k].position == 1 + 1j
    assert angles[k] == pytest.approx(1.5 * math.pi)
    assert sum(c.salient for c in d.corners) == 5


def test_clockwise_square_same_domain():
    ccw = build_polygon(SQUARE)
    cw = build_polygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert cw.to_json() == ccw.to_json()
    assert cw.center == ccw.center


def test_reversed_input_same_domain_up_to_labels():
    d = build_polygon(L_SHAPE)
    r = build_polygon(L_SHAPE[::-1])
    # same vertex cycle, relabelled so that the reversed list's first vertex stays first
    k = list(d.vertices).index(r.vertices[0])
    assert np.array_equal(np.roll(d.vertices, -k), r.vertices)


def test_bisectors():
    sq = build_polygon(SQUARE)
    assert exterior_bisector(sq, 0) == pytest.approx((-1 - 1j) / math.sqrt(2))
    ell = build_polygon(L_SHAPE)
    k = [c.position for c in ell.corners].index(1 + 1j)
    assert exterior_bisector(ell, k) == pytest.approx((1 + 1j) / math.sqrt(2))


@pytest.mark.parametrize("name", ALL_DEMOS)
def test_bisector_points_outward(name):
    d = demo_domain(name, m=10)
    for c in d.corners:
        assert abs(abs(c.exterior_bisector) - 1) < 1e-14
        for s in (1e-8, 1e-4, 1e-2):
            assert not contains(d, c.position + s * d.diameter * c.exterior_bisector)


@pytest.mark.parametrize("name", ["pentagon", "lshape", "snowflake", "isospectral", "random"])
def test_turning_angles_sum(name):
    d = demo_domain(name, m=15, seed=3)
    assert sum(math.pi - c.interior_angle for c in d.corners) == pytest.approx(2 * math.pi)


def test_straight_angle_rejected():
    with pytest.raises(GeometryError):
        build_polygon([(0, 0), (1, 0), (2, 0), (1, 1)])


def test_self_intersection_and_repeats_rejected():
    with pytest.raises(GeometryError):
        build_polygon([(0, 0), (1, 1), (1, 0), (0, 1)])
    with pytest.raises(GeometryError):
        build_polygon([(0, 0), (1, 0), (1, 0), (0, 1)])
    with pytest.raises(GeometryError):
        build_polygon([(0, 0), (1, 0)])


def test_point_at_arclength_square():
    d = build_polygon(SQUARE)
    assert point_at_arclength(d, 0, "next", 0.5) == pytest.approx(0.5)
    assert point_at_arclength(d, 0, "next", 1.5) is None
    assert point_at_arclength(d, 0, "previous", 0.25) == pytest.approx(0.25j)


def test_point_at_arclength_circle():
    # upper half of the unit disk: arc from 1 to -1 through i
    d = build_domain([(1, 0), (-1, 0)], [{"kind": "circular", "center": [0, 0], "radius": 1, "ccw": True}, {"kind": "line"}])
    L = d.arcs[0].length
    assert L == pytest.approx(math.pi)
    z = point_at_arclength(d, 0, "next", L / 2)
    assert abs(z) == pytest.approx(1.0)
    assert z == pytest.approx(1j)


def test_contains_examples():
    sq = build_polygon(SQUARE)
    assert contains(sq, 0.5 + 0.5j)
    assert not contains(sq, 2 + 2j)
    assert not contains(sq, 0.5 + 0j)  # boundary point
    assert not contains(build_polygon(L_SHAPE), 1.5 + 1.5j)


def test_choose_center():
    assert choose_center(build_polygon(SQUARE)) == pytest.approx(0.5 + 0.5j)
    ell = build_polygon(L_SHAPE)
    assert contains(ell, ell.center)
    # C shape: the vertex centroid falls in the mouth, outside the domain
    c_shape = build_polygon([(0, 0), (3, 0), (3, 1), (1, 1), (1, 2), (3, 2), (3, 3), (0, 3)])
    centroid = np.mean(c_shape.vertices)
    assert not contains(c_shape, centroid)
    z = c_shape.center
    assert contains(c_shape, z)
    # brute-force oracle: no grid point is much further from the boundary
    g = np.linspace(0, 3, 121)
    G = (g[None, :] + 1j * g[:, None]).ravel()
    G = G[contains(c_shape, G)]
    assert distance_to_boundary(c_shape, z) >= 0.9 * np.max(distance_to_boundary(c_shape, G))


def test_curved_domain():
    d = lens_domain()
    assert not d.is_polygon
    assert [a.kind for a in d.arcs] == ["elliptic", "circular"]
    assert contains(d, d.center)
    assert contains(d, 0.5j) and not contains(d, 1.1j) and not contains(d, -0.3j)
    for arc in d.arcs:
        t = np.linspace(0, 1, 7)
        assert np.all(np.diff([arc.length_between(0, s) for s in t]) > 0)


def test_elliptic_arc_length_against_quadrature():
    arc = EllipticArc.through(-1, 1, 0.5j, (math.sqrt(2), math.sqrt(0.5)))
    t = np.linspace(0, 1, 200001)
    z = arc.point(t)
    assert arc.length == pytest.approx(np.sum(np.abs(np.diff(z))), rel=1e-9)
    s = arc.length / 3
    assert arc.length_between(0, arc.t_at_length(s)) == pytest.approx(s, rel=1e-12)


def test_circular_arc_through():
    arc = CircularArc.through(1, 1j, 0, 1.0, ccw=True)
    assert arc.point(0.0) == pytest.approx(1)
    assert arc.point(1.0) == pytest.approx(1j)
    assert arc.length == pytest.approx(math.pi / 2)


def test_isospectral_drum_shape():
    d = build_polygon(GWW_DRUM)
    angles = sorted(round(math.degrees(c.interior_angle)) for c in d.corners)
    assert angles == [45, 45, 90, 90, 135, 135, 270, 270]


def test_json_round_trip():
    for d in (build_polygon(L_SHAPE), lens_domain()):
        e = domain_from_json(d.to_json())
        assert np.allclose(e.vertices, d.vertices)
        assert [a.kind for a in e.arcs] == [a.kind for a in d.arcs]


def test_transformed():
    d = build_polygon(L_SHAPE)
    e = d.transformed(0.3, 1 + 2j)
    assert np.allclose(e.vertices, d.vertices * np.exp(0.3j) + 1 + 2j)
    assert [c.interior_angle for c in e.corners] == pytest.approx([c.interior_angle for c in d.corners])


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 15), st.integers(0, 10**6))
def test_random_polygons_are_consistent(m, seed):
    d = build_polygon(random_polygon(m, seed))
    assert contains(d, d.center)
    assert sum(math.pi - c.interior_angle for c in d.corners) == pytest.approx(2 * math.pi)
    for c in d.corners:
        assert (c.interior_angle < math.pi) == c.salient
        assert not contains(d, c.position + 1e-6 * d.diameter * c.exterior_bisector)
