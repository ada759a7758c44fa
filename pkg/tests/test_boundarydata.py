import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lightning_laplace.boundarydata import BoundarySpec, Expression, RandomSmooth, bc_from_json, eval_h, random_smooth
from lightning_laplace.errors import DataError
from lightning_laplace.geometry import build_polygon

SQUARE = build_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])


def test_zero_everywhere():
    h = BoundarySpec(SQUARE, "0")
    for k in range(4):
        assert eval_h(h, k, 0.3) == 0.0


def test_coordinate_readout():
    h = BoundarySpec(SQUARE, "x")
    # arc 1 runs from (1, 0) to (1, 1)
    assert eval_h(h, 1, 0.5) == pytest.approx(1.0)
    h = BoundarySpec(SQUARE, "y")
    assert eval_h(h, 1, 0.5) == pytest.approx(0.5)


def test_expression_grammar():
    e = Expression("exp(x)*sin(3*y) * t*(1-t) + 2^3 - abs(-pi) + sqrt(4) + log(e)")
    x, y, t = 0.3, 0.7, 0.25
    expected = np.exp(x) * np.sin(3 * y) * t * (1 - t) + 8 - np.pi + 2 + 1
    assert e(t, x, y) == pytest.approx(expected)


@pytest.mark.parametrize("bad", ["__import__('os')", "x.real", "foo(x)", "z + 1", "1 +", "[1, 2]", "lambda: 1"])
def test_expression_rejects(bad):
    with pytest.raises(DataError):
        Expression(bad)


def test_log_of_nonpositive_names_arc_and_t():
    with pytest.raises(DataError, match=r"arc 0 .* t = 0\.0"):
        BoundarySpec(SQUARE, ["log(x)", "0", "0", "0"])


def test_random_smooth_determinism_and_endpoints():
    a, b = RandomSmooth(7, 0.5), RandomSmooth(7, 0.5)
    t = np.linspace(0, 1, 101)
    assert np.array_equal(a(t), b(t))
    assert a(0.0) == 0.0 and a(1.0) == 0.0
    assert not np.allclose(RandomSmooth(8, 0.5)(t), a(t))
    assert a.max_frequency == 2


def test_random_smooth_long_wavelength_is_lowest_frequency():
    r = RandomSmooth(3, 10.0)
    assert r.max_frequency == 0
    t = np.linspace(0, 1, 11)
    assert np.allclose(r(t), t * (1 - t) * r.cos_coeffs[0])


def test_continuity_flags():
    assert BoundarySpec(SQUARE, [random_smooth(k) for k in range(4)]).continuous
    side_constants = BoundarySpec(SQUARE, ["1", "0", "0", "0"])
    assert not side_constants.continuous
    assert side_constants.corner_jumps() == pytest.approx([1, 1, 0, 0])


def test_bc_json_forms():
    h = bc_from_json({"all": "x + y"}, SQUARE)
    assert eval_h(h, 2, 0.0) == pytest.approx(2.0)
    h = bc_from_json({"arcs": [{"randnfun": {"seed": 7, "wavelength": 0.5}}, "1", 2.5, "t"]}, SQUARE)
    assert eval_h(h, 2, 0.4) == 2.5
    assert eval_h(h, 0, 0.3) == pytest.approx(float(RandomSmooth(7, 0.5)(0.3)))
    with pytest.raises(DataError):
        bc_from_json({"arcs": ["1", "2"]}, SQUARE)
    with pytest.raises(DataError):
        bc_from_json({}, SQUARE)


def test_parameter_out_of_range():
    with pytest.raises(DataError):
        eval_h(BoundarySpec(SQUARE, "1"), 0, 1.5)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.05, 20.0))
def test_random_smooth_vanishes_at_corners(seed, wl):
    r = RandomSmooth(seed, wl)
    assert r(0.0) == 0.0 and abs(r(1.0)) <= 1e-12
    assert np.all(np.isfinite(r(np.linspace(0, 1, 50))))
