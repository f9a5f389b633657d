import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from embedkit.dyadic import (
    Box, DyadicCube, IndexWindow, Region, classify_region, cube_geometry, enumerate_window, fit_log_slope,
    window_arrays,
)
from embedkit.errors import DegenerateAbscissa, WindowTooLarge


def test_unit_square_at_level_zero():
    center, side, iv = cube_geometry(0, (0, 0))
    assert center == (0.0, 0.0) and side == 1.0
    assert iv == ((-0.5, 0.5), (-0.5, 0.5))


def test_geometry_of_shifted_cube():
    center, side, _ = cube_geometry(3, (8, 0))
    assert center == (1.0, 0.0) and side == 0.125


@given(nu=st.integers(0, 40), m=st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=3))
def test_center_scales_back_to_index(nu, m):
    c = DyadicCube(nu, tuple(m))
    assert tuple(math.ldexp(v, nu) for v in c.center) == tuple(float(v) for v in m)
    lo, hi = c.box().lo, c.box().hi
    assert all(b - a == c.side for a, b in zip(lo, hi))


def test_negative_level_rejected():
    with pytest.raises(ValueError):
        DyadicCube(-1, (0,))
    with pytest.raises(ValueError):
        Box((0.0,), (0.0,))


@pytest.mark.parametrize("cube,region", [
    (DyadicCube(5, (0,)), Region.NEAR_ORIGIN),
    (DyadicCube(0, (100, 0)), Region.FAR),
    (DyadicCube(2, (4, 0)), Region.INTERMEDIATE),
])
def test_region_examples(cube, region):
    assert classify_region(cube, 0.1) is region


@given(nu=st.integers(0, 20), m=st.lists(st.integers(-1000, 1000), min_size=1, max_size=2))
def test_region_monotone_under_doubling(nu, m):
    order = [Region.NEAR_ORIGIN, Region.INTERMEDIATE, Region.FAR]
    a = classify_region(DyadicCube(nu, tuple(m)))
    b = classify_region(DyadicCube(nu, tuple(2 * v for v in m)))
    assert order.index(b) >= order.index(a)


def test_enumeration_examples():
    assert [(q.nu, q.m) for q in enumerate_window(IndexWindow(0, 1, scale_with_level=False), 1)] == \
        [(0, (-1,)), (0, (0,)), (0, (1,))]
    assert [(q.nu, q.m) for q in enumerate_window(IndexWindow(1, 0, scale_with_level=False), 2)] == \
        [(0, (0, 0)), (1, (0, 0))]
    w = IndexWindow(12, 4)
    assert w.count(1) == sum(2 * 4 * 2**nu + 1 for nu in range(13))
    assert len(list(enumerate_window(w, 1))) == w.count(1)


def test_enumeration_matches_array_form_and_is_unique():
    w = IndexWindow(3, 2, region=Region.INTERMEDIATE, eps=0.3)
    cubes = list(enumerate_window(w, 2))
    nu, m = window_arrays(w, 2)
    assert [(q.nu, q.m) for q in cubes] == [(int(a), tuple(int(v) for v in b)) for a, b in zip(nu, m)]
    assert len(set(cubes)) == len(cubes)


def test_window_budget():
    with pytest.raises(WindowTooLarge):
        list(enumerate_window(IndexWindow(20, 4, budget=1000), 1))


def test_level_cubes_tile_a_box():
    nu = 3
    cubes = [DyadicCube(nu, (i, j)) for i in range(-4, 4) for j in range(0, 3)]
    area = sum(c.volume for c in cubes)
    assert area == pytest.approx(8 * 3 * 0.125**2)
    # disjoint interiors: the centers of distinct cubes are at least one side apart in some axis
    centers = np.array([c.center for c in cubes])
    diff = np.abs(centers[:, None, :] - centers[None, :, :]).max(axis=2)
    assert np.all(diff[~np.eye(len(cubes), dtype=bool)] >= 0.125)


def test_slope_fit_examples():
    f = fit_log_slope([(nu, 2.0**-nu) for nu in range(6)])
    assert f.slope == pytest.approx(-1.0, abs=1e-14) and f.residual_rms < 1e-12
    assert fit_log_slope([(nu, 1.0) for nu in range(5)]).slope == 0.0
    rng = np.random.default_rng(0)
    noisy = [(nu, 2 ** (0.3 * nu) * (1 + 0.01 * rng.standard_normal())) for nu in range(20)]
    assert fit_log_slope(noisy).slope == pytest.approx(0.3, abs=0.02)


def test_slope_fit_errors():
    with pytest.raises(DegenerateAbscissa):
        fit_log_slope([(1, 1.0), (1, 2.0), (1, 3.0)])
    with pytest.raises(ValueError):
        fit_log_slope([(0, 1.0), (1, 2.0)])


@given(slope=st.floats(-5, 5), icpt=st.floats(-20, 20), n=st.integers(3, 30))
@settings(max_examples=50)
def test_slope_fit_recovers_geometric_inputs(slope, icpt, n):
    f = fit_log_slope([(x, icpt + slope * x) for x in range(n)], log2=True)
    assert f.slope == pytest.approx(slope, abs=1e-9) and f.residual_rms < 1e-9
