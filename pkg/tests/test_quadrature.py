import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from embedkit.errors import NonIntegrableWeight, QuadratureFailure
from embedkit.quadrature import (
    aitken, arc_measure, gauss_legendre, graded_rule_1d, planar_power_box, power_integral, radial_box_integral,
    signed_power_integral, tensor_graded,
)


def test_gauss_legendre_integrates_polynomials_exactly():
    x, w = gauss_legendre(16)
    for k in range(32):
        assert np.dot(w, x**k) == pytest.approx(1.0 / (k + 1), rel=1e-14)


@pytest.mark.parametrize("u,v,e", [(0.0, 1.0, 0.5), (0.0, 2.0, -0.5), (0.5, 3.0, -1.0), (1.0, 1.0 + 1e-9, 2.0)])
def test_power_integral_against_adaptive_quad(u, v, e):
    ref, _ = integrate.quad(lambda t: t**e, u, v, epsabs=0, epsrel=1e-13)
    assert power_integral(u, v, e) == pytest.approx(ref, rel=1e-12)


def test_power_integral_rejects_nonintegrable_origin():
    with pytest.raises(NonIntegrableWeight):
        power_integral(0.0, 1.0, -1.0)


def test_signed_power_integral_two_exponents():
    a, b = -3.0, 0.5
    ref = sum(integrate.quad(lambda x: abs(x) ** (1.0 if abs(x) <= 1 else 2.0), lo, hi, epsrel=1e-13)[0]
              for lo, hi in [(-3, -1), (-1, 0), (0, 0.5)])
    assert signed_power_integral(a, b, 1.0, 2.0) == pytest.approx(ref, rel=1e-12)
    assert signed_power_integral(-0.5, 0.5, 1.0) == pytest.approx(0.25, rel=1e-15)


@given(a=st.floats(-5, 5), width=st.floats(1e-3, 5), alpha=st.floats(-0.9, 2), beta=st.floats(-0.9, 2),
       cut=st.floats(0.01, 0.99))
@settings(max_examples=60, deadline=None)
def test_signed_power_integral_is_additive(a, width, alpha, beta, cut):
    b = a + width
    c = a + cut * width
    whole = signed_power_integral(a, b, alpha, beta)
    parts = signed_power_integral(a, c, alpha, beta) + signed_power_integral(c, b, alpha, beta)
    assert whole == pytest.approx(parts, rel=1e-11)


def test_graded_rule_error_decays_geometrically():
    errs = []
    for levels in (20, 40, 60):
        x, w = graded_rule_1d(0.0, 1.0, [0.0], levels)
        errs.append(abs(np.dot(w, x**-0.5) - 2.0))
    # the unresolved innermost panel carries ~ 2^{-L/2}
    assert errs[1] / errs[0] == pytest.approx(2.0**-10, rel=0.05)
    assert errs[2] < 1e-10


def test_aitken_is_exact_on_geometric_sequences():
    seq = [1.0 - 0.5**k for k in range(5)]
    assert aitken(seq)[0] == pytest.approx(1.0, abs=1e-15)


def test_tensor_graded_singular_corner():
    val, err = tensor_graded(lambda p: np.linalg.norm(p, axis=1) ** -1.0, [0.0, 0.0], [1.0, 1.0],
                             [[0.0], [0.0]], tol=1e-9)
    assert val == pytest.approx(2.0 * math.asinh(1.0), rel=1e-9)


def test_tensor_graded_reports_failure():
    # 1/x diverges logarithmically: refinement never settles
    with pytest.raises(QuadratureFailure):
        tensor_graded(lambda p: 1.0 / p[:, 0], [0.0], [1.0], [[0.0]])


def test_arc_measure_full_and_quadrant():
    assert arc_measure(np.array([0.5]), -1, 1, -1, 1)[0] == pytest.approx(2 * math.pi)
    assert arc_measure(np.array([0.5]), 0, 1, 0, 1)[0] == pytest.approx(0.5 * math.pi)
    # chord cut by x >= 0.25 on the circle of radius 0.5
    assert arc_measure(np.array([0.5]), 0.25, 1, -1, 1)[0] == pytest.approx(2 * math.acos(0.5))


def _opts(points):
    out = {"limit": 200, "epsrel": 1e-11, "epsabs": 0}
    if points:
        out["points"] = points
    return out


def _dblquad_unit_circle(f, x0, x1, y0, y1):
    """Nested adaptive quad with the unit circle's crossings passed as breakpoints."""
    def inner_opts(x):
        pts = [] if abs(x) >= 1 else [math.sqrt(1 - x * x), -math.sqrt(1 - x * x)]
        return _opts([p for p in pts if y0 < p < y1])

    outer = _opts([p for p in (-1.0, 1.0) if x0 < p < x1])
    return integrate.nquad(lambda y, x: f(x, y), [[y0, y1], [x0, x1]], opts=[inner_opts, outer])[0]


@pytest.mark.parametrize("box", [(0.2, 0.9, -0.3, 0.4), (0.7, 0.72, 0.7, 0.72), (-1.5, 2.0, 0.1, 0.3)])
def test_radial_box_integral_against_nested_quad(box):
    x0, x1, y0, y1 = box

    def prof(r):
        return np.abs(r - 1.0) ** 0.5

    val, _ = radial_box_integral(prof, (x0, y0), (x1, y1), breaks=(1.0,), power_points=((1.0, 0.5, 1.0),))
    ref = _dblquad_unit_circle(lambda x, y: abs(math.hypot(x, y) - 1.0) ** 0.5, x0, x1, y0, y1)
    assert val == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("g", [-1.5, -0.5, 0.5, 1.0, 3.0])
@pytest.mark.parametrize("box", [((-1, -1), (1, 1)), ((0.1, -0.2), (0.4, 0.3)), ((-3, 0.5), (2, 4))])
def test_planar_power_box_matches_radial_route(g, box):
    lo, hi = box
    exact = planar_power_box(np.array(lo, float), np.array(hi, float), g)
    quad, _ = radial_box_integral(lambda r: r**g, lo, hi, origin_power=(g, 1.0), power_points=((0.0, g, 1.0),))
    assert exact == pytest.approx(quad, rel=1e-10)


def test_planar_power_box_unit_disk_free_case():
    # |x|^0 integrates to the area
    assert planar_power_box(np.array([-1.0, -2.0]), np.array([3.0, 0.5]), 0.0) == pytest.approx(10.0, rel=1e-14)
    with pytest.raises(NonIntegrableWeight):
        planar_power_box(np.zeros(2), np.ones(2), -2.0)
