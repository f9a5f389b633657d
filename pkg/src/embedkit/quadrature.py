"""Quadrature for integrands with known power-type singularities.

Two engines live here:

* ``tensor_graded`` integrates over an axis-parallel box using a tensor
  product of one-dimensional Gauss-Legendre rules whose panels are refined
  geometrically (ratio 1/2) toward given singular coordinates.  The depth
  of the refinement is increased in steps and the sequence of results is
  extrapolated with Aitken's delta-squared process, which is exact for the
  geometric error decay produced by an unresolved power singularity.
* ``radial_box_integral`` handles planar integrands of the form
  ``g(|x - c|)`` by integrating the radial profile against the length of
  the circle ``|x - c| = r`` that lies inside the box.  That length is known
  in closed form, so only a one-dimensional integral remains.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import special

from .errors import NonIntegrableWeight, QuadratureFailure

DEFAULT_TOL = 1e-8
DEFAULT_LEVELS = 20
ORDER = 16


@functools.lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``n``-point Gauss-Legendre rule on [0, 1]."""
    x, w = leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def power_integral(u, v, e):
    """``int_u^v t**e dt`` for ``0 <= u <= v``, vectorized and cancellation-free.

    Raises :class:`NonIntegrableWeight` when ``u == 0`` and ``e <= -1``.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    e = float(e)
    u, v = np.broadcast_arrays(u, v)
    out = np.zeros(u.shape)
    e1 = e + 1.0
    zero = (u == 0.0) & (v > 0.0)
    if np.any(zero):
        if e1 <= 0.0:
            raise NonIntegrableWeight(f"t**{e} is not integrable at 0")
        out[zero] = v[zero] ** e1 / e1
    pos = (u > 0.0) & (v > u)
    if np.any(pos):
        uu, vv = u[pos], v[pos]
        lr = np.log(vv / uu)
        if e1 == 0.0:
            out[pos] = lr
        else:
            out[pos] = uu**e1 * np.expm1(e1 * lr) / e1
    return out


def signed_power_integral(a, b, alpha, beta=None, knee=1.0):
    """``int_a^b w(x) dx`` for ``w(x) = |x|**alpha`` (``|x| <= knee``), ``|x|**beta`` beyond.

    Works elementwise on arrays with ``a <= b``; ``knee`` is the radius where the
    exponent switches (1 for the two-exponent radial weights).
    """
    if beta is None:
        beta = alpha
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    total = np.zeros(a.shape)
    # (lo, hi, exponent, mirrored)
    regions = ((-np.inf, -knee, beta), (-knee, 0.0, alpha), (0.0, knee, alpha), (knee, np.inf, beta))
    for lo, hi, e in regions:
        u = np.maximum(a, lo)
        v = np.minimum(b, hi)
        live = v > u
        if not np.any(live):
            continue
        uu, vv = u[live], v[live]
        if hi <= 0.0:
            uu, vv = -vv, -uu
        total[live] += power_integral(uu, vv, e)
    return total


# --------------------------------------------------------------------------
# graded tensor-product engine
# --------------------------------------------------------------------------

def _panels_toward(u, v, s, levels):
    """Panel endpoints on [u, v] refined geometrically toward ``s <= u``."""
    length = v - u
    gap = u - s
    if gap >= length:
        return [u, v]
    pts = [v]
    if gap <= 0.0:
        step = length
        floor = 64.0 * np.spacing(abs(u)) if u != 0.0 else 0.0
        for _ in range(levels):
            step *= 0.5
            if step <= floor:
                break
            pts.append(u + step)
        pts.append(u)
    else:
        dist = length + gap
        while dist * 0.5 > gap:
            dist *= 0.5
            pts.append(s + dist)
        pts.append(u)
    return sorted(set(pts))


def _panels_toward_right(u, v, s, levels):
    edges = sorted(u + v - t for t in _panels_toward(u, v, u + v - s, levels))
    edges[0], edges[-1] = u, v  # reflection can move the ends by an ulp
    return edges


def graded_rule_1d(a, b, singular, levels, order=ORDER):
    """Composite Gauss-Legendre rule on [a, b] graded toward ``singular`` coordinates."""
    a, b = float(a), float(b)
    if not b > a:
        raise ValueError("empty interval")
    sing = sorted({float(s) for s in singular})
    cuts = [a, *[s for s in sing if a < s < b], b]
    edges = []
    for u, v in zip(cuts[:-1], cuts[1:]):
        left = max((s for s in sing if s <= u), default=-math.inf)
        right = min((s for s in sing if s >= v), default=math.inf)
        near_l = u - left < v - u
        near_r = right - v < v - u
        if near_l and near_r:
            mid = 0.5 * (u + v)
            edges.extend(_panels_toward(u, mid, left, levels))
            edges.extend(_panels_toward_right(mid, v, right, levels))
        elif near_l:
            edges.extend(_panels_toward(u, v, left, levels))
        elif near_r:
            edges.extend(_panels_toward_right(u, v, right, levels))
        else:
            edges.extend([u, v])
    edges = np.unique(np.asarray(edges))
    x0, w0 = gauss_legendre(order)
    lo, hi = edges[:-1], edges[1:]
    h = hi - lo
    nodes = (lo[:, None] + h[:, None] * x0[None, :]).ravel()
    weights = (h[:, None] * w0[None, :]).ravel()
    return nodes, weights


def _tensor_sum(f, rules, max_chunk=2_000_000):
    d = len(rules)
    if d == 1:
        x, w = rules[0]
        return float(np.dot(f(x[:, None]), w))
    first_x, first_w = rules[0]
    rest = np.meshgrid(*[r[0] for r in rules[1:]], indexing="ij")
    rest = np.stack([g.ravel() for g in rest], axis=-1)
    rest_w = functools.reduce(np.multiply.outer, [r[1] for r in rules[1:]]).ravel()
    per = max(1, max_chunk // max(1, rest.shape[0]))
    total = 0.0
    for start in range(0, first_x.size, per):
        xs = first_x[start:start + per]
        ws = first_w[start:start + per]
        pts = np.empty((xs.size, rest.shape[0], d))
        pts[:, :, 0] = xs[:, None]
        pts[:, :, 1:] = rest[None, :, :]
        vals = f(pts.reshape(-1, d)).reshape(xs.size, rest.shape[0])
        total += float(ws @ (vals @ rest_w))
    return total


def aitken(values):
    """Aitken-extrapolated limit of ``values`` and an error estimate."""
    v = [float(x) for x in values]
    if len(v) < 3:
        return v[-1], abs(v[-1] - v[-2]) if len(v) > 1 else math.inf

    def one(v0, v1, v2):
        d0, d1 = v1 - v0, v2 - v1
        if d1 == 0.0:
            return v2
        if d0 == 0.0:
            return v2
        r = d1 / d0
        if not 0.0 < r < 1.0:
            return v2
        return v2 + d1 * r / (1.0 - r)

    best = one(*v[-3:])
    if len(v) >= 4:
        prev = one(*v[-4:-1])
        err = abs(best - prev)
    else:
        err = abs(v[-1] - v[-2])
    return best, err


def tensor_graded(f, lo, hi, singular_coords, tol=DEFAULT_TOL, max_levels=DEFAULT_LEVELS,
                  order=None):
    """Integrate ``f`` over the box ``[lo, hi]`` with graded tensor Gauss-Legendre.

    ``f`` maps an ``(n, d)`` array of points to ``n`` values.  ``singular_coords[i]``
    lists coordinates on axis ``i`` toward which panels are refined.

    Returns ``(value, error_estimate)``; raises :class:`QuadratureFailure` when the
    relative error estimate stays above ``tol`` at ``max_levels``.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    d = lo.size
    if order is None:
        order = {1: 16, 2: 16}.get(d, 8)
    step = 4
    levels = list(range(max_levels - 3 * step, max_levels + 1, step))
    levels = [L for L in levels if L >= 2] or [max_levels]
    values = []
    for L in levels:
        rules = [graded_rule_1d(lo[i], hi[i], singular_coords[i], L, order) for i in range(d)]
        values.append(_tensor_sum(f, rules))
    value, err = aitken(values)
    if not np.isfinite(value):
        raise QuadratureFailure("non-finite quadrature value")
    if err > tol * abs(value) and err > 1e-300:
        raise QuadratureFailure(
            f"error estimate {err:.3e} exceeds tolerance {tol:.1e} (value {value:.6e})")
    return value, err


# --------------------------------------------------------------------------
# planar radial engine
# --------------------------------------------------------------------------

def _acos_ratio(x, r):
    """``arccos(clip(x / r, -1, 1))`` computed without loss near +-1."""
    x = np.broadcast_to(np.asarray(x, dtype=float), np.shape(r))
    rr = np.asarray(r, dtype=float)
    s2 = np.maximum((rr - x) * (rr + x), 0.0)
    out = np.arctan2(np.sqrt(s2), x)
    out = np.where(x >= rr, 0.0, out)
    out = np.where(x <= -rr, math.pi, out)
    return out


def _overlap(s1, e1, s2, e2):
    total = 0.0
    for k in (-1.0, 0.0, 1.0):
        sh = 2.0 * math.pi * k
        total = total + np.maximum(0.0, np.minimum(e1, e2 + sh) - np.maximum(s1, s2 + sh))
    return total


def arc_measure(r, x0, x1, y0, y1):
    """Angular measure of ``{theta : (r cos theta, r sin theta) in [x0,x1]x[y0,y1]}``."""
    r = np.asarray(r, dtype=float)
    A = _acos_ratio(x1, r)
    B = _acos_ratio(x0, r)
    C = _acos_ratio(y1, r)
    E = _acos_ratio(y0, r)
    half = 0.5 * math.pi
    xs = ((A, B), (-B, -A))
    ys = ((half - E, half - C), (half + C, half + E))
    total = np.zeros(r.shape)
    for xa in xs:
        for ya in ys:
            total = total + _overlap(xa[0], xa[1], ya[0], ya[1])
    return np.minimum(total, 2.0 * math.pi)


def _rule_on(u, v, order, cosine):
    x0, w0 = gauss_legendre(order)
    h = v - u
    if cosine:
        t = 0.5 * (1.0 - np.cos(math.pi * x0))
        jac = 0.5 * math.pi * np.sin(math.pi * x0)
        return u + h * t, h * w0 * jac
    return u + h * x0, h * w0


def _radial_once(profile, box, breaks, power_points, origin_power, order, levels):
    x0, x1, y0, y1 = box
    corners = [math.hypot(a, b) for a in (x0, x1) for b in (y0, y1)]
    rmax = max(corners)
    cx = min(max(0.0, x0), x1)
    cy = min(max(0.0, y0), y1)
    rmin = math.hypot(cx, cy)
    # radii where some box edge line is tangent to the circle: the arc measure has a
    # square-root branch there even when the tangency point lies outside the box
    tangencies = {abs(x0), abs(x1), abs(y0), abs(y1), rmin}
    tang = sorted(t for t in tangencies if rmin <= t <= rmax)
    pts = {rmin, rmax, *corners, *tang, *breaks, *(p[0] for p in power_points)}
    pts = sorted(p for p in pts if rmin <= p <= rmax)
    merged = [pts[0]]
    for p in pts[1:]:
        if p - merged[-1] > 1e-15 * max(1.0, p):
            merged.append(p)
    pts = merged

    def close(a, b):
        return abs(a - b) <= 1e-14 * max(1.0, abs(b))

    def is_tangent(r):
        return any(close(r, t) for t in tang)

    singular = {p[0]: (p[1], p[2]) for p in power_points}
    targets = sorted(set(singular) | set(tang))
    nodes, weights = [], []
    extra = 0.0
    start = 0
    if origin_power is not None and pts[0] == 0.0 and len(pts) > 1:
        # circles of radius r < r1 meet the box in a fixed angular sector
        r1 = pts[1]
        theta0 = float(arc_measure(np.array([0.5 * r1]), x0, x1, y0, y1)[0])
        e, coef = origin_power
        if e + 2.0 <= 0.0:
            raise NonIntegrableWeight("radial power not integrable at the origin")
        extra += coef * theta0 * r1 ** (e + 2.0) / (e + 2.0)
        start = 1

    def graded(a, b, s, toward_left):
        """Edges on [a, b] refined toward target ``s``; power points get full depth."""
        if s is None:
            return [a, b]
        gap = (a - s) if toward_left else (s - b)
        if gap >= b - a:
            return [a, b]
        if gap <= 0.0 and s not in singular:
            return [a, b]  # tangency sitting on the endpoint: cosine rule suffices
        return _panels_toward(a, b, s, levels) if toward_left else _panels_toward_right(a, b, s, levels)

    for u, v in zip(pts[start:-1], pts[start + 1:]):
        # tangencies on the panel ends are absorbed by the cosine rule, so grade toward
        # the nearest target beyond them
        left = max((t for t in targets if (t <= u or close(t, u)) and (t in singular or not close(t, u))),
                   default=None)
        right = min((t for t in targets if (t >= v or close(t, v)) and (t in singular or not close(t, v))),
                    default=None)
        near_l = left is not None and u - left < v - u
        near_r = right is not None and right - v < v - u
        if near_l and near_r:
            mid = 0.5 * (u + v)
            edges = graded(u, mid, left, True)[:-1] + graded(mid, v, right, False)
        elif near_l:
            edges = graded(u, v, left, True)
        elif near_r:
            edges = graded(u, v, right, False)
        else:
            edges = [u, v]
        for pu, pv in zip(edges[:-1], edges[1:]):
            s = pu if pu in singular else (pv if pv in singular else None)
            if s is not None and (s == u or s == v):
                gamma, coef = singular[s]
                if gamma + 1.0 <= 0.0:
                    raise NonIntegrableWeight("power singularity is not integrable")
                # innermost graded piece: integrate c |r - s|^gamma against frozen r * theta(r)
                eps = pv - pu
                mid = 0.5 * (pu + pv)
                theta = float(arc_measure(np.array([mid]), x0, x1, y0, y1)[0])
                extra += coef * mid * theta * eps ** (gamma + 1.0) / (gamma + 1.0)
                continue
            nx, nw = _rule_on(pu, pv, order, is_tangent(pu) or is_tangent(pv))
            nodes.append(nx)
            weights.append(nw)
    if nodes:
        r = np.concatenate(nodes)
        w = np.concatenate(weights)
        vals = profile(r) * r * arc_measure(r, x0, x1, y0, y1)
        extra += float(np.dot(vals, w))
    return extra


def radial_box_integral(profile, lo, hi, center=(0.0, 0.0), breaks=(), power_points=(),
                        origin_power=None, tol=DEFAULT_TOL, levels=48):
    """Integrate ``g(|x - center|)`` over the planar box ``[lo, hi]``.

    ``profile`` is the vectorized radial function ``g``.  ``breaks`` are radii where
    ``g`` is not smooth; ``power_points`` are triples ``(r0, gamma, c)`` with
    ``g(r) ~ c * |r - r0|**gamma`` near ``r0``.  ``origin_power = (alpha, c)`` declares
    ``g(r) = c * r**alpha`` on the first panel next to ``r = 0``.

    Returns ``(value, error_estimate)``.
    """
    box = (lo[0] - center[0], hi[0] - center[0], lo[1] - center[1], hi[1] - center[1])
    fine = _radial_once(profile, box, breaks, power_points, origin_power, 24, levels)
    coarse = _radial_once(profile, box, breaks, power_points, origin_power, 16, levels - 8)
    err = abs(fine - coarse)
    if not np.isfinite(fine):
        raise QuadratureFailure("non-finite quadrature value")
    if err > tol * abs(fine) and err > 1e-300:
        raise QuadratureFailure(
            f"radial quadrature error {err:.3e} exceeds tolerance {tol:.1e} (value {fine:.6e})")
    return fine, err


def _quadrant_power(a, b, g):
    """``int_0^a int_0^b |x|^g dy dx`` for ``a, b >= 0`` in the plane."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.zeros(np.broadcast(a, b).shape)
    ok = (a > 0) & (b > 0)
    a, b = np.broadcast_to(a, out.shape)[ok], np.broadcast_to(b, out.shape)[ok]

    def tri(u, v):
        # triangle under the ray through (u, v): r from 0 to u / cos(theta)
        t = v / u
        return u ** (g + 2.0) / (g + 2.0) * t * special.hyp2f1(-0.5 * g, 0.5, 1.5, -t * t)

    out[ok] = tri(a, b) + tri(b, a)
    return out


def planar_power_box(lo, hi, g):
    """Exact ``int_box |x|^g dx`` for planar boxes ``[lo, hi]`` (arrays of shape (..., 2)), ``g > -2``.

    Uses inclusion-exclusion over quadrant rectangles anchored at the origin, so it
    loses relative accuracy for small boxes far from the origin.
    """
    if g <= -2.0:
        raise NonIntegrableWeight("|x|^g with g <= -2 is not locally integrable in the plane")
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)

    def F(x, y):
        return np.sign(x) * np.sign(y) * _quadrant_power(np.abs(x), np.abs(y), g)

    x0, y0, x1, y1 = lo[..., 0], lo[..., 1], hi[..., 0], hi[..., 1]
    return F(x1, y1) - F(x0, y1) - F(x1, y0) + F(x0, y0)
