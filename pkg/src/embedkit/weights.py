"""Weights on R^d: pointwise values, weighted cube measures and A_p diagnostics.

The catalog covers the power-type families whose embedding behaviour is known in
closed form (radial powers with separate exponents at the origin and at infinity,
radial powers in the first ``n`` coordinates, products of block powers, powers of
the distance to a sphere or a circle) plus user supplied ``Custom`` weights.

Every weight is an immutable, hashable dataclass so measures can be cached.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import quadrature as quad
from .dyadic import Box, DyadicCube, SlopeFit, as_box, fit_log_slope, FLAT_SLOPE
from .errors import NonIntegrableDual, NonIntegrableWeight, QuadratureFailure, SingularPoint, SpecError

BOUNDARY_EPS = 1e-9
DEFAULT_TOL = quad.DEFAULT_TOL


# --------------------------------------------------------------------------
# manifolds for distance weights
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Sphere:
    """Sphere ``|x - center| = radius`` in R^d (codimension 1)."""

    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in np.atleast_1d(self.center)))
        if not self.radius > 0:
            raise SpecError("sphere radius must be positive")
        if len(self.center) < 2:
            raise SpecError("a sphere needs d >= 2")

    @property
    def d(self) -> int:
        return len(self.center)

    codim = 1

    def distance(self, x):
        x = np.asarray(x, dtype=float)
        return np.abs(np.linalg.norm(x - np.asarray(self.center), axis=-1) - self.radius)

    def points(self):
        c = np.asarray(self.center)
        out = []
        for i in range(self.d):
            e = np.zeros(self.d)
            e[i] = self.radius
            out.append(tuple(c + e))
        return out

    def touches(self, lo, hi) -> bool:
        c = np.asarray(self.center)
        near = np.clip(c, lo, hi)
        far = np.where(np.abs(lo - c) > np.abs(hi - c), lo, hi)
        return np.linalg.norm(near - c) <= self.radius <= np.linalg.norm(far - c)

    def to_dict(self):
        return {"shape": "sphere", "center": list(self.center), "radius": self.radius}


@dataclass(frozen=True)
class Circle3D:
    """Circle of given radius around ``center`` in the plane orthogonal to ``normal`` (R^3, codimension 2)."""

    center: tuple
    radius: float
    normal: tuple = (0.0, 0.0, 1.0)

    def __post_init__(self):
        c = tuple(float(v) for v in self.center)
        n = np.asarray(self.normal, dtype=float)
        if len(c) != 3 or n.size != 3:
            raise SpecError("circle3d lives in R^3")
        if not self.radius > 0 or not np.linalg.norm(n) > 0:
            raise SpecError("circle3d needs a positive radius and a nonzero normal")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "normal", tuple(n / np.linalg.norm(n)))

    d = 3
    codim = 2

    def distance(self, x):
        v = np.asarray(x, dtype=float) - np.asarray(self.center)
        n = np.asarray(self.normal)
        z = v @ n
        rho = np.linalg.norm(v - z[..., None] * n, axis=-1)
        return np.hypot(rho - self.radius, z)

    def _basis(self):
        n = np.asarray(self.normal)
        a = np.eye(3)[np.argmin(np.abs(n))]
        u = np.cross(n, a)
        u /= np.linalg.norm(u)
        return u, np.cross(n, u)

    def points(self):
        u, v = self._basis()
        c = np.asarray(self.center)
        return [tuple(c + self.radius * u), tuple(c + self.radius * v)]

    def touches(self, lo, hi) -> bool:
        u, v = self._basis()
        t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        pts = np.asarray(self.center) + self.radius * (np.outer(np.cos(t), u) + np.outer(np.sin(t), v))
        h = float(np.max(np.subtract(hi, lo)))
        tol = 2 * np.pi * self.radius / 4096
        return bool(np.any(np.all((pts >= np.asarray(lo) - tol) & (pts <= np.asarray(hi) + tol), axis=1))) or h < 0

    def to_dict(self):
        return {"shape": "circle3d", "center": list(self.center), "radius": self.radius,
                "normal": list(self.normal)}


# --------------------------------------------------------------------------
# measure results
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureResult:
    """``w(Q)`` together with the path that produced it."""

    value: float
    path: str  # "exact" or "quadrature"
    error: float = 0.0

    def __float__(self):
        return self.value


# --------------------------------------------------------------------------
# weight families
# --------------------------------------------------------------------------

class Weight:
    """Common behaviour of all weight families.

    Subclasses provide ``d``, ``scale``, ``values`` and the integration hooks.
    """

    family: str = ""
    exact_vectorized = False

    # pointwise ---------------------------------------------------------
    def values(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        return eval_weight(self, x)

    # algebra -----------------------------------------------------------
    def power(self, t: float) -> "Weight":
        return Custom(self.d, _PowerFunc(self, t), **self._singular_kw(), name=f"({self.family})^{t}")

    def scaled(self, c: float) -> "Weight":
        return replace(self, scale=self.scale * c)

    # singular structure ------------------------------------------------
    def _singular_kw(self) -> dict:
        return {}

    def anchors(self) -> list:
        return [tuple([0.0] * self.d)]

    def singular_coords(self) -> list:
        return [[0.0]] * self.d

    @property
    def homogeneity(self):
        """Degree ``g`` with ``w(2^{-nu} x) = 2^{-nu g} w(x)``, or ``None``."""
        return None

    # integration -------------------------------------------------------
    def has_exact(self) -> bool:
        return False

    def exact_on(self, lo, hi) -> bool:
        """Whether the antiderivative path applies to the box ``[lo, hi]``."""
        return self.has_exact()

    def _exact(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_integrable(self, lo, hi):
        pass

    def _quadrature(self, lo, hi, tol):
        f = lambda pts: self.values(pts)
        return quad.tensor_graded(f, lo, hi, self.singular_coords(), tol=tol)

    def to_dict(self) -> dict:
        raise NotImplementedError


class _PowerFunc:
    """Picklable pointwise ``w**t``."""

    def __init__(self, base, t):
        self.base, self.t = base, float(t)

    def __call__(self, x):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self.base.values(x) ** self.t

    def __eq__(self, other):
        return isinstance(other, _PowerFunc) and (self.base, self.t) == (other.base, other.t)

    def __hash__(self):
        return hash((self.base, self.t))


class _ProductFunc:
    def __init__(self, factors):
        self.factors = tuple(factors)

    def __call__(self, x):
        out = np.ones(np.shape(x)[0])
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for w in self.factors:
                out = out * w.values(x)
        return out

    def __eq__(self, other):
        return isinstance(other, _ProductFunc) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)


def _radial_profile(alpha, beta, scale):
    def g(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return scale * np.where(r <= 1.0, r**alpha, r**beta)
    return g


@dataclass(frozen=True)
class Constant(Weight):
    d: int
    c: float = 1.0

    family = "constant"
    exact_vectorized = True

    def __post_init__(self):
        if self.d < 1 or not self.c > 0:
            raise SpecError("constant weight needs d >= 1 and c > 0")

    @property
    def scale(self):
        return self.c

    def scaled(self, c):
        return Constant(self.d, self.c * c)

    def values(self, x):
        return np.full(np.shape(x)[0], self.c)

    def power(self, t):
        return Constant(self.d, self.c**t)

    @property
    def homogeneity(self):
        return 0.0

    def anchors(self):
        return []

    def singular_coords(self):
        return [[]] * self.d

    def has_exact(self):
        return True

    def _exact(self, lo, hi):
        return self.c * np.prod(hi - lo, axis=-1)

    def to_dict(self):
        return {"family": "constant", "d": self.d, "c": self.c}


@dataclass(frozen=True)
class RadialPower(Weight):
    """``scale * |x|^alpha`` for ``|x| <= 1`` and ``scale * |x|^beta`` beyond."""

    d: int
    alpha: float
    beta: float
    scale: float = 1.0
    check: bool = field(default=True, compare=False, repr=False)

    family = "radial_power"

    def __post_init__(self):
        if self.d < 1 or not self.scale > 0:
            raise SpecError("radial power needs d >= 1 and a positive scale")
        if self.check and not (self.alpha > -self.d and self.beta > -self.d):
            raise SpecError(f"radial power exponents must exceed -d = {-self.d}")

    @property
    def exact_vectorized(self):
        return self.d == 1

    def values(self, x):
        r = np.linalg.norm(np.asarray(x, dtype=float).reshape(-1, self.d), axis=-1)
        return _radial_profile(self.alpha, self.beta, self.scale)(r)

    def power(self, t):
        return RadialPower(self.d, self.alpha * t, self.beta * t, self.scale**t, check=False)

    @property
    def homogeneity(self):
        return self.alpha if self.alpha == self.beta else None

    def singular_coords(self):
        if self.d == 1:
            return [[0.0, -1.0, 1.0]]
        return [[0.0]] * self.d

    def has_exact(self):
        return self.d == 1

    def _planar_exponent(self, lo, hi):
        corners = [math.hypot(a, b) for a in (lo[0], hi[0]) for b in (lo[1], hi[1])]
        rmin = math.hypot(min(max(0.0, lo[0]), hi[0]), min(max(0.0, lo[1]), hi[1]))
        if rmin > 4.0 * max(hi[0] - lo[0], hi[1] - lo[1]):
            return None  # inclusion-exclusion would cancel badly
        if self.alpha == self.beta or max(corners) <= 1.0:
            return self.alpha
        if rmin >= 1.0:
            return self.beta
        return None

    def exact_on(self, lo, hi):
        return self.d == 1 or (self.d == 2 and self._planar_exponent(lo, hi) is not None)

    def _exact(self, lo, hi):
        if self.d == 2:
            g = self._planar_exponent(lo.reshape(-1)[:2], hi.reshape(-1)[:2])
            return self.scale * quad.planar_power_box(lo, hi, g)
        return self.scale * quad.signed_power_integral(lo[..., 0], hi[..., 0], self.alpha, self.beta)

    def _check_integrable(self, lo, hi):
        if self.alpha <= -self.d and np.all(lo <= 0.0) and np.all(hi >= 0.0):
            raise NonIntegrableWeight(f"|x|^{self.alpha} is not integrable at 0 in d={self.d}")

    def _quadrature(self, lo, hi, tol):
        if self.d == 2:
            return quad.radial_box_integral(
                _radial_profile(self.alpha, self.beta, self.scale), lo, hi,
                breaks=(1.0,), power_points=((0.0, self.alpha, self.scale),),
                origin_power=(self.alpha, self.scale), tol=tol)
        return super()._quadrature(lo, hi, tol)

    def to_dict(self):
        return {"family": "radial_power", "d": self.d, "alpha": self.alpha, "beta": self.beta,
                **({"scale": self.scale} if self.scale != 1.0 else {})}


@dataclass(frozen=True)
class PartialRadialPower(Weight):
    """Radial two-exponent power of the first ``n`` coordinates, constant in the last ``k``."""

    n: int
    k: int
    alpha: float
    beta: float
    scale: float = 1.0
    check: bool = field(default=True, compare=False, repr=False)

    family = "partial_radial_power"

    def __post_init__(self):
        if self.n < 1 or self.k < 1 or not self.scale > 0:
            raise SpecError("partial radial power needs n, k >= 1 and a positive scale")
        if self.check and not (self.alpha > -self.n and self.beta > -self.n):
            raise SpecError(f"partial radial power exponents must exceed -n = {-self.n}")

    @property
    def d(self):
        return self.n + self.k

    @property
    def exact_vectorized(self):
        return self.n == 1

    @property
    def base(self) -> RadialPower:
        return RadialPower(self.n, self.alpha, self.beta, self.scale, check=False)

    def values(self, x):
        x = np.asarray(x, dtype=float).reshape(-1, self.d)
        return self.base.values(x[:, : self.n])

    def power(self, t):
        return PartialRadialPower(self.n, self.k, self.alpha * t, self.beta * t, self.scale**t, check=False)

    @property
    def homogeneity(self):
        return self.alpha if self.alpha == self.beta else None

    def anchors(self):
        pts = [tuple([0.0] * self.d)]
        pts.append(tuple([0.0] * self.n + [1.0] + [0.0] * (self.k - 1)))
        return pts

    def singular_coords(self):
        return self.base.singular_coords() + [[]] * self.k

    def has_exact(self):
        return self.n == 1

    def _exact(self, lo, hi):
        head = self.base._exact(lo[..., : self.n], hi[..., : self.n])
        return head * np.prod(hi[..., self.n:] - lo[..., self.n:], axis=-1)

    def _check_integrable(self, lo, hi):
        self.base._check_integrable(lo[: self.n], hi[: self.n])

    def _quadrature(self, lo, hi, tol):
        v, e = _measure_value(self.base, tuple(lo[: self.n]), tuple(hi[: self.n]), tol, "auto")
        vol = float(np.prod(hi[self.n:] - lo[self.n:]))
        return v * vol, e * vol

    def to_dict(self):
        return {"family": "partial_radial_power", "d": self.d, "n": self.n, "k": self.k,
                "alpha": self.alpha, "beta": self.beta,
                **({"scale": self.scale} if self.scale != 1.0 else {})}


@dataclass(frozen=True)
class ProductPower(Weight):
    """``scale * prod_j |pi_j x|^{alpha_j}`` over coordinate blocks of sizes ``dims``."""

    dims: tuple
    alphas: tuple
    scale: float = 1.0
    check: bool = field(default=True, compare=False, repr=False)

    family = "product_power"

    def __post_init__(self):
        dims = tuple(int(v) for v in self.dims)
        alphas = tuple(float(v) for v in self.alphas)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "alphas", alphas)
        if len(dims) != len(alphas) or not dims or min(dims) < 1 or not self.scale > 0:
            raise SpecError("product power needs matching positive block dims and exponents")
        if self.check and any(a <= -dj for a, dj in zip(alphas, dims)):
            raise SpecError("product power exponents must satisfy alpha_j > -d_j")

    @property
    def d(self):
        return sum(self.dims)

    @property
    def exact_vectorized(self):
        return all(dj == 1 for dj in self.dims)

    def _slices(self):
        start = 0
        for dj in self.dims:
            yield slice(start, start + dj)
            start += dj

    def blocks(self):
        return [RadialPower(dj, a, a, check=False) for dj, a in zip(self.dims, self.alphas)]

    def values(self, x):
        x = np.asarray(x, dtype=float).reshape(-1, self.d)
        out = np.full(x.shape[0], self.scale)
        for sl, w in zip(self._slices(), self.blocks()):
            out = out * w.values(x[:, sl])
        return out

    def power(self, t):
        return ProductPower(self.dims, tuple(a * t for a in self.alphas), self.scale**t, check=False)

    @property
    def homogeneity(self):
        return float(sum(self.alphas))

    def anchors(self):
        pts = [tuple([0.0] * self.d)]
        if len(self.dims) > 1:
            for sl in self._slices():
                p = np.ones(self.d)
                p[sl] = 0.0
                pts.append(tuple(p))
        return pts

    def has_exact(self):
        return self.exact_vectorized

    def _exact(self, lo, hi):
        out = np.full(np.shape(lo)[:-1], self.scale)
        for sl, w in zip(self._slices(), self.blocks()):
            out = out * w._exact(lo[..., sl], hi[..., sl])
        return out

    def _check_integrable(self, lo, hi):
        for sl, w in zip(self._slices(), self.blocks()):
            w._check_integrable(lo[sl], hi[sl])

    def _quadrature(self, lo, hi, tol):
        val, err = self.scale, 0.0
        for sl, w in zip(self._slices(), self.blocks()):
            v, e = _measure_value(w, tuple(lo[sl]), tuple(hi[sl]), tol, "auto")
            err = err * v + e * val
            val *= v
        return val, err

    def to_dict(self):
        return {"family": "product_power", "d": self.d, "dims": list(self.dims), "alphas": list(self.alphas),
                **({"scale": self.scale} if self.scale != 1.0 else {})}


@dataclass(frozen=True)
class DistancePower(Weight):
    """``scale * dist(x, manifold)^gamma``."""

    manifold: object
    gamma: float
    scale: float = 1.0
    check: bool = field(default=True, compare=False, repr=False)

    family = "distance_power"

    def __post_init__(self):
        if not self.scale > 0:
            raise SpecError("distance power needs a positive scale")
        k = self.manifold.codim
        if not 1 <= k <= self.manifold.d - 1:
            raise SpecError("manifold codimension must lie in [1, d-1]")
        if self.check and not self.gamma > -k:
            raise SpecError(f"distance power exponent must exceed -k = {-k}")

    @property
    def d(self):
        return self.manifold.d

    @property
    def k(self):
        return self.manifold.codim

    def values(self, x):
        x = np.asarray(x, dtype=float).reshape(-1, self.d)
        with np.errstate(divide="ignore"):
            return self.scale * self.manifold.distance(x) ** self.gamma

    def power(self, t):
        return DistancePower(self.manifold, self.gamma * t, self.scale**t, check=False)

    def anchors(self):
        return list(self.manifold.points())

    def singular_coords(self):
        c = self.manifold.center
        r = self.manifold.radius
        return [[ci - r, ci, ci + r] for ci in c]

    def _check_integrable(self, lo, hi):
        if self.gamma <= -self.k and self.manifold.touches(lo, hi):
            raise NonIntegrableWeight(f"dist^{self.gamma} is not integrable across a codim-{self.k} set")

    def _quadrature(self, lo, hi, tol):
        m = self.manifold
        if isinstance(m, Sphere) and m.d == 2:
            R, g, s = m.radius, self.gamma, self.scale
            prof = lambda r: s * np.abs(np.asarray(r) - R) ** g
            return quad.radial_box_integral(prof, lo, hi, center=m.center,
                                            power_points=((R, g, s),), tol=tol)
        return super()._quadrature(lo, hi, tol)

    def to_dict(self):
        return {"family": "distance_power", "d": self.d, "manifold": self.manifold.to_dict(),
                "gamma": self.gamma, **({"scale": self.scale} if self.scale != 1.0 else {})}


@dataclass(frozen=True)
class Custom(Weight):
    """User weight given by a vectorized callable on ``(n, d)`` arrays.

    The singular set must be declared as points, spheres ``(center, radius)`` and
    coordinate hyperplanes ``(axis, offset)`` so quadrature can refine toward it.
    """

    d: int
    func: Callable
    points: tuple = ()
    spheres: tuple = ()
    hyperplanes: tuple = ()
    name: str = "custom"
    scale: float = 1.0

    family = "custom"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(tuple(float(c) for c in p) for p in self.points))
        object.__setattr__(self, "spheres", tuple((tuple(float(c) for c in s[0]), float(s[1])) for s in self.spheres))
        object.__setattr__(self, "hyperplanes", tuple((int(a), float(o)) for a, o in self.hyperplanes))

    def values(self, x):
        x = np.asarray(x, dtype=float).reshape(-1, self.d)
        return self.scale * np.asarray(self.func(x), dtype=float)

    def _singular_kw(self):
        return {"points": self.points, "spheres": self.spheres, "hyperplanes": self.hyperplanes}

    def power(self, t):
        return Custom(self.d, _PowerFunc(self, t), **self._singular_kw(), name=f"({self.name})^{t}")

    def anchors(self):
        pts = list(self.points)
        for c, r in self.spheres:
            p = list(c)
            p[0] += r
            pts.append(tuple(p))
        for axis, off in self.hyperplanes:
            p = [0.0] * self.d
            p[axis] = off
            pts.append(tuple(p))
        return pts or [tuple([0.0] * self.d)]

    def singular_coords(self):
        coords = [set() for _ in range(self.d)]
        for p in self.points:
            for i, c in enumerate(p):
                coords[i].add(c)
        for c, r in self.spheres:
            for i, ci in enumerate(c):
                coords[i].update({ci - r, ci, ci + r})
        for axis, off in self.hyperplanes:
            coords[axis].add(off)
        return [sorted(s) for s in coords]

    def to_dict(self):
        raise SpecError("custom weights have no JSON form")


# --------------------------------------------------------------------------
# construction helpers and algebra
# --------------------------------------------------------------------------

def as_catalog(w: Weight, like: Weight | None = None) -> Weight:
    """Rewrite ``Constant`` as the zero-exponent member of ``like``'s family."""
    if not isinstance(w, Constant) or like is None:
        return w
    c = w.c
    if isinstance(like, RadialPower):
        return RadialPower(w.d, 0.0, 0.0, c)
    if isinstance(like, PartialRadialPower):
        return PartialRadialPower(like.n, like.k, 0.0, 0.0, c)
    if isinstance(like, ProductPower):
        return ProductPower(like.dims, (0.0,) * len(like.dims), c)
    if isinstance(like, DistancePower):
        return DistancePower(like.manifold, 0.0, c)
    if isinstance(like, Constant):
        return RadialPower(w.d, 0.0, 0.0, c)
    return w


def multiply(*weights: Weight) -> Weight:
    """Pointwise product, kept inside a catalog family when the factors allow it."""
    ws = [w for w in weights]
    d = ws[0].d
    if any(w.d != d for w in ws):
        raise SpecError("cannot multiply weights of different dimensions")
    consts = [w for w in ws if isinstance(w, Constant)]
    rest = [w for w in ws if not isinstance(w, Constant)]
    c = math.prod(w.c for w in consts)
    if not rest:
        return Constant(d, c)
    head = rest[0]
    if all(type(w) is type(head) for w in rest):
        if isinstance(head, RadialPower):
            return RadialPower(d, sum(w.alpha for w in rest), sum(w.beta for w in rest),
                               c * math.prod(w.scale for w in rest), check=False)
        if isinstance(head, PartialRadialPower) and all((w.n, w.k) == (head.n, head.k) for w in rest):
            return PartialRadialPower(head.n, head.k, sum(w.alpha for w in rest), sum(w.beta for w in rest),
                                      c * math.prod(w.scale for w in rest), check=False)
        if isinstance(head, ProductPower) and all(w.dims == head.dims for w in rest):
            return ProductPower(head.dims, tuple(np.sum([w.alphas for w in rest], axis=0)),
                                c * math.prod(w.scale for w in rest), check=False)
        if isinstance(head, DistancePower) and all(w.manifold == head.manifold for w in rest):
            return DistancePower(head.manifold, sum(w.gamma for w in rest),
                                 c * math.prod(w.scale for w in rest), check=False)
    points, spheres, planes = set(), set(), set()
    for w in rest:
        kw = w._singular_kw() if isinstance(w, Custom) else _declared_singular(w)
        points.update(kw.get("points", ()))
        spheres.update(kw.get("spheres", ()))
        planes.update(kw.get("hyperplanes", ()))
    return Custom(d, _ProductFunc(rest), tuple(sorted(points)), tuple(sorted(spheres)), tuple(sorted(planes)),
                  name="*".join(w.family for w in rest), scale=c)


def _declared_singular(w: Weight) -> dict:
    if isinstance(w, RadialPower):
        return {"points": [tuple([0.0] * w.d)]}
    if isinstance(w, PartialRadialPower):
        return {"hyperplanes": [(i, 0.0) for i in range(w.n)]}
    if isinstance(w, ProductPower):
        return {"hyperplanes": [(i, 0.0) for i in range(w.d)]}
    if isinstance(w, DistancePower) and isinstance(w.manifold, Sphere):
        return {"spheres": [(w.manifold.center, w.manifold.radius)]}
    return {}


def power(w: Weight, t: float) -> Weight:
    return w.power(t)


def from_dict(spec: dict) -> Weight:
    """Build a weight from its JSON description."""
    try:
        fam = spec["family"]
        d = int(spec["d"])
        scale = float(spec.get("scale", 1.0))
        if fam == "constant":
            return Constant(d, float(spec.get("c", scale)))
        if fam == "radial_power":
            return RadialPower(d, float(spec["alpha"]), float(spec["beta"]), scale)
        if fam == "partial_radial_power":
            w = PartialRadialPower(int(spec["n"]), int(spec["k"]), float(spec["alpha"]), float(spec["beta"]), scale)
        elif fam == "product_power":
            w = ProductPower(tuple(spec["dims"]), tuple(spec["alphas"]), scale)
        elif fam == "distance_power":
            m = spec["manifold"]
            if m["shape"] == "sphere":
                man = Sphere(tuple(m["center"]), float(m["radius"]))
            elif m["shape"] == "circle3d":
                man = Circle3D(tuple(m["center"]), float(m["radius"]), tuple(m.get("normal", (0, 0, 1))))
            else:
                raise SpecError(f"unknown manifold shape {m['shape']!r}")
            w = DistancePower(man, float(spec["gamma"]), scale)
        else:
            raise SpecError(f"unknown weight family {fam!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"malformed weight spec: {exc}") from exc
    if w.d != d:
        raise SpecError(f"declared d={d} does not match the family dimension {w.d}")
    return w


# --------------------------------------------------------------------------
# evaluation and measures
# --------------------------------------------------------------------------

def eval_weight(w: Weight, x) -> float:
    """Pointwise value of ``w`` at a single point ``x``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != w.d:
        raise ValueError(f"point has dimension {x.size}, weight has d={w.d}")
    with np.errstate(divide="ignore", invalid="ignore"):
        v = float(w.values(x.reshape(1, -1))[0])
    if not np.isfinite(v) or v <= 0.0:
        raise SingularPoint(f"weight is singular at {tuple(x)}")
    return v


@functools.lru_cache(maxsize=200_000)
def _measure_value(w: Weight, lo: tuple, hi: tuple, tol: float, method: str):
    lo_a, hi_a = np.asarray(lo), np.asarray(hi)
    w._check_integrable(lo_a, hi_a)
    if method != "quadrature" and w.exact_on(lo, hi):
        return float(w._exact(lo_a[None, :], hi_a[None, :])[0]), 0.0
    if method == "exact":
        raise ValueError(f"no exact path for {w.family} in d={w.d}")
    return w._quadrature(lo_a, hi_a, tol)


def cube_measure(w: Weight, cube, tol: float = DEFAULT_TOL, method: str = "auto") -> MeasureResult:
    """``w(Q)``, by antiderivative where the family admits one, else by graded quadrature.

    ``method`` forces ``"exact"`` or ``"quadrature"``; ``"auto"`` prefers exact.
    Raises :class:`QuadratureFailure` when the tolerance cannot be met.
    """
    box = as_box(cube)
    if box.d != w.d:
        raise ValueError(f"cube dimension {box.d} does not match weight dimension {w.d}")
    exact = method != "quadrature" and w.exact_on(box.lo, box.hi)
    v, e = _measure_value(w, box.lo, box.hi, float(tol), "auto" if method == "auto" else method)
    return MeasureResult(v, "exact" if exact else "quadrature", e)


def log2_cube_measures(w: Weight, nu, m, tol: float = DEFAULT_TOL) -> np.ndarray:
    """``log2 w(Q_{nu,m})`` for arrays ``nu`` (M,) and ``m`` (M, d).

    Non-integrable cubes give ``+inf`` (the measure is infinite).
    """
    nu = np.asarray(nu, dtype=int)
    m = np.asarray(m, dtype=float).reshape(nu.size, -1)
    side = np.ldexp(1.0, -nu)[:, None]
    if w.exact_vectorized:
        lo, hi = (m - 0.5) * side, (m + 0.5) * side
        try:
            return np.log2(w._exact(lo, hi))
        except NonIntegrableWeight:
            pass
    out = np.empty(nu.size)
    g = w.homogeneity
    for i in range(nu.size):
        if g is not None:
            base = _log2_single(w, 0, tuple(m[i]), tol)
            out[i] = base - nu[i] * (w.d + g)
        else:
            out[i] = _log2_single(w, int(nu[i]), tuple(m[i]), tol)
    return out


def _log2_single(w, nu, m, tol):
    s = math.ldexp(1.0, -nu)
    lo = tuple((c - 0.5) * s for c in m)
    hi = tuple((c + 0.5) * s for c in m)
    try:
        v, _ = _measure_value(w, lo, hi, tol, "auto")
    except NonIntegrableWeight:
        return math.inf
    return math.log2(v)


# --------------------------------------------------------------------------
# Muckenhoupt machinery
# --------------------------------------------------------------------------

class Membership(str, enum.Enum):
    MEMBER = "Member"
    NONMEMBER = "NonMember"
    BOUNDARY = "Boundary"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class MembershipResult:
    status: Membership
    inferred: bool = False
    margin: float = math.nan

    def __eq__(self, other):
        if isinstance(other, (Membership, str)):
            return self.status == other
        return super().__eq__(other)

    __hash__ = object.__hash__


def _interval_status(values, lo, hi, eps=BOUNDARY_EPS):
    margin = min(min(v - lo, hi - v) for v in values)
    if min(v - lo for v in values) <= eps:
        # at the lower end the weight itself is not locally integrable
        return Membership.NONMEMBER, margin
    if margin > eps:
        return Membership.MEMBER, margin
    if margin < -eps:
        return Membership.NONMEMBER, margin
    return Membership.BOUNDARY, margin


def ap_membership_closed_form(w: Weight, p: float) -> MembershipResult:
    """Catalog rule for ``w in A_p``."""
    if isinstance(w, Constant):
        return MembershipResult(Membership.MEMBER, margin=math.inf)
    if isinstance(w, RadialPower):
        st, mg = _interval_status((w.alpha, w.beta), -w.d, w.d * (p - 1))
        return MembershipResult(st, margin=mg)
    if isinstance(w, PartialRadialPower):
        st, mg = _interval_status((w.alpha, w.beta), -w.n, w.n * (p - 1))
        return MembershipResult(st, inferred=True, margin=mg)
    if isinstance(w, ProductPower):
        results = [_interval_status((a,), -dj, dj * (p - 1)) for a, dj in zip(w.alphas, w.dims)]
        mg = min(r[1] for r in results)
        if any(r[0] is Membership.NONMEMBER for r in results):
            st = Membership.NONMEMBER
        elif any(r[0] is Membership.BOUNDARY for r in results):
            st = Membership.BOUNDARY
        else:
            st = Membership.MEMBER
        return MembershipResult(st, margin=mg)
    if isinstance(w, DistancePower):
        st, mg = _interval_status((w.gamma,), -w.k, w.k * (p - 1))
        return MembershipResult(st, margin=mg)
    return MembershipResult(Membership.UNKNOWN)


def ap_quantity(w: Weight, cube, p: float, tol: float = DEFAULT_TOL) -> float:
    """Averaged product ``(avg_Q w) (avg_Q w^{-1/(p-1)})^{p-1}``."""
    if not 1.0 < p < math.inf:
        raise ValueError("p must lie in (1, inf)")
    box = as_box(cube)
    vol = box.volume
    mw = cube_measure(w, box, tol).value
    dual = w.power(-1.0 / (p - 1.0))
    try:
        md = cube_measure(dual, box, tol).value
    except NonIntegrableWeight as exc:
        raise NonIntegrableDual(str(exc)) from exc
    return (mw / vol) * (md / vol) ** (p - 1.0)


@dataclass(frozen=True)
class ApPolicy:
    """Cube families used to probe ``[w]_{A_p}``.

    ``scales``: centered cubes of side ``2^{-j}``, ``|j| <= scales``, at every anchor.
    ``approach``: unit cubes whose face sits at distance ``2^{-j}``, ``j <= approach``,
    from an anchor along each axis.  Slopes are fitted on the last half of each family.
    """

    scales: int = 60
    approach: int = 60
    offsets: tuple = (0.5, 1.0, 2.0)
    slope_threshold: float = FLAT_SLOPE
    boundary_slope: float = 0.05
    tol: float = DEFAULT_TOL

    @classmethod
    def for_weight(cls, w: Weight, **kw):
        if w.exact_vectorized or isinstance(w, Constant):
            return cls(**kw)
        base = dict(scales=24, approach=40, tol=1e-6)
        base.update(kw)
        return cls(**base)


@dataclass
class ApEstimate:
    p: float
    supremum_value: float
    argmax_cube: Box | None
    growth_slope: float
    classification: Membership
    fits: list = field(default_factory=list)
    samples: int = 0

    def to_dict(self):
        return {"p": self.p, "supremum_value": self.supremum_value,
                "argmax_cube": None if self.argmax_cube is None else
                {"lo": list(self.argmax_cube.lo), "hi": list(self.argmax_cube.hi)},
                "growth_slope": self.growth_slope, "classification": self.classification.value,
                "fits": [f.to_dict() for f in self.fits], "samples": self.samples}


def _ap_or_inf(w, box, p, tol):
    try:
        return ap_quantity(w, box, p, tol)
    except NonIntegrableWeight:
        return math.inf


def _ap_families(w: Weight, policy: ApPolicy):
    d = w.d
    anchors = w.anchors() or [tuple([0.0] * d)]
    fams = []
    for a in anchors:
        a = np.asarray(a, dtype=float)
        small = [(j, Box.cube(a, math.ldexp(1.0, -j))) for j in range(0, policy.scales + 1)]
        large = [(j, Box.cube(a, math.ldexp(1.0, j))) for j in range(0, policy.scales + 1)]
        fams.append((f"small@{tuple(a)}", small))
        fams.append((f"large@{tuple(a)}", large))
        for i in range(d):
            cubes = []
            for j in range(0, policy.approach + 1):
                lo = a - 0.5
                lo[i] = a[i] + math.ldexp(1.0, -j)
                cubes.append((j, Box(tuple(lo), tuple(lo + 1.0))))
            fams.append((f"approach@{tuple(a)}/e{i}", cubes))
    extra = []
    for off in policy.offsets:
        c = np.asarray(anchors[0], dtype=float) + off
        extra.append((0, Box.cube(c, off)))
    fams.append(("translated", extra))
    return fams


def estimate_ap_constant(w: Weight, p: float, policy: ApPolicy | None = None) -> ApEstimate:
    """Empirical sup of the A_p quantity over structured cube families, with growth slopes."""
    if not 1.0 < p < math.inf:
        raise ValueError("p must lie in (1, inf)")
    policy = policy or ApPolicy.for_weight(w)
    best, arg, count = 1.0, None, 0
    infinite = False
    families = []
    for label, cubes in _ap_families(w, policy):
        vals = []
        for j, box in cubes:
            q = _ap_or_inf(w, box, p, policy.tol)
            count += 1
            vals.append((j, q))
            if q >= best:
                best, arg = q, box
            if not math.isfinite(q):
                infinite = True
        finite = [(j, math.log2(q)) for j, q in vals if math.isfinite(q)]
        families.append((label, finite))
    fits, growth = [], 0.0
    for label, finite in families:
        if label == "translated" or len(finite) < 6:
            continue
        fit = fit_log_slope(finite[len(finite) // 2:], label, log2=True)
        fits.append(fit)
        # a family still climbing toward a value that another family already exceeds
        # is converging, not growing
        others = max((v for lab, fam in families if lab != label for _, v in fam), default=-math.inf)
        if max(v for _, v in finite) > others + 1e-9:
            growth = max(growth, fit.slope)
    if infinite or growth > policy.boundary_slope:
        cls = Membership.NONMEMBER
    elif growth > policy.slope_threshold:
        cls = Membership.BOUNDARY
    else:
        cls = Membership.MEMBER
    return ApEstimate(p, best, arg, growth if not infinite else math.inf, cls, fits, count)


@dataclass
class ProductWeightReport:
    weight: Weight
    estimate: ApEstimate
    bounded: bool

    def to_dict(self):
        return {"weight": repr(self.weight), "bounded": self.bounded, "estimate": self.estimate.to_dict()}


def check_product_weight_ap(w0: Weight, w1: Weight, p: float, eps: float, delta: float,
                            policy: ApPolicy | None = None) -> ProductWeightReport:
    """Probe whether ``w0^{-eps} w1^{1+delta}`` stays in A_p."""
    if eps < 0 or delta < 0:
        raise ValueError("eps and delta must be nonnegative")
    prod = multiply(w0.power(-eps), w1.power(1.0 + delta))
    est = estimate_ap_constant(prod, p, policy)
    return ProductWeightReport(prod, est, est.classification is Membership.MEMBER)


@dataclass
class ReverseHolderReport:
    ratios: list
    max_ratio: float
    argmax: object

    def to_dict(self):
        return {"ratios": self.ratios, "max_ratio": self.max_ratio, "argmax": repr(self.argmax)}


def check_reverse_holder(w0: Weight, w1: Weight, eps: float, delta: float, cubes,
                         tol: float = DEFAULT_TOL) -> ReverseHolderReport:
    """Ratios ``int_Q w0^{-eps} w1^{1+delta} / (|Q|^{eps-delta} w0(Q)^{-eps} w1(Q)^{1+delta})``."""
    if not (eps > 0 and delta > 0):
        raise ValueError("eps and delta must be positive")
    prod = multiply(w0.power(-eps), w1.power(1.0 + delta))
    ratios = []
    for q in cubes:
        box = as_box(q)
        lhs = cube_measure(prod, box, tol).value
        m0 = cube_measure(w0, box, tol).value
        m1 = cube_measure(w1, box, tol).value
        rhs = box.volume ** (eps - delta) * m0 ** (-eps) * m1 ** (1.0 + delta)
        ratios.append(lhs / rhs)
    i = int(np.argmax(ratios))
    return ReverseHolderReport(ratios, float(ratios[i]), list(cubes)[i])
