"""Dyadic cube lattice: geometry, regions, window enumeration and slope fits."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import DegenerateAbscissa, WindowTooLarge

DEFAULT_EPS = 0.1
FLAT_SLOPE = 0.02
DEFAULT_NU_MAX = {1: 12, 2: 8, 3: 6}
DEFAULT_BUDGET = 2_000_000


class Region(str, enum.Enum):
    NEAR_ORIGIN = "NearOrigin"
    INTERMEDIATE = "Intermediate"
    FAR = "Far"


@dataclass(frozen=True)
class Box:
    """Axis-parallel box ``[lo, hi]``."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise ValueError("lo and hi must have the same positive length")
        if any(b <= a for a, b in zip(lo, hi)):
            raise ValueError("box must have positive side lengths")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, center, side):
        c = np.atleast_1d(np.asarray(center, dtype=float))
        return cls(tuple(c - side / 2), tuple(c + side / 2))

    @property
    def d(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.hi, self.lo)))

    def box(self) -> "Box":
        return self


@dataclass(frozen=True, order=True)
class DyadicCube:
    """The cube ``Q_{nu,m}`` centered at ``2^{-nu} m`` with side ``2^{-nu}``."""

    nu: int
    m: tuple

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError("level nu must be nonnegative")
        m = (int(self.m),) if np.isscalar(self.m) else tuple(int(v) for v in self.m)
        object.__setattr__(self, "m", m)

    @property
    def d(self) -> int:
        return len(self.m)

    @property
    def side(self) -> float:
        return math.ldexp(1.0, -self.nu)

    @property
    def center(self) -> tuple:
        return tuple(math.ldexp(float(v), -self.nu) for v in self.m)

    @property
    def volume(self) -> float:
        return math.ldexp(1.0, -self.nu * self.d)

    def box(self) -> Box:
        s = self.side
        return Box(tuple((v - 0.5) * s for v in self.m), tuple((v + 0.5) * s for v in self.m))


def as_box(cube) -> Box:
    """Accept a :class:`DyadicCube`, a :class:`Box` or a ``(lo, hi)`` pair."""
    if isinstance(cube, (Box, DyadicCube)):
        return cube.box()
    lo, hi = cube
    return Box(tuple(np.atleast_1d(lo)), tuple(np.atleast_1d(hi)))


def cube_geometry(nu: int, m):
    """Center, side and per-axis intervals of ``Q_{nu,m}``."""
    q = DyadicCube(nu, m)
    b = q.box()
    return q.center, q.side, tuple(zip(b.lo, b.hi))


def classify_region(cube: DyadicCube, eps: float = DEFAULT_EPS) -> Region:
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    r = math.ldexp(math.hypot(*cube.m) if cube.d > 1 else abs(cube.m[0]), -cube.nu)
    if r <= eps:
        return Region.NEAR_ORIGIN
    if r >= 1.0 / eps:
        return Region.FAR
    return Region.INTERMEDIATE


def classify_position(x, eps: float = DEFAULT_EPS) -> Region:
    r = float(np.linalg.norm(np.atleast_1d(x)))
    if r <= eps:
        return Region.NEAR_ORIGIN
    if r >= 1.0 / eps:
        return Region.FAR
    return Region.INTERMEDIATE


@dataclass(frozen=True)
class IndexWindow:
    """Finite truncation of the index set ``nu >= 0, m in Z^d``.

    At level ``nu`` the window holds every ``m`` with ``|m|_inf <= radius(nu)``, where
    ``radius(nu) = m_radius * 2**nu`` (or ``m_radius`` when ``scale_with_level`` is
    false), optionally capped at ``max_radius``.
    """

    nu_max: int
    m_radius: int = 4
    scale_with_level: bool = True
    max_radius: int | None = None
    region: Region | None = None
    eps: float = DEFAULT_EPS
    budget: int = DEFAULT_BUDGET

    @classmethod
    def default(cls, d: int, **overrides) -> "IndexWindow":
        kw = dict(nu_max=DEFAULT_NU_MAX.get(d, 6), max_radius={1: None, 2: 16}.get(d, 4))
        kw.update(overrides)
        return cls(**kw)

    def radius(self, nu: int) -> int:
        r = self.m_radius << nu if self.scale_with_level else self.m_radius
        if self.max_radius is not None:
            r = min(r, self.max_radius)
        return int(r)

    def count(self, d: int) -> int:
        return sum((2 * self.radius(nu) + 1) ** d for nu in range(self.nu_max + 1))


def enumerate_window(window: IndexWindow, d: int) -> Iterator[DyadicCube]:
    """Cubes of the window in deterministic order (nu ascending, m lexicographic)."""
    if window.count(d) > window.budget:
        raise WindowTooLarge(f"window holds {window.count(d)} cubes, budget is {window.budget}")
    for nu in range(window.nu_max + 1):
        r = window.radius(nu)
        for m in itertools.product(range(-r, r + 1), repeat=d):
            q = DyadicCube(nu, m)
            if window.region is None or classify_region(q, window.eps) is window.region:
                yield q


def window_arrays(window: IndexWindow, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized form of :func:`enumerate_window`: arrays ``nu`` of shape (M,) and ``m`` (M, d)."""
    if window.count(d) > window.budget:
        raise WindowTooLarge(f"window holds {window.count(d)} cubes, budget is {window.budget}")
    nus, ms = [], []
    for nu in range(window.nu_max + 1):
        r = window.radius(nu)
        axes = np.meshgrid(*([np.arange(-r, r + 1)] * d), indexing="ij")
        m = np.stack([a.ravel() for a in axes], axis=-1)
        nus.append(np.full(m.shape[0], nu))
        ms.append(m)
    nu = np.concatenate(nus)
    m = np.concatenate(ms)
    if window.region is not None:
        pos = np.ldexp(np.linalg.norm(m, axis=1), -nu)
        keep = {
            Region.NEAR_ORIGIN: pos <= window.eps,
            Region.FAR: pos >= 1.0 / window.eps,
        }.get(window.region, (pos > window.eps) & (pos < 1.0 / window.eps))
        nu, m = nu[keep], m[keep]
    return nu, m


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual_rms: float
    n: int
    label: str = ""
    x: tuple = field(default=(), repr=False, compare=False)
    log2y: tuple = field(default=(), repr=False, compare=False)

    def to_dict(self):
        return {"label": self.label, "slope": self.slope, "intercept": self.intercept,
                "residual_rms": self.residual_rms, "n": self.n}


def fit_log_slope(samples: Sequence[tuple[float, float]], label: str = "", *, log2: bool = False) -> SlopeFit:
    """Least-squares line through ``(x, log2 y)``.

    With ``log2=True`` the second entries are taken to be logarithms already.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 3:
        raise ValueError("need at least three samples")
    x, y = arr[:, 0], arr[:, 1]
    if not log2:
        if np.any(y <= 0) or not np.all(np.isfinite(y)):
            raise ValueError("values must be positive and finite")
        y = np.log2(y)
    if np.ptp(x) == 0.0:
        raise DegenerateAbscissa("all abscissae are equal")
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    slope = float(np.dot(dx, y - ym) / np.dot(dx, dx))
    intercept = float(ym - slope * xm)
    res = y - (intercept + slope * x)
    return SlopeFit(slope, intercept, float(np.sqrt(np.mean(res**2))), int(x.size), label,
                    tuple(x.tolist()), tuple(y.tolist()))
