"""FFT oracle: Littlewood-Paley blocks, weighted B/F/H/W norms, atoms and probes.

Fields live on the periodic box ``[-L, L)^d`` (``d`` in {1, 2}) sampled at ``N`` points
per axis; the frequency grid is ``xi_j = (pi / L) j``.  All norms are one fixed
discrete representative of their equivalence class, so they are meant for ratio and
slope experiments, not absolute values.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .dyadic import DyadicCube, fit_log_slope
from .errors import AtomOutsideDomain, ResolutionTooLow
from .weights import (
    Constant, Custom, DistancePower, PartialRadialPower, ProductPower, RadialPower, Weight, cube_measure, multiply,
)

DEFAULT_GRID = {1: (8.0, 2**14), 2: (8.0, 2**10)}
LEAK_SHELL = 0.1
LEAK_TOL = 1e-6


# --------------------------------------------------------------------------
# fields
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GridField:
    """Samples of a function on ``[-L, L)^d`` at ``x_j = -L + j (2L / N)``."""

    d: int
    L: float
    N: int
    values: np.ndarray

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError("grid fields support d = 1 or d = 2")
        if self.N < 2 or self.N & (self.N - 1):
            raise ValueError("N must be a power of two")
        if not self.L > 0:
            raise ValueError("L must be positive")
        v = np.asarray(self.values)
        if v.shape != (self.N,) * self.d:
            raise ValueError(f"values must have shape {(self.N,) * self.d}")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, func, d: int = 1, L: float | None = None, N: int | None = None) -> "GridField":
        """Evaluate ``func`` (taking ``d`` coordinate arrays) on the grid."""
        L0, N0 = DEFAULT_GRID[d]
        L, N = (L0 if L is None else L), (N0 if N is None else N)
        axes = grid_axes(d, L, N)
        mesh = np.meshgrid(*axes, indexing="ij")
        return cls(d, L, N, np.asarray(func(*mesh)) * np.ones(mesh[0].shape))

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def nyquist(self) -> float:
        return math.pi * self.N / (2.0 * self.L)

    def axes(self):
        return grid_axes(self.d, self.L, self.N)

    def points(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def abs_freq(self) -> np.ndarray:
        return abs_frequencies(self.d, self.L, self.N)

    def with_values(self, values) -> "GridField":
        return GridField(self.d, self.L, self.N, values)

    def spectrum(self) -> np.ndarray:
        return np.fft.fftn(self.values)

    def multiply_symbol(self, symbol: np.ndarray) -> "GridField":
        """Fourier multiplier; keeps real fields real when the symbol is even and real."""
        out = np.fft.ifftn(np.fft.fftn(self.values) * symbol)
        if np.isrealobj(self.values) and np.isrealobj(symbol):
            out = out.real
        return self.with_values(out)

    def __add__(self, other):
        return self.with_values(self.values + other.values)

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__


def grid_axes(d: int, L: float, N: int):
    x = -L + np.arange(N) * (2.0 * L / N)
    return [x] * d


@functools.lru_cache(maxsize=16)
def _freq_axis(L: float, N: int) -> np.ndarray:
    xi = 2.0 * np.pi * np.fft.fftfreq(N, d=2.0 * L / N)
    xi.setflags(write=False)
    return xi


@functools.lru_cache(maxsize=16)
def abs_frequencies(d: int, L: float, N: int) -> np.ndarray:
    xi = _freq_axis(L, N)
    if d == 1:
        out = np.abs(xi)
    else:
        out = np.hypot(xi[:, None], xi[None, :])
    out.setflags(write=False)
    return out


# --------------------------------------------------------------------------
# Littlewood-Paley symbols
# --------------------------------------------------------------------------

def _e(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def smoothstep(t):
    """``e(1-t) / (e(1-t) + e(t))`` with ``e(t) = exp(-1/t)`` for ``t > 0`` and 0 otherwise."""
    a, b = _e(1.0 - np.asarray(t, dtype=float)), _e(t)
    return a / (a + b)


def generator_symbol(r):
    """Radial generator: 1 on ``|xi| <= 1``, 0 on ``|xi| >= 3/2``, smooth in between."""
    return smoothstep((np.asarray(r, dtype=float) - 1.0) / 0.5)


def max_blocks(d: int, L: float, N: int) -> int:
    """Largest ``K`` with ``(3/2) 2^K`` at or below the Nyquist frequency."""
    nyq = math.pi * N / (2.0 * L)
    return int(math.floor(math.log2(nyq / 1.5)))


def build_lp_symbols(K: int, abs_xi: np.ndarray, nyquist: float | None = None) -> np.ndarray:
    """Symbols ``phi_0 .. phi_K`` on the given ``|xi|`` samples, stacked on axis 0."""
    if K < 1:
        raise ValueError("K must be at least 1")
    if nyquist is not None and 1.5 * 2.0**K > nyquist:
        raise ResolutionTooLow(f"K={K} needs |xi| up to {1.5 * 2.0**K:g}, Nyquist is {nyquist:g}")
    r = np.asarray(abs_xi, dtype=float)
    dil = [generator_symbol(np.ldexp(r, -k)) for k in range(K + 1)]
    out = np.empty((K + 1,) + r.shape)
    out[0] = dil[0]
    for k in range(1, K + 1):
        out[k] = dil[k] - dil[k - 1]
    return out


@functools.lru_cache(maxsize=8)
def _grid_symbols(d: int, L: float, N: int, K: int) -> np.ndarray:
    out = build_lp_symbols(K, abs_frequencies(d, L, N), math.pi * N / (2.0 * L))
    out.setflags(write=False)
    return out


def _resolve_K(f: GridField, K: int | None) -> int:
    kmax = max_blocks(f.d, f.L, f.N)
    if K is None:
        if kmax < 1:
            raise ResolutionTooLow("grid too coarse for a single Littlewood-Paley block")
        return kmax
    if K > kmax:
        raise ResolutionTooLow(f"K={K} exceeds the largest resolvable K={kmax}")
    return K


def lp_blocks(f: GridField, K: int | None = None) -> list:
    """Blocks ``phi_k * f`` for ``k = 0..K``."""
    K = _resolve_K(f, K)
    sym = _grid_symbols(f.d, f.L, f.N, K)
    spec = np.fft.fftn(f.values)
    real = np.isrealobj(f.values)
    out = []
    for k in range(K + 1):
        b = np.fft.ifftn(spec * sym[k])
        out.append(f.with_values(b.real if real else b))
    return out


def _iter_blocks(f: GridField, K: int):
    sym = _grid_symbols(f.d, f.L, f.N, K)
    spec = np.fft.fftn(f.values)
    real = np.isrealobj(f.values)
    for k in range(K + 1):
        b = np.fft.ifftn(spec * sym[k])
        yield k, (b.real if real else b)


# --------------------------------------------------------------------------
# weights on the grid
# --------------------------------------------------------------------------

def _singular_distance(w: Weight, pts: np.ndarray) -> np.ndarray:
    """Distance from grid points to the set where ``w`` may vanish or blow up."""
    if isinstance(w, Constant):
        return np.full(pts.shape[0], np.inf)
    if isinstance(w, RadialPower):
        return np.linalg.norm(pts, axis=1)
    if isinstance(w, PartialRadialPower):
        return np.linalg.norm(pts[:, : w.n], axis=1)
    if isinstance(w, ProductPower):
        out = np.full(pts.shape[0], np.inf)
        start = 0
        for dj in w.dims:
            out = np.minimum(out, np.linalg.norm(pts[:, start:start + dj], axis=1))
            start += dj
        return out
    if isinstance(w, DistancePower):
        return w.manifold.distance(pts)
    if isinstance(w, Custom):
        out = np.full(pts.shape[0], np.inf)
        for p in w.points:
            out = np.minimum(out, np.linalg.norm(pts - np.asarray(p), axis=1))
        for c, r in w.spheres:
            out = np.minimum(out, np.abs(np.linalg.norm(pts - np.asarray(c), axis=1) - r))
        for axis, off in w.hyperplanes:
            out = np.minimum(out, np.abs(pts[:, axis] - off))
        return out
    return np.full(pts.shape[0], 0.0)


@functools.lru_cache(maxsize=32)
def weight_on_grid(w: Weight, d: int, L: float, N: int) -> np.ndarray:
    """Node weights; cells within two cell diagonals of the singular set get cell averages."""
    if w.d != d:
        raise ValueError(f"weight dimension {w.d} does not match the grid dimension {d}")
    h = 2.0 * L / N
    pts = np.stack([m.ravel() for m in np.meshgrid(*grid_axes(d, L, N), indexing="ij")], axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.asarray(w.values(pts), dtype=float)
    near = _singular_distance(w, pts) < 2.0 * h * math.sqrt(d)
    near |= ~np.isfinite(vals) | (vals <= 0)
    for i in np.flatnonzero(near):
        lo = pts[i] - 0.5 * h
        vals[i] = cube_measure(w, (lo, lo + h), tol=1e-8).value / h**d
    out = vals.reshape((N,) * d)
    out.setflags(write=False)
    return out


# --------------------------------------------------------------------------
# norms
# --------------------------------------------------------------------------

@dataclass
class NormResult:
    value: float
    K: int
    tail_estimate: float = math.nan
    warnings: list = field(default_factory=list)

    def __float__(self):
        return self.value

    def to_dict(self):
        return {"value": self.value, "K": self.K, "tail_estimate": self.tail_estimate, "warnings": self.warnings}


def _weights(f: GridField, w: Weight | None):
    if w is None or (isinstance(w, Constant) and w.c == 1.0):
        return None
    return weight_on_grid(w, f.d, f.L, f.N)


def _lp_integral(values: np.ndarray, p: float, wg, h: float, d: int) -> float:
    """``int |v|^p w`` (for ``p = inf`` the essential sup, weight ignored)."""
    a = np.abs(values)
    if math.isinf(p):
        return float(np.max(a))
    a = a**p
    if wg is not None:
        a = a * wg
    return float(np.sum(a) * h**d)


def _lp(values, p, wg, h, d) -> float:
    if math.isinf(p):
        return _lp_integral(values, p, wg, h, d)
    return _lp_integral(values, p, wg, h, d) ** (1.0 / p)


def weighted_lp_norm(f: GridField, p: float, w: Weight | None = None) -> float:
    """Riemann sum for ``(int |f|^p w)^{1/p}``."""
    if not p > 0:
        raise ValueError("p must be positive")
    return _lp(f.values, p, _weights(f, w), f.h, f.d)


def leak_fraction(f: GridField, p: float = 2.0) -> float:
    """Share of ``int |f|^p`` carried by the outer shell ``max_i |x_i| >= (1 - LEAK_SHELL) L``."""
    a = np.abs(f.values) ** (2.0 if math.isinf(p) else p)
    total = float(np.sum(a))
    if total == 0.0:
        return 0.0
    mesh = np.meshgrid(*f.axes(), indexing="ij")
    cheb = np.max(np.abs(np.stack(mesh)), axis=0)
    return float(np.sum(a[cheb >= (1.0 - LEAK_SHELL) * f.L])) / total


def _monitor(f: GridField, p: float, warnings: list):
    leak = leak_fraction(f, p)
    if leak > LEAK_TOL:
        warnings.append(f"periodization: {leak:.2e} of the mass sits in the outer shell")


def _tail(amps: Sequence[float], warnings: list) -> float:
    a = np.asarray(amps[-3:], dtype=float)
    if a.size < 3 or np.any(a <= 0):
        return -math.inf if np.all(a == 0) else math.nan
    slope = fit_log_slope(list(zip(range(3), a))).slope
    top = max(amps)
    if slope > 0 and a[-1] > 1e-8 * top:
        warnings.append("TailNotDecaying: block contributions still grow at k = K")
    return slope


def _lq(amps: np.ndarray, q: float) -> float:
    if math.isinf(q):
        return float(np.max(amps))
    return float(np.sum(amps**q) ** (1.0 / q))


def besov_norm(f: GridField, s: float, p: float, q: float, w: Weight | None = None,
               K: int | None = None) -> NormResult:
    """``|| ( 2^{sk} || phi_k * f ||_{L^p(w)} )_k ||_{l^q}``."""
    if math.isinf(p):
        raise ValueError("the grid oracle covers p < inf only")
    K = _resolve_K(f, K)
    wg = _weights(f, w)
    warnings: list = []
    _monitor(f, p, warnings)
    amps = np.array([2.0 ** (s * k) * _lp(b, p, wg, f.h, f.d) for k, b in _iter_blocks(f, K)])
    tail = _tail(list(amps), warnings)
    return NormResult(_lq(amps, q), K, tail, warnings)


def triebel_norm(f: GridField, s: float, p: float, q: float, w: Weight | None = None,
                 K: int | None = None) -> NormResult:
    """``|| ( sum_k |2^{sk} phi_k * f|^q )^{1/q} ||_{L^p(w)}`` (max over k for ``q = inf``)."""
    K = _resolve_K(f, K)
    if math.isinf(p):
        raise ValueError("F spaces with p = inf are not supported")
    wg = _weights(f, w)
    warnings: list = []
    _monitor(f, p, warnings)
    acc = None
    amps = []
    for k, b in _iter_blocks(f, K):
        a = 2.0 ** (s * k) * np.abs(b)
        amps.append(_lp(a, p, wg, f.h, f.d))
        if math.isinf(q):
            acc = a if acc is None else np.maximum(acc, a)
        else:
            acc = a**q if acc is None else acc + a**q
    g = acc if math.isinf(q) else acc ** (1.0 / q)
    tail = _tail(amps, warnings)
    return NormResult(_lp(g, p, wg, f.h, f.d), K, tail, warnings)


def bessel_symbol(abs_xi, s: float):
    return (1.0 + np.asarray(abs_xi) ** 2) ** (-0.5 * s)


def bessel_potential(f: GridField, s: float) -> GridField:
    """``(1 - Delta)^{-s/2} f`` via the multiplier ``(1 + |xi|^2)^{-s/2}``."""
    if s == 0:
        return f.with_values(f.values.copy())
    return f.multiply_symbol(bessel_symbol(f.abs_freq(), s))


def h_norm(f: GridField, s: float, p: float, w: Weight | None = None) -> NormResult:
    """``|| F^{-1}[(1 + |xi|^2)^{s/2} f^] ||_{L^p(w)}``."""
    if not 1.0 < p < math.inf:
        raise ValueError("H norms need 1 < p < inf")
    warnings: list = []
    _monitor(f, p, warnings)
    g = bessel_potential(f, -s)
    return NormResult(weighted_lp_norm(g, p, w), 0, math.nan, warnings)


def _multi_indices(d: int, order: int):
    if d == 1:
        return [(k,) for k in range(order + 1)]
    return [(a, b) for a in range(order + 1) for b in range(order + 1 - a)]


def spectral_derivative(f: GridField, alpha: Sequence[int]) -> GridField:
    """``D^alpha f`` via multiplication by ``(i xi)^alpha``."""
    xi = _freq_axis(f.L, f.N)
    sym = np.ones((f.N,) * f.d, dtype=complex)
    for axis, a in enumerate(alpha):
        if a:
            shape = [1] * f.d
            shape[axis] = f.N
            fac = (1j * xi) ** a
            if a % 2 == 1:
                fac = fac.copy()
                fac[f.N // 2] = 0.0  # the Nyquist mode has no symmetric partner
            sym = sym * fac.reshape(shape)
    out = np.fft.ifftn(np.fft.fftn(f.values) * sym)
    return f.with_values(out.real if np.isrealobj(f.values) else out)


def w_norm(f: GridField, s: float, p: float, w: Weight | None = None, K: int | None = None) -> NormResult:
    """Integer ``s``: ``(sum_{|alpha| <= s} ||D^alpha f||^p)^{1/p}``; otherwise the ``B^s_{p,p}`` norm."""
    if not 1.0 < p < math.inf:
        raise ValueError("W norms need 1 < p < inf")
    if s < 0:
        raise ValueError("W norms need s >= 0")
    if not float(s).is_integer():
        return besov_norm(f, s, p, p, w, K)
    warnings: list = []
    _monitor(f, p, warnings)
    total = 0.0
    for alpha in _multi_indices(f.d, int(s)):
        total += weighted_lp_norm(spectral_derivative(f, alpha), p, w) ** p
    return NormResult(total ** (1.0 / p), 0, math.nan, warnings)


def space_norm(f: GridField, space, K: int | None = None) -> NormResult:
    """Norm of ``f`` in a :class:`~embedkit.criteria.SpaceSpec`."""
    sc = space.scale.name
    if sc == "B":
        return besov_norm(f, space.s, space.p, space.q, space.weight, K)
    if sc == "F":
        return triebel_norm(f, space.s, space.p, space.q, space.weight, K)
    if sc == "H":
        return h_norm(f, space.s, space.p, space.weight)
    return w_norm(f, space.s, space.p, space.weight, K)


# --------------------------------------------------------------------------
# atoms and probes
# --------------------------------------------------------------------------

def _bump(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def atom_symbol(nu: int, abs_xi) -> np.ndarray:
    """Spectrum of the level-``nu`` atom: a smooth bump on ``2^nu < |xi| < 2^{nu+1}``
    (``|xi| < 1`` for ``nu = 0``).  Block ``nu + 1`` (block 0 when ``nu = 0``) carries most of it."""
    r = np.asarray(abs_xi, dtype=float)
    if nu == 0:
        return _bump(r)
    return _bump((r - 1.5 * 2.0**nu) / (0.5 * 2.0**nu))


def make_atom(nu: int, m, d: int = 1, L: float | None = None, N: int | None = None) -> GridField:
    """``psi_nu(x - 2^{-nu} m)`` normalized to sup 1."""
    L0, N0 = DEFAULT_GRID[d]
    L, N = (L0 if L is None else L), (N0 if N is None else N)
    m = np.atleast_1d(np.asarray(m, dtype=float))
    if m.size != d:
        raise ValueError("m must have d entries")
    nyq = math.pi * N / (2.0 * L)
    if 3.0 * 2.0**nu > nyq:
        raise ResolutionTooLow(f"an atom at level {nu} needs |xi| up to {3 * 2.0**nu:g}, Nyquist is {nyq:g}")
    x0 = np.ldexp(m, -nu)
    if np.max(np.abs(x0)) > L / 2:
        raise AtomOutsideDomain(f"atom center {tuple(x0)} lies outside |x| <= L/2 = {L / 2:g}")
    xi = _freq_axis(L, N)
    spec = atom_symbol(nu, abs_frequencies(d, L, N)).astype(complex)
    for axis in range(d):
        shape = [1] * d
        shape[axis] = N
        spec = spec * np.exp(-1j * xi * (L + x0[axis])).reshape(shape)
    vals = np.fft.ifftn(spec).real
    vals = vals / np.max(np.abs(vals))
    return GridField(d, L, N, vals)


@dataclass
class ProbeLine:
    label: str
    nus: list
    ratios: list
    measured_slope: float
    analytic_slope: float

    @property
    def deviation(self) -> float:
        return abs(self.measured_slope - self.analytic_slope)

    def to_dict(self):
        return {"label": self.label, "nus": self.nus, "ratios": self.ratios, "measured_slope": self.measured_slope,
                "analytic_slope": self.analytic_slope, "deviation": self.deviation}


@dataclass
class ProbeReport:
    lines: list
    max_ratio: float
    conclusion: str
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {"lines": [ln.to_dict() for ln in self.lines], "max_ratio": self.max_ratio,
                "conclusion": self.conclusion, "warnings": self.warnings}


def embedding_ratio_probe(query, nus: Sequence[int] = (2, 3, 4, 5, 6), positions: Sequence | None = None,
                          L: float | None = None, N: int | None = None, growth_threshold: float = 0.05) -> ProbeReport:
    """Ratios ``||atom||_target / ||atom||_source`` along probe lines of atoms.

    Lines: ``m = 0`` and every physical position in ``positions`` (default ``x = 1`` along
    the first axis), with ``m = 2^nu x``.  Each measured log2-slope is set against the
    slope of the dyadic term on the same cubes.
    """
    from .criteria import condition_c_term

    d = query.d
    if d not in (1, 2):
        raise ValueError("the oracle supports d = 1 and d = 2")
    if positions is None:
        e = np.zeros(d)
        e[0] = 1.0
        positions = [tuple(e)]
    lines, warnings = [], []
    specs = [("m=0", np.zeros(d))] + [(f"x={tuple(float(v) for v in p)}", np.asarray(p, dtype=float))
                                      for p in positions]
    for label, x in specs:
        ratios, terms = [], []
        for nu in nus:
            m = np.rint(np.ldexp(x, nu)).astype(int)
            atom = make_atom(nu, m, d, L, N)
            num = space_norm(atom, query.target)
            den = space_norm(atom, query.source)
            if not warnings and (num.warnings or den.warnings):
                warnings.append(f"level {nu}: " + (num.warnings + den.warnings)[0])
            ratios.append(num.value / den.value)
            terms.append(condition_c_term(query, DyadicCube(nu, tuple(m))))
        meas = fit_log_slope(list(zip(nus, ratios))).slope
        ana = fit_log_slope(list(zip(nus, terms))).slope
        lines.append(ProbeLine(label, list(nus), ratios, meas, ana))
    max_ratio = max(max(ln.ratios) for ln in lines)
    grows = any(ln.measured_slope > growth_threshold for ln in lines)
    return ProbeReport(lines, max_ratio, "ConsistentWithFails" if grows else "ConsistentWithHolds", warnings)


# --------------------------------------------------------------------------
# random fields and the multiplicative inequality
# --------------------------------------------------------------------------

def random_band_limited(n: int, seed: int = 0, d: int = 1, L: float | None = None, N: int | None = None,
                        band: float = 16.0, packets: int = 6) -> list:
    """Seeded sums of Gaussian wave packets with carrier frequencies below ``band``.

    Envelopes keep the mass well inside ``[-L/2, L/2]^d`` so periodization stays negligible.
    """
    L0, N0 = DEFAULT_GRID[d]
    L, N = (L0 if L is None else L), (N0 if N is None else N)
    rng = np.random.default_rng(seed)
    mesh = np.meshgrid(*grid_axes(d, L, N), indexing="ij")
    out = []
    for _ in range(n):
        v = np.zeros(mesh[0].shape)
        for _ in range(packets):
            c = rng.uniform(-1.5, 1.5, size=d)
            sigma = rng.uniform(0.15, 0.6)
            freq = rng.uniform(-band, band, size=d) * 0.6
            amp = rng.normal()
            r2 = sum((mi - ci) ** 2 for mi, ci in zip(mesh, c))
            phase = sum(fi * mi for fi, mi in zip(freq, mesh)) + rng.uniform(0, 2 * np.pi)
            v += amp * np.exp(-0.5 * r2 / sigma**2) * np.cos(phase)
        out.append(GridField(d, L, N, v))
    return out


@dataclass
class GNReport:
    theta: float
    s: float
    p: float
    q: float
    weight: Weight
    ratios: list

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))

    def to_dict(self):
        return {"theta": self.theta, "s": self.s, "p": self.p, "q": self.q, "weight": repr(self.weight),
                "max_ratio": self.max_ratio, "ratios": list(self.ratios)}


def interpolated_parameters(theta, s0, p0, q0, w0, s1, p1, q1, w1):
    """``s = (1-t)s0 + t s1``, ``1/p = (1-t)/p0 + t/p1`` (same for q), ``w = w0^{(1-t)p/p0} w1^{tp/p1}``."""
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    s = (1 - theta) * s0 + theta * s1
    p = 1.0 / ((1 - theta) / p0 + theta / p1)
    q = math.inf if math.isinf(q0) and math.isinf(q1) else 1.0 / ((1 - theta) / q0 + theta / q1)
    w = multiply(w0.power((1 - theta) * p / p0), w1.power(theta * p / p1))
    return s, p, q, w


def gn_ratio(f: GridField, theta, s0, p0, q0, w0, s1, p1, q1, w1) -> float:
    s, p, q, w = interpolated_parameters(theta, s0, p0, q0, w0, s1, p1, q1, w1)
    den0 = triebel_norm(f, s0, p0, q0, w0).value
    den1 = triebel_norm(f, s1, p1, q1, w1).value
    if den0 == 0.0 or den1 == 0.0:
        raise ZeroDivisionError("a denominator norm vanishes")
    return triebel_norm(f, s, p, q, w).value / (den0 ** (1 - theta) * den1**theta)


def gn_check(fields: Iterable[GridField], theta, s0, p0, q0, w0, s1, p1, q1, w1) -> GNReport:
    """Ratios of the interpolated norm to the product of the end-point norms over a family."""
    s, p, q, w = interpolated_parameters(theta, s0, p0, q0, w0, s1, p1, q1, w1)
    ratios = [gn_ratio(f, theta, s0, p0, q0, w0, s1, p1, q1, w1) for f in fields]
    return GNReport(theta, s, p, q, w, ratios)
