"""Decision engine for embeddings between weighted B/F/H/W spaces.

The dyadic criterion is the supremum over all cubes ``Q_{nu,m}`` of

    2^{-nu (s0 - s1)} w0(Q)^{-1/p0} w1(Q)^{1/p1}

and the Besov criterion replaces the supremum by mixed ``l^{q*}(l^{p*})`` norms.
Both are evaluated on finite probe sets (a dense window, straight lines of shrinking
cubes at anchor points, geometric ladders towards infinity) and the verdict is read
off from fitted log-slopes.  Power weight families additionally have closed-form
characterizations, implemented here as exact inequality checks.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import functools
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .dyadic import FLAT_SLOPE, DyadicCube, IndexWindow, Region, as_box, classify_position, window_arrays
from .errors import QuadratureFailure, SpecError, UnsupportedQuery
from .weights import (
    BOUNDARY_EPS, Constant, DistancePower, Membership, PartialRadialPower, ProductPower, RadialPower, Weight,
    ap_membership_closed_form, as_catalog, cube_measure, from_dict as weight_from_dict, log2_cube_measures,
)

SCHEMA_VERSION = 1


# --------------------------------------------------------------------------
# domain types
# --------------------------------------------------------------------------

class Scale(str, enum.Enum):
    B = "Besov"
    F = "TriebelLizorkin"
    H = "BesselPotential"
    W = "SobolevSlobodetskii"

    @classmethod
    def parse(cls, text) -> "Scale":
        if isinstance(text, Scale):
            return text
        key = str(text).strip()
        for sc in cls:
            if key in (sc.name, sc.value) or key.lower() == sc.value.lower():
                return sc
        raise SpecError(f"unknown scale {text!r}")


class Outcome(str, enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INCONCLUSIVE = "Inconclusive"
    BOUNDARY = "Boundary"  # closed forms only: inside the equality band


def _recip(x: float) -> float:
    return 0.0 if math.isinf(x) else 1.0 / x


@dataclass(frozen=True)
class SpaceSpec:
    """A weighted smoothness space ``X^s_{p,q}(R^d, w)``.

    ``q`` is ignored for the H and W scales.  ``p = inf`` is accepted for the Besov
    scale only (decision-only; the oracle cannot evaluate it).
    """

    scale: Scale
    s: float
    p: float
    q: float | None = None
    weight: Weight | None = None

    def __post_init__(self):
        object.__setattr__(self, "scale", Scale.parse(self.scale))
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "p", float(self.p))
        if self.weight is None:
            raise SpecError("a space needs a weight (use Constant(d) for the unweighted case)")
        if not self.p > 0:
            raise SpecError("p must be positive")
        if math.isinf(self.p) and self.scale is not Scale.B:
            raise SpecError("p = inf is supported for the Besov scale only")
        if self.scale in (Scale.B, Scale.F):
            if self.q is None:
                raise SpecError(f"{self.scale.value} spaces need q")
            q = float(self.q)
            if not q > 0:
                raise SpecError("q must be positive")
            object.__setattr__(self, "q", q)
        else:
            object.__setattr__(self, "q", None)
            if self.scale is Scale.W and self.s < 0:
                raise SpecError("Sobolev-Slobodetskii spaces need s >= 0")

    @property
    def d(self) -> int:
        return self.weight.d

    @property
    def is_integer_w(self) -> bool:
        return self.scale is Scale.W and float(self.s).is_integer()

    def as_bf(self) -> "SpaceSpec":
        """Equivalent B or F space: ``H = F_{p,2}``, integer ``W = F_{p,2}``, otherwise ``W = B_{p,p}``."""
        if self.scale is Scale.H or self.is_integer_w:
            return replace(self, scale=Scale.F, q=2.0)
        if self.scale is Scale.W:
            return replace(self, scale=Scale.B, q=self.p)
        return self

    def label(self) -> str:
        sub = f"{_fmt(self.p)}" + (f",{_fmt(self.q)}" if self.q is not None else "")
        return f"{self.scale.name}^{_fmt(self.s)}_{{{sub}}}({self.weight!r})"

    def to_dict(self) -> dict:
        out = {"scale": self.scale.value, "s": self.s, "p": _json_num(self.p)}
        if self.q is not None:
            out["q"] = _json_num(self.q)
        out["weight"] = self.weight.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SpaceSpec":
        try:
            return cls(Scale.parse(data["scale"]), float(data["s"]), _num(data["p"]),
                       None if data.get("q") is None else _num(data["q"]), weight_from_dict(data["weight"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"malformed space spec: {exc}") from exc


def _num(v) -> float:
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity", "+inf"):
        return math.inf
    return float(v)


def _json_num(v):
    return "inf" if isinstance(v, float) and math.isinf(v) else v


def _fmt(v) -> str:
    return "inf" if math.isinf(v) else f"{v:g}"


@dataclass(frozen=True)
class EmbeddingQuery:
    source: SpaceSpec
    target: SpaceSpec

    def __post_init__(self):
        if self.source.d != self.target.d:
            raise SpecError("source and target live in different dimensions")

    @property
    def d(self) -> int:
        return self.source.d

    def with_smoothness(self, s0: float | None = None, s1: float | None = None) -> "EmbeddingQuery":
        src = self.source if s0 is None else replace(self.source, s=s0)
        tgt = self.target if s1 is None else replace(self.target, s=s1)
        return EmbeddingQuery(src, tgt)

    def to_dict(self) -> dict:
        return {"source": self.source.to_dict(), "target": self.target.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "EmbeddingQuery":
        if not isinstance(data, dict) or "source" not in data or "target" not in data:
            raise SpecError("a query needs 'source' and 'target'")
        return cls(SpaceSpec.from_dict(data["source"]), SpaceSpec.from_dict(data["target"]))


@dataclass(frozen=True)
class DualExponents:
    p_star: float
    q_star: float


def star_exponents(p0: float, p1: float, q0: float, q1: float) -> DualExponents:
    """``1/p* = (1/p1 - 1/p0)_+`` and ``1/q* = (1/q1 - 1/q0)_+`` (with ``1/inf = 0``)."""
    for v in (p0, p1, q0, q1):
        if not v > 0:
            raise ValueError("exponents must lie in (0, inf]")
    ip = max(_recip(p1) - _recip(p0), 0.0)
    iq = max(_recip(q1) - _recip(q0), 0.0)
    return DualExponents(math.inf if ip == 0.0 else 1.0 / ip, math.inf if iq == 0.0 else 1.0 / iq)


@dataclass
class Verdict:
    outcome: Outcome
    rule: str
    evidence: dict = field(default_factory=dict)
    flags: tuple = ()
    reason: str = ""
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        self.outcome = Outcome(self.outcome)
        if self.outcome is Outcome.BOUNDARY:
            raise ValueError("verdicts are Holds, Fails or Inconclusive")
        if self.outcome is Outcome.INCONCLUSIVE and not self.reason:
            raise ValueError("an Inconclusive verdict needs a reason")
        if self.outcome is not Outcome.INCONCLUSIVE and not self.evidence:
            raise ValueError("a definite verdict needs evidence")

    @property
    def holds(self) -> bool:
        return self.outcome is Outcome.HOLDS

    def to_dict(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "outcome": self.outcome.value, "rule": self.rule,
                "flags": list(self.flags), "reason": self.reason, "warnings": list(self.warnings),
                "evidence": _jsonable(self.evidence)}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    return obj


# --------------------------------------------------------------------------
# the dyadic term
# --------------------------------------------------------------------------

def condition_c_term(query: EmbeddingQuery, cube, tol: float = 1e-8) -> float:
    """``2^{-nu(s0-s1)} w0(Q)^{-1/p0} w1(Q)^{1/p1}`` for a dyadic cube."""
    q = cube if isinstance(cube, DyadicCube) else DyadicCube(*cube)
    src, tgt = query.source, query.target
    m0 = cube_measure(src.weight, q, tol).value
    m1 = cube_measure(tgt.weight, q, tol).value
    return 2.0 ** (-q.nu * (src.s - tgt.s)) * m0 ** (-_recip(src.p)) * m1 ** _recip(tgt.p)


def condition_c_means(query: EmbeddingQuery, cube, tol: float = 1e-8) -> dict:
    """The same term factored through weighted means ``w(Q)/|Q|``."""
    q = cube if isinstance(cube, DyadicCube) else DyadicCube(*cube)
    src, tgt = query.source, query.target
    d = query.d
    i0, i1 = _recip(src.p), _recip(tgt.p)
    mean0 = cube_measure(src.weight, q, tol).value / q.volume
    mean1 = cube_measure(tgt.weight, q, tol).value / q.volume
    exponent = (src.s - d * i0) - (tgt.s - d * i1)
    value = 2.0 ** (-q.nu * exponent) * mean0 ** (-i0) * mean1 ** i1
    return {"exponent": exponent, "mean_w0": mean0, "mean_w1": mean1, "value": value}


# --------------------------------------------------------------------------
# probe geometry
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CriterionPolicy:
    """Knobs of the window evaluators.

    ``line_nu_max`` is the deepest level of the anchor lines (default 24 when both
    weights have vectorized antiderivatives, 16 otherwise).  Ladders run ``m = 2^j dir``
    for ``j <= ladder_depth`` at the levels ``ladder_levels``.  Fits use the last half
    of every probe.
    """

    slope_threshold: float = FLAT_SLOPE
    line_nu_max: int | None = None
    ladder_levels: tuple = (0, 1, 2)
    ladder_depth: int = 20
    residual_max: float = 0.25
    decay_threshold: float = FLAT_SLOPE
    tol: float = 1e-8
    extra_anchors: tuple = ()

    def nu_lines(self, w0: Weight, w1: Weight) -> int:
        if self.line_nu_max is not None:
            return int(self.line_nu_max)
        return 24 if (w0.exact_vectorized and w1.exact_vectorized) else 16


@dataclass(frozen=True)
class _Group:
    label: str
    region: str
    x: tuple
    start: int
    stop: int
    fit_from: float


def _standard_anchors(d: int) -> list:
    pts = [np.zeros(d)]
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        pts.append(e)
    pts.append(np.full(d, 0.5))
    pts.append(np.ones(d))
    e = np.zeros(d)
    e[0] = 2.0
    pts.append(e)
    return [tuple(float(v) for v in p) for p in pts]


def _ladder_dirs(d: int) -> list:
    dirs = []
    for i in range(d):
        e = [0] * d
        e[i] = 1
        dirs.append(tuple(e))
    if d > 1:
        dirs.append(tuple([1] * d))
    return dirs


@functools.lru_cache(maxsize=64)
def _geometry(d: int, window: IndexWindow, nu_lines: int, ladder_levels: tuple, depth: int, anchors: tuple):
    """Arrays ``(nu, m)`` of every probe cube plus the index groups that slice them."""
    nus, ms, groups = [], [], []
    pos = 0

    def add(label, region, x, nu, m, fit_from):
        nonlocal pos
        nu = np.asarray(nu, dtype=int)
        m = np.asarray(m, dtype=float).reshape(nu.size, d)
        nus.append(nu)
        ms.append(m)
        groups.append(_Group(label, region, tuple(x), pos, pos + nu.size, fit_from))
        pos += nu.size

    wn, wm = window_arrays(window, d)
    add("window", "window", wn, wn, wm, math.inf)
    levels = np.arange(nu_lines + 1)
    for a in anchors:
        a_arr = np.asarray(a, dtype=float)
        m = np.rint(np.ldexp(a_arr[None, :], levels[:, None]))
        region = classify_position(a_arr).value
        add(f"line@{_fmt_point(a)}", region, levels, levels, m, nu_lines / 2)
    js = np.arange(depth + 1)
    for nu in ladder_levels:
        for dvec in _ladder_dirs(d):
            m = np.ldexp(1.0, js)[:, None] * np.asarray(dvec, dtype=float)[None, :]
            add(f"ladder@nu={nu}/dir={dvec}", Region.FAR.value, js, np.full(js.size, nu), m, depth / 2)
    nu = np.concatenate(nus)
    m = np.concatenate(ms)
    nu.setflags(write=False)
    m.setflags(write=False)
    return nu, m, tuple(groups)


def _fmt_point(a) -> str:
    return "(" + ",".join(f"{v:g}" for v in a) + ")"


@functools.lru_cache(maxsize=64)
def _shell_geometry(d: int, nu_lines: int, depth: int):
    """Shell representatives ``m = 2^j dir`` (``j <= nu + depth``) at every level."""
    dirs = _ladder_dirs(d)
    nus, ms, index = [], [], []
    pos = 0
    for nu in range(nu_lines + 1):
        js = np.arange(nu + depth + 1)
        rows = [np.zeros((1, d))]
        for dvec in dirs:
            rows.append(np.ldexp(1.0, js)[:, None] * np.asarray(dvec, dtype=float)[None, :])
        m = np.concatenate(rows)
        nus.append(np.full(m.shape[0], nu))
        ms.append(m)
        index.append((pos, js.size, len(dirs)))
        pos += m.shape[0]
    return np.concatenate(nus), np.concatenate(ms), tuple(index)


_LOG_CACHE: dict = {}


def _weight_logs(w: Weight, key, nu: np.ndarray, m: np.ndarray, tol: float, warnings: list) -> np.ndarray:
    """``log2 w(Q)`` over a probe geometry, cached per (weight, geometry)."""
    ck = (w, key, tol)
    hit = _LOG_CACHE.get(ck)
    if hit is not None:
        if hit[1]:
            warnings.append(hit[1])
        return hit[0]
    note = ""
    try:
        out = log2_cube_measures(w, nu, m, tol)
    except QuadratureFailure:
        out = np.empty(nu.size)
        failed = 0
        for i in range(nu.size):
            try:
                out[i] = log2_cube_measures(w, nu[i:i + 1], m[i:i + 1], tol)[0]
            except QuadratureFailure:
                out[i] = np.nan
                failed += 1
        note = f"{failed} cube measures of {w!r} missed the tolerance and were dropped"
        warnings.append(note)
    out.setflags(write=False)
    if len(_LOG_CACHE) > 4096:
        _LOG_CACHE.clear()
    _LOG_CACHE[ck] = (out, note)
    return out


def _anchors_for(query: EmbeddingQuery, policy: CriterionPolicy) -> tuple:
    d = query.d
    pts = _standard_anchors(d)
    for w in (query.source.weight, query.target.weight):
        pts.extend(tuple(float(v) for v in a) for a in w.anchors())
    pts.extend(tuple(float(v) for v in a) for a in policy.extra_anchors)
    seen, out = set(), []
    for p in pts:
        key = tuple(round(v, 12) for v in p)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return tuple(out)


def _log2_terms(query, nu, m, key, policy, warnings):
    src, tgt = query.source, query.target
    l0 = _weight_logs(src.weight, key, nu, m, policy.tol, warnings)
    l1 = _weight_logs(tgt.weight, key, nu, m, policy.tol, warnings)
    i0, i1 = _recip(src.p), _recip(tgt.p)
    with np.errstate(invalid="ignore"):
        t = -nu * (src.s - tgt.s) - i0 * l0 + i1 * l1
    return t


@dataclass(frozen=True)
class ProbeFit:
    label: str
    region: str
    slope: float
    intercept: float
    residual_rms: float
    n: int

    def to_dict(self):
        return dataclasses.asdict(self)


def _fit(x, y, label, region) -> ProbeFit | None:
    ok = np.isfinite(y)
    x, y = np.asarray(x, dtype=float)[ok], y[ok]
    if x.size < 3 or np.ptp(x) == 0:
        return None
    dx = x - x.mean()
    slope = float(dx @ (y - y.mean()) / (dx @ dx))
    intercept = float(y.mean() - slope * x.mean())
    res = y - intercept - slope * x
    return ProbeFit(label, region, slope, intercept, float(np.sqrt(np.mean(res * res))), int(x.size))


def _classify_fits(fits, policy, what) -> tuple[Outcome, str]:
    thr = policy.slope_threshold
    rising = [f for f in fits if f.slope > thr]
    if rising:
        clean = [f for f in rising if f.residual_rms <= policy.residual_max or f.slope > 0.1]
        if clean:
            return Outcome.FAILS, ""
        return Outcome.INCONCLUSIVE, f"{what}: rising slope with a noisy fit ({rising[0].label})"
    return Outcome.HOLDS, ""


# --------------------------------------------------------------------------
# window evaluators
# --------------------------------------------------------------------------

def evaluate_condition_c(query: EmbeddingQuery, window: IndexWindow | None = None,
                         policy: CriterionPolicy | None = None) -> Verdict:
    """Dyadic sup criterion on a finite probe set, classified by fitted log-slopes."""
    policy = policy or CriterionPolicy()
    window = window or IndexWindow.default(query.d)
    src, tgt = query.source, query.target
    nl = policy.nu_lines(src.weight, tgt.weight)
    anchors = _anchors_for(query, policy)
    key = (query.d, window, nl, tuple(policy.ladder_levels), policy.ladder_depth, anchors)
    nu, m, groups = _geometry(*key)
    warnings: list = []
    t = _log2_terms(query, nu, m, key, policy, warnings)
    return _decide_from_terms(t, nu, m, groups, window, policy, warnings, "condition_C")


def _decide_from_terms(t, nu, m, groups, window, policy, warnings, flag) -> Verdict:
    win = groups[0]
    tw = t[win.start:win.stop]
    fits = []
    if np.any(np.isposinf(t)):
        return Verdict(Outcome.INCONCLUSIVE, flag, {}, (flag,),
                       reason="target weight has infinite cube measures", warnings=warnings)
    finite_w = np.where(np.isfinite(tw), tw, -np.inf)
    k = int(np.argmax(finite_w))
    sup_log2 = float(finite_w[k])
    witness = {"nu": int(nu[win.start + k]), "m": [int(v) for v in m[win.start + k]]}
    # per-level maxima of the dense window
    wnu = nu[win.start:win.stop]
    levels = np.arange(window.nu_max + 1)
    level_max = np.array([np.max(finite_w[wnu == v]) if np.any(wnu == v) else -np.inf for v in levels])
    lo = window.nu_max // 2
    f = _fit(levels[lo:], level_max[lo:], "window-level-max", "window")
    if f is not None:
        fits.append(f)
    for g in groups[1:]:
        x = np.asarray(g.x, dtype=float)
        sel = x >= g.fit_from
        f = _fit(x[sel], t[g.start:g.stop][sel], g.label, g.region)
        if f is not None:
            fits.append(f)
    evidence = {"sup_value": 2.0 ** sup_log2 if sup_log2 < 1000 else math.inf, "sup_log2": sup_log2,
                "witness": witness, "fits": fits,
                "max_slope": max((f.slope for f in fits), default=math.nan)}
    if not math.isfinite(sup_log2):
        return Verdict(Outcome.INCONCLUSIVE, flag, evidence, (flag,), reason="no finite terms in the window",
                       warnings=warnings)
    if len(fits) < 2:
        return Verdict(Outcome.INCONCLUSIVE, flag, evidence, (flag,), reason="too few samples to fit slopes",
                       warnings=warnings)
    outcome, reason = _classify_fits(fits, policy, "dyadic sup")
    return Verdict(outcome, flag, evidence, (flag,), reason=reason, warnings=warnings)


def _shell_counts(d: int, jmax: int) -> np.ndarray:
    j = np.arange(jmax + 1, dtype=float)
    outer = (2.0 ** (j + 1) + 1.0) ** d
    inner = np.where(j == 0, 1.0, (2.0 ** j + 1.0) ** d)
    return outer - inner


def evaluate_besov_condition(query: EmbeddingQuery, window: IndexWindow | None = None,
                             policy: CriterionPolicy | None = None) -> Verdict:
    """Mixed-norm criterion ``|| ( || term(nu, .) ||_{l^{p*}} )_nu ||_{l^{q*}} < inf``.

    With ``p* = q* = inf`` this is exactly :func:`evaluate_condition_c`.  Otherwise the
    inner norm at level ``nu`` is assembled from dyadic shells ``2^{j-1} < |m|_inf <= 2^j``
    (each represented by its worst ladder cube times the shell size), and the outer norm
    from the level sequence; convergence is read off from tail slopes.
    """
    policy = policy or CriterionPolicy()
    src, tgt = query.source, query.target
    if src.scale is not Scale.B or tgt.scale is not Scale.B:
        raise ValueError("the Besov criterion needs Besov source and target")
    if src.s < tgt.s:
        raise UnsupportedQuery("the Besov criterion needs s0 >= s1")
    star = star_exponents(src.p, tgt.p, src.q, tgt.q)
    if math.isinf(star.p_star) and math.isinf(star.q_star):
        v = evaluate_condition_c(query, window, policy)
        v.rule = "besov_criterion"
        v.flags = ("besov_criterion", "condition_C")
        v.evidence = {**v.evidence, "p_star": math.inf, "q_star": math.inf}
        return v
    d = query.d
    nl = policy.nu_lines(src.weight, tgt.weight)
    depth = policy.ladder_depth
    key = ("shells", d, nl, depth)
    nu, m, index = _shell_geometry(d, nl, depth)
    warnings: list = []
    t = _log2_terms(query, nu, m, key, policy, warnings)
    if np.any(np.isposinf(t)):
        return Verdict(Outcome.INCONCLUSIVE, "besov_criterion", {}, ("besov_criterion",),
                       reason="target weight has infinite cube measures", warnings=warnings)
    ps = star.p_star
    inner = np.empty(len(index))
    inner_fits = []
    diverges_inner = []
    thr = policy.slope_threshold
    for lvl, (pos, nj, ndir) in enumerate(index):
        origin = t[pos]
        shells = t[pos + 1:pos + 1 + nj * ndir].reshape(ndir, nj)
        worst = np.max(np.where(np.isfinite(shells), shells, -np.inf), axis=0)
        js = np.arange(nj)
        if math.isinf(ps):
            tail = _fit(js[-depth // 2:], worst[-depth // 2:], f"inner-sup@nu={lvl}", Region.FAR.value)
            inner_fits.append(tail)
            if tail is not None and tail.slope > thr:
                diverges_inner.append(lvl)
            inner[lvl] = max(origin, float(np.max(worst)))
        else:
            contrib = np.log2(_shell_counts(d, nj - 1)) + ps * worst  # log2 of shell sums
            tail = _fit(js[-depth // 2:], contrib[-depth // 2:], f"inner-sum@nu={lvl}", Region.FAR.value)
            inner_fits.append(tail)
            if tail is not None and tail.slope > -thr:
                diverges_inner.append(lvl)
                inner[lvl] = math.inf
                continue
            top = float(np.max(np.append(contrib, ps * origin)))
            total = 2.0 ** (ps * origin - top) + float(np.sum(2.0 ** (contrib - top)))
            if tail is not None:
                r = 2.0 ** tail.slope
                total += 2.0 ** (contrib[-1] - top) * r / (1.0 - r)
            inner[lvl] = (top + math.log2(total)) / ps
    evidence = {"p_star": ps, "q_star": star.q_star,
                "inner_log2": [float(v) for v in inner],
                "inner_fits": [f for f in inner_fits if f is not None]}
    if diverges_inner:
        evidence["divergent_levels"] = diverges_inner
        return Verdict(Outcome.FAILS, "besov_criterion", evidence, ("besov_criterion",), warnings=warnings)
    levels = np.arange(inner.size)
    lo = inner.size // 2
    outer = _fit(levels[lo:], inner[lo:], "outer-levels", Region.NEAR_ORIGIN.value)
    evidence["outer_fit"] = outer
    if outer is None:
        return Verdict(Outcome.INCONCLUSIVE, "besov_criterion", evidence, ("besov_criterion",),
                       reason="too few levels to fit", warnings=warnings)
    slope = outer.slope
    if math.isinf(star.q_star):
        ok = slope <= thr
        outcome = Outcome.HOLDS if ok else Outcome.FAILS
        reason = ""
    elif slope < -policy.decay_threshold:
        outcome, reason = Outcome.HOLDS, ""
    elif slope >= -BOUNDARY_EPS:
        outcome, reason = Outcome.FAILS, ""
    else:
        outcome = Outcome.INCONCLUSIVE
        reason = f"level sequence decays too slowly to certify l^q* summability (slope {slope:.4f})"
    if outcome is Outcome.HOLDS:
        finite = inner[np.isfinite(inner)]
        if math.isinf(star.q_star):
            evidence["value_log2"] = float(np.max(finite))
        else:
            qs = star.q_star
            top = float(np.max(finite))
            tot = float(np.sum(2.0 ** (qs * (finite - top))))
            r = 2.0 ** (qs * slope)
            tot += 2.0 ** (qs * (finite[-1] - top)) * r / (1.0 - r)
            evidence["value_log2"] = top + math.log2(tot) / qs
    return Verdict(outcome, "besov_criterion", evidence, ("besov_criterion",), reason=reason, warnings=warnings)


# --------------------------------------------------------------------------
# closed forms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedForm:
    outcome: Outcome
    margins: dict
    rule: str
    strict: bool = False

    @property
    def margin(self) -> float:
        return min(self.margins.values())

    @property
    def band_margin(self) -> float:
        """Smallest margin that is not exactly zero.

        Components that vanish identically (equal exponents on both sides) are equality
        cases resolved by the non-strict rule; they do not make a point ambiguous.
        """
        live = [v for v in self.margins.values() if abs(v) > 1e-12]
        return min(live) if live else 0.0

    @property
    def decision(self) -> Outcome:
        """Holds/Fails after resolving the equality band (non-strict: Holds, strict: Fails)."""
        if self.outcome is Outcome.BOUNDARY:
            return Outcome.FAILS if self.strict else Outcome.HOLDS
        return self.outcome

    def to_dict(self):
        return {"outcome": self.outcome.value, "rule": self.rule, "margins": dict(self.margins),
                "strict": self.strict}


def _judge(margins: dict, rule: str, strict: bool = False, eps: float = BOUNDARY_EPS,
           trivial: tuple = ()) -> ClosedForm:
    """``trivial`` names inequalities of the form ``0 >= 0`` (both sides vanish identically);
    they are reported but do not turn the outcome into Boundary."""
    live = [v for k, v in margins.items() if k not in trivial]
    low = min(live) if live else 0.0
    if low < -eps:
        out = Outcome.FAILS
    elif low <= eps and live:
        out = Outcome.BOUNDARY
    else:
        out = Outcome.HOLDS
    return ClosedForm(out, dict(margins), rule, strict)


def _shift_margins(s0, p0, a0, b0, s1, p1, a1, b1, d):
    i0, i1 = _recip(p0), _recip(p1)
    return {
        "origin": (s0 - (d + a0) * i0) - (s1 - (d + a1) * i1),
        "unweighted": (s0 - d * i0) - (s1 - d * i1),
        "infinity": b0 * i0 - b1 * i1,
    }


def _zero_pair(name, a, b) -> tuple:
    return (name,) if a == 0 and b == 0 else ()


def closed_form_radial(s0, p0, alpha0, beta0, s1, p1, alpha1, beta1, d) -> ClosedForm:
    """Radial two-exponent powers: the three non-strict inequalities."""
    if min(alpha0, beta0, alpha1, beta1) <= -d:
        raise ValueError("radial exponents must exceed -d")
    if p0 > p1:
        raise ValueError("closed form needs p0 <= p1")
    return _judge(_shift_margins(s0, p0, alpha0, beta0, s1, p1, alpha1, beta1, d), "closed_form_radial",
                  trivial=_zero_pair("infinity", beta0, beta1))


def closed_form_partial(s0, p0, alpha0, beta0, s1, p1, alpha1, beta1, n, k) -> ClosedForm:
    """Radial powers in the first ``n`` of ``d = n + k`` coordinates: same inequalities, full ``d``."""
    if min(alpha0, beta0, alpha1, beta1) <= -n:
        raise ValueError("partial radial exponents must exceed -n")
    if p0 > p1:
        raise ValueError("closed form needs p0 <= p1")
    return _judge(_shift_margins(s0, p0, alpha0, beta0, s1, p1, alpha1, beta1, n + k), "closed_form_partial",
                  trivial=_zero_pair("infinity", beta0, beta1))


def closed_form_product(dims, alphas0, alphas1, s0, p0, s1, p1) -> ClosedForm:
    """Block product powers: the shifted inequality plus one per-block inequality."""
    dims = tuple(dims)
    if not (len(dims) == len(alphas0) == len(alphas1)):
        raise ValueError("dims and exponent vectors must have equal length")
    if any(a <= -dj for a, dj in zip(alphas0, dims)) or any(a <= -dj for a, dj in zip(alphas1, dims)):
        raise ValueError("product exponents must satisfy alpha_j > -d_j")
    if p0 > p1:
        raise ValueError("closed form needs p0 <= p1")
    d = sum(dims)
    i0, i1 = _recip(p0), _recip(p1)
    margins = {"origin": (s0 - (d + sum(alphas0)) * i0) - (s1 - (d + sum(alphas1)) * i1)}
    for j, (a, b) in enumerate(zip(alphas0, alphas1)):
        margins[f"block{j}"] = a * i0 - b * i1
    trivial = tuple(f"block{j}" for j, (a, b) in enumerate(zip(alphas0, alphas1)) if a == 0 and b == 0)
    cf = _judge(margins, "closed_form_product", trivial=trivial)
    if cf.outcome is Outcome.HOLDS:
        unweighted = (s0 - d * i0) - (s1 - d * i1)
        if unweighted < -1e-9:
            raise ArithmeticError("product closed form holds but the unweighted inequality fails")
    return cf


def closed_form_distance(k, gamma0, gamma1, s0, p0, s1, p1, d) -> ClosedForm:
    """Powers of the distance to a compact codimension-``k`` manifold."""
    if min(gamma0, gamma1) <= -k:
        raise ValueError("distance exponents must exceed -k")
    if p0 > p1:
        raise ValueError("closed form needs p0 <= p1")
    i0, i1 = _recip(p0), _recip(p1)
    margins = {"manifold": (s0 - (d + gamma0) * i0) - (s1 - (d + gamma1) * i1),
               "infinity": gamma0 * i0 - gamma1 * i1}
    return _judge(margins, "closed_form_distance", trivial=_zero_pair("infinity", gamma0, gamma1))


def closed_form_downward_h(gamma0, gamma1, s0, p0, s1, p1, d) -> ClosedForm:
    """``H^{s0,p0}(|x|^g0) -> H^{s1,p1}(|x|^g1)`` with ``p1 < p0``: both inequalities strict."""
    if not p1 < p0:
        raise ValueError("the downward rule needs p1 < p0")
    for g, p in ((gamma0, p0), (gamma1, p1)):
        if not -d < g < d * (p - 1):
            raise ValueError("exponents must lie in (-d, d(p-1))")
    margins = {"shift": (s0 - (d + gamma0) / p0) - (s1 - (d + gamma1) / p1),
               "integrability": (d + gamma0) / p0 - (d + gamma1) / p1}
    return _judge(margins, "closed_form_downward_h", strict=True)


def closed_form_for(query: EmbeddingQuery) -> ClosedForm | None:
    """Closed-form verdict of the dyadic sup criterion when both weights share a catalog family."""
    src, tgt = query.source, query.target
    w0 = as_catalog(src.weight, like=tgt.weight)
    w1 = as_catalog(tgt.weight, like=w0)
    s0, p0, s1, p1 = src.s, src.p, tgt.s, tgt.p
    if p0 > p1:
        return None
    try:
        if isinstance(w0, Constant) and isinstance(w1, Constant):
            return closed_form_radial(s0, p0, 0, 0, s1, p1, 0, 0, query.d)
        if isinstance(w0, RadialPower) and isinstance(w1, RadialPower):
            return closed_form_radial(s0, p0, w0.alpha, w0.beta, s1, p1, w1.alpha, w1.beta, query.d)
        if (isinstance(w0, PartialRadialPower) and isinstance(w1, PartialRadialPower)
                and (w0.n, w0.k) == (w1.n, w1.k)):
            return closed_form_partial(s0, p0, w0.alpha, w0.beta, s1, p1, w1.alpha, w1.beta, w0.n, w0.k)
        if isinstance(w0, ProductPower) and isinstance(w1, ProductPower) and w0.dims == w1.dims:
            return closed_form_product(w0.dims, w0.alphas, w1.alphas, s0, p0, s1, p1)
        if isinstance(w0, DistancePower) and isinstance(w1, DistancePower) and w0.manifold == w1.manifold:
            return closed_form_distance(w0.k, w0.gamma, w1.gamma, s0, p0, s1, p1, query.d)
    except ValueError:
        return None
    return None


def _downward_gammas(query: EmbeddingQuery):
    out = []
    for w in (query.source.weight, query.target.weight):
        if isinstance(w, Constant):
            out.append(0.0)
        elif isinstance(w, RadialPower) and w.alpha == w.beta:
            out.append(w.alpha)
        else:
            return None
    return out


# --------------------------------------------------------------------------
# dispatcher
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DecisionOptions:
    """``method``: ``"auto"`` prefers closed forms, ``"window"`` always evaluates probes."""

    method: str = "auto"
    window: IndexWindow | None = None
    policy: CriterionPolicy = CriterionPolicy()
    epsilon_loss: float = 0.01
    cross_check: bool = False


def _ap_status(w: Weight, p: float):
    return ap_membership_closed_form(w, p).status


def _a_infinity_warning(w: Weight) -> str | None:
    statuses = [_ap_status(w, p) for p in (1.5, 2.0, 4.0, 16.0, 256.0)]
    if all(s is Membership.NONMEMBER for s in statuses):
        return f"{w!r} is not in A_p for any sampled p; the criterion assumes A_infinity weights"
    return None


def _require_ap(query: EmbeddingQuery, warnings: list) -> str | None:
    """Reason string when an A_p precondition is violated, else None (warnings appended)."""
    for sp, side in ((query.source, "source"), (query.target, "target")):
        st = _ap_status(sp.weight, sp.p)
        if st is Membership.NONMEMBER:
            return f"{side} weight is not in A_{_fmt(sp.p)}"
        if st is Membership.BOUNDARY:
            warnings.append(f"{side} weight sits on the A_{_fmt(sp.p)} boundary")
        if st is Membership.UNKNOWN:
            warnings.append(f"{side} weight A_{_fmt(sp.p)} membership assumed, not verified")
    return None


def _characterized_c(query, opts, rule, flags, warnings) -> Verdict:
    """Verdict from the sup criterion used as a characterization (closed form when possible)."""
    cf = closed_form_for(query) if opts.method != "window" else None
    if cf is not None:
        out = cf.decision
        ev = {"closed_form": cf, "margins": cf.margins}
        if cf.outcome is Outcome.BOUNDARY:
            warnings.append("closed-form inequality holds with equality")
        if opts.cross_check:
            wv = evaluate_condition_c(query, opts.window, opts.policy)
            ev["window_verdict"] = wv.outcome.value
            if {wv.outcome, out} == {Outcome.HOLDS, Outcome.FAILS}:
                warnings.append("window evaluator disagrees with the closed form")
        return Verdict(out, rule, ev, tuple(flags) + ("closed_form",), warnings=warnings)
    v = evaluate_condition_c(query, opts.window, opts.policy)
    v.rule = rule
    v.flags = tuple(flags) + ("condition_C",)
    v.warnings = warnings + v.warnings
    return v


def _sufficient(v: Verdict, rule: str, chain: str) -> Verdict | None:
    if v.outcome is Outcome.HOLDS:
        ev = dict(v.evidence)
        ev["chain"] = chain
        return Verdict(Outcome.HOLDS, rule, ev, v.flags + ("sufficient_chain",), warnings=v.warnings)
    return None


def _check_supported(query: EmbeddingQuery):
    for sp in (query.source, query.target):
        if sp.scale in (Scale.H, Scale.W) and not (1.0 < sp.p < math.inf):
            raise UnsupportedQuery(f"{sp.scale.value} spaces are covered for 1 < p < inf only")


def decide_embedding(query: EmbeddingQuery, options: DecisionOptions | None = None) -> Verdict:
    """Decide whether ``source`` embeds continuously into ``target``."""
    opts = options or DecisionOptions()
    _check_supported(query)
    src, tgt = query.source, query.target
    warnings: list = []
    for w in {src.weight, tgt.weight}:
        msg = _a_infinity_warning(w)
        if msg:
            warnings.append(msg)
    S0, S1 = src.scale, tgt.scale
    hw = (Scale.H, Scale.W)

    if S0 is Scale.B and S1 is Scale.B:
        return _decide_besov(query, opts, warnings)

    if tgt.p < src.p:
        if S0 is Scale.H and S1 is Scale.H:
            gam = _downward_gammas(query)
            if gam is not None:
                try:
                    cf = closed_form_downward_h(gam[0], gam[1], src.s, src.p, tgt.s, tgt.p, query.d)
                except ValueError as exc:
                    return Verdict(Outcome.INCONCLUSIVE, "closed_form_downward_h", {}, ("section_4_5",),
                                   reason=str(exc), warnings=warnings)
                return Verdict(cf.decision, "closed_form_downward_h", {"closed_form": cf, "margins": cf.margins},
                               ("section_4_5", "closed_form"), warnings=warnings)
        return Verdict(Outcome.INCONCLUSIVE, "none", {}, (),
                       reason="no characterization in paper for p1 < p0 with these scales/weights",
                       warnings=warnings)

    if S0 in hw and S1 in hw:
        if S1 is Scale.W and tgt.s < 0 or S0 is Scale.W and S1 is Scale.H and not src.s > 0:
            raise UnsupportedQuery("mixed H/W embeddings need s1 >= 0 (H->W) and s0 > 0 (W->H)")
        if not src.s > tgt.s:
            return Verdict(Outcome.INCONCLUSIVE, "hw_condition_C", {}, (), reason="needs s0 > s1",
                           warnings=warnings)
        bad = _require_ap(query, warnings)
        if bad:
            return Verdict(Outcome.INCONCLUSIVE, "hw_condition_C", {}, (), reason=bad, warnings=warnings)
        return _characterized_c(query, opts, "hw_condition_C", ("condition_C",), warnings)

    if S0 is Scale.F and S1 is Scale.F:
        if not src.s > tgt.s:
            return Verdict(Outcome.INCONCLUSIVE, "f_condition_C", {}, (),
                           reason="the dyadic criterion for F spaces needs s0 > s1", warnings=warnings)
        return _characterized_c(query, opts, "f_condition_C", ("condition_C",), warnings)

    # mixed scales: normalize H/W to their B/F descriptions first
    if S0 in hw or S1 in hw:
        bad = _require_ap(query, warnings)
        if bad:
            return Verdict(Outcome.INCONCLUSIVE, "mixed", {}, (), reason=bad, warnings=warnings)
    nq = EmbeddingQuery(src.as_bf(), tgt.as_bf())
    if nq.source.scale is nq.target.scale:
        if nq.source.scale is Scale.B:
            v = _decide_besov(nq, opts, warnings)
        else:
            if not src.s > tgt.s:
                return Verdict(Outcome.INCONCLUSIVE, "f_condition_C", {}, (), reason="needs s0 > s1",
                               warnings=warnings)
            v = _characterized_c(nq, opts, "f_condition_C", ("condition_C",), warnings)
        v.flags = v.flags + ("normalized_scales",)
        return v
    if nq.source.scale is Scale.B:
        return _decide_b_to_f(nq, opts, warnings)
    return _decide_f_to_b(nq, opts, warnings)


def _decide_besov(query, opts, warnings) -> Verdict:
    src, tgt = query.source, query.target
    if src.s < tgt.s:
        return Verdict(Outcome.INCONCLUSIVE, "besov_criterion", {}, (), reason="the Besov criterion needs s0 >= s1",
                       warnings=warnings)
    star = star_exponents(src.p, tgt.p, src.q, tgt.q)
    if math.isinf(star.p_star) and math.isinf(star.q_star) and src.s > tgt.s:
        v = _characterized_c(query, opts, "besov_criterion", ("besov_criterion",), warnings)
        return v
    v = evaluate_besov_condition(query, opts.window, opts.policy)
    v.warnings = warnings + v.warnings
    return v


def _jf_ready(query) -> bool:
    src, tgt = query.source, query.target
    return 1.0 < src.p < tgt.p < math.inf


def _weights_ap(query) -> bool:
    return all(_ap_status(sp.weight, sp.p) in (Membership.MEMBER, Membership.BOUNDARY, Membership.UNKNOWN)
               for sp in (query.source, query.target))


def _decide_b_to_f(query, opts, warnings) -> Verdict:
    src, tgt = query.source, query.target
    rule = "jawerth_franke"
    jf = _jf_ready(query) and _weights_ap(query) and (tgt.q is None or tgt.q >= 1.0)
    if jf and src.s > tgt.s and src.q == tgt.p:
        return _characterized_c(query, opts, rule, ("condition_C", "jawerth_franke"), warnings)
    tried = []
    if jf and src.s > tgt.s:
        if src.q <= tgt.p:
            v = _sufficient(_characterized_c(query, opts, rule, ("condition_C",), list(warnings)), rule,
                            "l^q monotonicity then Jawerth-Franke")
            tried.append("monotonicity+JF")
        else:
            s0 = src.s - opts.epsilon_loss
            v = None
            if s0 > tgt.s:
                v = _sufficient(_characterized_c(query.with_smoothness(s0=s0), opts, rule, ("condition_C",),
                                                 list(warnings)), rule, "smoothness loss then Jawerth-Franke")
            tried.append("epsilon-loss+JF")
        if v is not None:
            return v
    # B -> B_{p1, min(p1, q1)} -> F_{p1, q1}
    bq = EmbeddingQuery(src, replace(tgt, scale=Scale.B, q=min(tgt.p, tgt.q)))
    if src.s >= tgt.s:
        v = _sufficient(_decide_besov(bq, opts, list(warnings)), "minkowski_chain", "Besov criterion then Minkowski")
        tried.append("Besov+Minkowski")
        if v is not None:
            return v
    return Verdict(Outcome.INCONCLUSIVE, rule, {"tried": tried}, ("sufficient_chain",),
                   reason="only sufficient reductions apply and none was certified", warnings=warnings)


def _decide_f_to_b(query, opts, warnings) -> Verdict:
    src, tgt = query.source, query.target
    rule = "jawerth_franke"
    jf = _jf_ready(query) and _weights_ap(query) and src.q >= 1.0
    if jf and src.s > tgt.s and tgt.q == src.p:
        return _characterized_c(query, opts, rule, ("condition_C", "jawerth_franke"), warnings)
    tried = []
    if jf and src.s > tgt.s:
        if tgt.q >= src.p:
            v = _sufficient(_characterized_c(query, opts, rule, ("condition_C",), list(warnings)), rule,
                            "Jawerth-Franke then l^q monotonicity")
            tried.append("JF+monotonicity")
        else:
            s1 = tgt.s + opts.epsilon_loss
            v = None
            if src.s > s1:
                v = _sufficient(_characterized_c(query.with_smoothness(s1=s1), opts, rule, ("condition_C",),
                                                 list(warnings)), rule, "Jawerth-Franke then smoothness loss")
            tried.append("JF+epsilon-loss")
        if v is not None:
            return v
    # F -> B_{p0, max(p0, q0)} -> B
    bq = EmbeddingQuery(replace(src, scale=Scale.B, q=max(src.p, src.q)), tgt)
    if src.s >= tgt.s:
        v = _sufficient(_decide_besov(bq, opts, list(warnings)), "minkowski_chain", "Minkowski then Besov criterion")
        tried.append("Minkowski+Besov")
        if v is not None:
            return v
    return Verdict(Outcome.INCONCLUSIVE, rule, {"tried": tried}, ("sufficient_chain",),
                   reason="only sufficient reductions apply and none was certified", warnings=warnings)


# --------------------------------------------------------------------------
# cross validation
# --------------------------------------------------------------------------

CSV_COLUMNS = ["index", "source", "target", "closed_form", "window", "margin", "margins", "agree", "hard_disagreement",
               "max_slope", "note"]


@dataclass
class CrossValidationRow:
    index: int
    query: EmbeddingQuery
    closed: ClosedForm | None
    window: Verdict | None
    note: str = ""

    @property
    def closed_decision(self):
        return None if self.closed is None else self.closed.decision

    @property
    def agree(self) -> bool:
        return self.window is not None and self.window.outcome is self.closed_decision

    @property
    def hard_disagreement(self) -> bool:
        if self.window is None or self.closed is None:
            return False
        return {self.window.outcome, self.closed_decision} == {Outcome.HOLDS, Outcome.FAILS}

    def csv_row(self) -> list:
        return [self.index, self.query.source.label(), self.query.target.label(),
                "" if self.closed is None else self.closed.outcome.value,
                "" if self.window is None else self.window.outcome.value,
                "" if self.closed is None else f"{self.closed.margin:.6g}",
                "" if self.closed is None else json.dumps({k: round(v, 12) for k, v in self.closed.margins.items()}),
                int(self.agree), int(self.hard_disagreement),
                "" if self.window is None else f"{self.window.evidence.get('max_slope', math.nan):.6g}",
                self.note]


@dataclass
class CrossValidationReport:
    rows: list

    @property
    def total(self) -> int:
        return len(self.rows)

    @property
    def agreement_rate(self) -> float:
        return sum(r.agree for r in self.rows) / max(1, len(self.rows))

    @property
    def disagreements(self) -> list:
        return [r for r in self.rows if r.hard_disagreement]

    @property
    def inconclusive(self) -> list:
        return [r for r in self.rows if r.window is not None and r.window.outcome is Outcome.INCONCLUSIVE]

    @property
    def errors(self) -> list:
        return [r for r in self.rows if r.window is None]

    def summary(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "total": self.total, "agreement_rate": self.agreement_rate,
                "hard_disagreements": len(self.disagreements), "inconclusive": len(self.inconclusive),
                "errors": len(self.errors)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# embedkit cross_validate schema {SCHEMA_VERSION} version {__version__}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(r.csv_row())
        return buf.getvalue()


def _cv_one(args):
    index, query, window, policy, besov = args
    closed = closed_form_for(query)
    try:
        if besov and query.source.scale is Scale.B and query.target.scale is Scale.B:
            v = evaluate_besov_condition(query, window, policy)
        else:
            v = evaluate_condition_c(query, window, policy)
        note = ""
    except Exception as exc:  # a failed row is reported, the sweep continues
        v, note = None, f"{type(exc).__name__}: {exc}"
    return CrossValidationRow(index, query, closed, v, note)


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get("EMBEDKIT_THREADS")
    n = requested if requested is not None else (int(cap) if cap else 1)
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def cross_validate(queries: Iterable[EmbeddingQuery], window: IndexWindow | None = None,
                   policy: CriterionPolicy | None = None, besov: bool = False,
                   workers: int | None = None) -> CrossValidationReport:
    """Compare window verdicts against closed forms on a grid of queries (rows keep grid order)."""
    policy = policy or CriterionPolicy()
    jobs = [(i, q, window, policy, besov) for i, q in enumerate(queries)]
    n = worker_count(workers)
    if n == 1 or len(jobs) < 2:
        rows = [_cv_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(_cv_one, jobs, chunksize=max(1, len(jobs) // (8 * n))))
    return CrossValidationReport(rows)


def sp_pairs(s_values: Sequence[float], p_values: Sequence[float]):
    """All ``(s0, p0, s1, p1)`` with ``s0 > s1`` and ``p0 <= p1``."""
    for s0 in s_values:
        for s1 in s_values:
            if not s0 > s1:
                continue
            for p0 in p_values:
                for p1 in p_values:
                    if p0 <= p1:
                        yield s0, p0, s1, p1


def catalog_grid(weight_pairs, s_values, p_values, band: float = 0.05, scale: str = "F", q: float = 2.0):
    """F-scale (by default) queries over weight pairs and an (s, p) grid, skipping points within ``band``
    of the closed-form boundary (see :attr:`ClosedForm.band_margin`)."""
    out = []
    for w0, w1 in weight_pairs:
        for s0, p0, s1, p1 in sp_pairs(s_values, p_values):
            qy = EmbeddingQuery(SpaceSpec(scale, s0, p0, q, w0), SpaceSpec(scale, s1, p1, q, w1))
            cf = closed_form_for(qy)
            if cf is None or abs(cf.band_margin) < band:
                continue
            out.append(qy)
    return out
