"""Command-line front end: ``embedkit check|ap|cube|probe|gn|sweep``.

Exit codes: ``check`` returns 0 (Holds), 1 (Fails) or 2 (Inconclusive); the other
commands return 0, except ``sweep``, which returns 1 when any row disagrees hard with
its closed form.  Malformed input exits with 64, other failures with 3.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .criteria import (
    SCHEMA_VERSION, CriterionPolicy, DecisionOptions, EmbeddingQuery, Outcome, SpaceSpec, catalog_grid,
    closed_form_for, cross_validate, decide_embedding,
)
from .dyadic import DyadicCube, IndexWindow, classify_region
from .errors import EmbedkitError, SpecError
from .io import dump_json, fields_from_descriptor, load_json
from .oracle import embedding_ratio_probe, gn_check
from .weights import (
    ApPolicy, ap_membership_closed_form, cube_measure, estimate_ap_constant, from_dict as weight_from_dict,
)

EXIT_SPEC = 64
EXIT_ERROR = 3
_EXIT = {Outcome.HOLDS: 0, Outcome.FAILS: 1, Outcome.INCONCLUSIVE: 2}
COMMANDS = ("check", "ap", "cube", "probe", "gn", "sweep")


@dataclass(frozen=True)
class RunConfig:
    command: str
    spec: str | None = None
    out: str | None = None
    format: str = "json"
    nu_max: int | None = None
    m_radius: int | None = None
    eps: float | None = None
    tol: float | None = None
    seed: int | None = None
    grid: str | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise SpecError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise SpecError("--format must be json or csv")
        for name in ("eps", "tol"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise SpecError(f"--{name} must be positive")
        if self.eps is not None and self.eps >= 1:
            raise SpecError("--eps must be below 1")
        if self.nu_max is not None and self.nu_max < 0:
            raise SpecError("--nu-max must be nonnegative")
        if self.m_radius is not None and self.m_radius < 0:
            raise SpecError("--m-radius must be nonnegative")

    def load(self):
        src = self.spec if self.spec is not None else self.grid
        if src is None:
            raise SpecError(f"'{self.command}' needs --spec")
        return load_json(src)

    def window(self, d: int) -> IndexWindow | None:
        if self.nu_max is None and self.m_radius is None:
            return None
        kw = {}
        if self.nu_max is not None:
            kw["nu_max"] = self.nu_max
        if self.m_radius is not None:
            kw["m_radius"] = self.m_radius
        return IndexWindow.default(d, **kw)

    def policy(self) -> CriterionPolicy:
        return CriterionPolicy() if self.tol is None else CriterionPolicy(tol=self.tol)


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _need(obj, key, where="spec"):
    if not isinstance(obj, dict) or key not in obj:
        raise SpecError(f"{where} is missing '{key}'")
    return obj[key]


def _query(obj) -> EmbeddingQuery:
    try:
        return EmbeddingQuery.from_dict(obj)
    except SpecError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecError(f"malformed query: {exc}") from exc


def _weight(obj):
    if not isinstance(obj, dict):
        raise SpecError("weight must be an object")
    return weight_from_dict(obj)


def _floats(v):
    return [float(x) for x in (v if isinstance(v, list) else [v])]


def _csv(columns, rows, tag) -> str:
    buf = io.StringIO()
    buf.write(f"# embedkit {tag} schema {SCHEMA_VERSION} version {__version__}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return " ".join(_cell(x) for x in v)
    return "" if v is None else str(v)


def _emit(cfg: RunConfig, payload: dict, columns=None, rows=None, tag=None):
    if cfg.format == "csv" and columns is not None:
        text = _csv(columns, rows, tag)
    else:
        text = dump_json(dict(payload, schema_version=SCHEMA_VERSION))
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_check(cfg: RunConfig) -> int:
    spec = cfg.load()
    q = _query(spec)
    opts = DecisionOptions(method=str(spec.get("method", "auto")), window=cfg.window(q.d), policy=cfg.policy())
    if cfg.eps is not None:
        opts = replace(opts, epsilon_loss=cfg.eps)
    v = decide_embedding(q, opts)
    row = {"source": q.source.label(), "target": q.target.label(), "outcome": v.outcome.value, "rule": v.rule,
           "reason": v.reason, "warnings": v.warnings}
    _emit(cfg, {"query": q.to_dict(), "verdict": v.to_dict()},
          ["source", "target", "outcome", "rule", "reason", "warnings"], [row], "check")
    return _EXIT[v.outcome]


def cmd_ap(cfg: RunConfig) -> int:
    spec = cfg.load()
    w = _weight(_need(spec, "weight"))
    kw = {} if cfg.tol is None else {"tol": cfg.tol}
    rows = []
    for p in _floats(_need(spec, "p")):
        est = estimate_ap_constant(w, p, ApPolicy.for_weight(w, **kw))
        cf = ap_membership_closed_form(w, p)
        rows.append({"p": p, "closed_form": cf.status.value, "inferred": cf.inferred, "margin": cf.margin,
                     "estimate": est.classification.value, "supremum": est.supremum_value,
                     "growth_slope": est.growth_slope, "samples": est.samples})
    _emit(cfg, {"weight": w.to_dict(), "rows": rows},
          ["p", "closed_form", "inferred", "margin", "estimate", "supremum", "growth_slope", "samples"], rows, "ap")
    return 0


def cmd_cube(cfg: RunConfig) -> int:
    spec = cfg.load()
    w = _weight(_need(spec, "weight"))
    nu_max = cfg.nu_max if cfg.nu_max is not None else int(spec.get("nu_max", 4))
    radius = cfg.m_radius if cfg.m_radius is not None else int(spec.get("m_radius", 0))
    tol = cfg.tol if cfg.tol is not None else float(spec.get("tol", 1e-10))
    eps = cfg.eps if cfg.eps is not None else float(spec.get("eps", 0.1))
    if "cubes" in spec:
        cubes = [DyadicCube(int(c["nu"]), tuple(c["m"])) for c in spec["cubes"]]
    else:
        window = IndexWindow(nu_max=nu_max, m_radius=radius, scale_with_level=False)
        from .dyadic import enumerate_window
        cubes = list(enumerate_window(window, w.d))
    rows = []
    for c in cubes:
        try:
            r = cube_measure(w, c, tol=tol)
            rows.append({"nu": c.nu, "m": list(c.m), "region": classify_region(c, eps).value, "measure": r.value,
                         "log2_measure": math.log2(r.value) if r.value > 0 else -math.inf, "path": r.path,
                         "error": r.error, "note": ""})
        except EmbedkitError as exc:  # the row is marked and the table continues
            rows.append({"nu": c.nu, "m": list(c.m), "region": classify_region(c, eps).value, "measure": None,
                         "log2_measure": None, "path": None, "error": None, "note": f"{type(exc).__name__}: {exc}"})
    _emit(cfg, {"weight": w.to_dict(), "rows": rows},
          ["nu", "m", "region", "measure", "log2_measure", "path", "error", "note"], rows, "cube")
    return 0


def cmd_probe(cfg: RunConfig) -> int:
    spec = cfg.load()
    q = _query(_need(spec, "query"))
    grid = spec.get("grid", {})
    nus = [int(v) for v in spec.get("nus", [2, 3, 4, 5, 6])]
    positions = spec.get("positions")
    rep = embedding_ratio_probe(q, nus, positions, grid.get("L"), grid.get("N"))
    rows = [dict(ln.to_dict(), nus=ln.nus, ratios=ln.ratios) for ln in rep.lines]
    _emit(cfg, {"query": q.to_dict(), "report": rep.to_dict()},
          ["label", "measured_slope", "analytic_slope", "deviation", "nus", "ratios"], rows, "probe")
    return 0


def _gn_space(obj, where):
    if not isinstance(obj, dict):
        raise SpecError(f"'{where}' must be an object")
    sp = SpaceSpec.from_dict(dict(obj, scale=obj.get("scale", "F")))
    return sp.s, sp.p, sp.q, sp.weight


def cmd_gn(cfg: RunConfig) -> int:
    spec = cfg.load()
    s0, p0, q0, w0 = _gn_space(_need(spec, "source"), "source")
    s1, p1, q1, w1 = _gn_space(_need(spec, "target"), "target")
    family = dict(spec.get("family", {"kind": "random", "n": 50}))
    family.setdefault("kind", "random")
    family.setdefault("grid", {"d": w0.d})
    if cfg.seed is not None:
        family["seed"] = cfg.seed
    fields = fields_from_descriptor(family)
    rows = []
    for theta in _floats(_need(spec, "theta")):
        rep = gn_check(fields, theta, s0, p0, q0, w0, s1, p1, q1, w1)
        rows.append({"theta": theta, "s": rep.s, "p": rep.p, "q": rep.q, "weight": repr(rep.weight),
                     "max_ratio": rep.max_ratio, "min_ratio": float(np.min(rep.ratios)), "n": len(rep.ratios)})
    _emit(cfg, {"family": family, "rows": rows},
          ["theta", "s", "p", "q", "weight", "max_ratio", "min_ratio", "n"], rows, "gn")
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    spec = cfg.load()
    pairs = [(_weight(a), _weight(b)) for a, b in _need(spec, "weight_pairs")]
    queries = catalog_grid(pairs, _floats(_need(spec, "s_values")), _floats(_need(spec, "p_values")),
                           band=float(spec.get("band", 0.05)), scale=str(spec.get("scale", "F")),
                           q=float(spec.get("q", 2.0)))
    d = pairs[0][0].d if pairs else 1
    report = cross_validate(queries, cfg.window(d), cfg.policy(), besov=bool(spec.get("besov", False)))
    text = report.to_csv() if cfg.format == "csv" else dump_json(
        {"schema_version": SCHEMA_VERSION, "summary": report.summary(),
         "rows": [{"index": r.index, "query": r.query.to_dict(),
                   "closed_form": None if r.closed is None else r.closed.outcome.value,
                   "margins": None if r.closed is None else r.closed.margins,
                   "window": None if r.window is None else r.window.outcome.value,
                   "agree": r.agree, "note": r.note} for r in report.rows]})
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    sys.stderr.write(dump_json(report.summary()))
    return 1 if report.disagreements else 0


_HANDLERS = {"check": cmd_check, "ap": cmd_ap, "cube": cmd_cube, "probe": cmd_probe, "gn": cmd_gn,
             "sweep": cmd_sweep}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_SPEC)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="embedkit", description="Decide and probe embeddings between weighted function spaces.")
    ap.add_argument("--version", action="version", version=f"embedkit {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--spec", help="JSON file or inline JSON")
    ap.add_argument("--out", help="output path (default: stdout)")
    ap.add_argument("--format", choices=("json", "csv"), default="json")
    ap.add_argument("--nu-max", type=int, help="deepest window level")
    ap.add_argument("--m-radius", type=int, help="window translation radius")
    ap.add_argument("--eps", type=float, help="epsilon-loss for check; region threshold for cube")
    ap.add_argument("--tol", type=float, help="quadrature tolerance")
    ap.add_argument("--seed", type=int, help="seed for random function families")
    ap.add_argument("--grid", help="sweep grid JSON (alias of --spec)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.command, args.spec, args.out, args.format, args.nu_max, args.m_radius, args.eps,
                        args.tol, args.seed, args.grid)
        return _HANDLERS[cfg.command](cfg)
    except SpecError as exc:
        sys.stderr.write(f"embedkit: malformed spec: {exc}\n")
        return EXIT_SPEC
    except (EmbedkitError, ValueError) as exc:
        sys.stderr.write(f"embedkit: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
