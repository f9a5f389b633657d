"""Field files, synthetic field descriptors and spec loading.

Binary field layout (little endian)::

    magic   8 bytes  b"EMBKFLD1"
    d       uint32
    L       float64
    N       uint64
    kind    uint8    0 = float64, 1 = complex64, 2 = complex128
    payload N**d values, row-major (C order)
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import SpecError
from .oracle import DEFAULT_GRID, GridField, make_atom, random_band_limited

MAGIC = b"EMBKFLD1"
_HEADER = struct.Struct("<IdQB")
_KINDS = {0: np.dtype("<f8"), 1: np.dtype("<c8"), 2: np.dtype("<c16")}


def write_field(path, f: GridField, complex64: bool = False) -> None:
    v = f.values
    if np.iscomplexobj(v):
        kind = 1 if complex64 else 2
    else:
        kind = 0
    data = np.ascontiguousarray(v, dtype=_KINDS[kind])
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEADER.pack(f.d, f.L, f.N, kind))
        fh.write(data.tobytes(order="C"))


def read_field(path) -> GridField:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise SpecError(f"{path}: not an embedkit field file")
    try:
        d, L, N, kind = _HEADER.unpack_from(raw, 8)
        dt = _KINDS[kind]
    except (struct.error, KeyError) as exc:
        raise SpecError(f"{path}: corrupt header") from exc
    body = raw[8 + _HEADER.size:]
    count = N**d
    if len(body) != count * dt.itemsize:
        raise SpecError(f"{path}: payload holds {len(body)} bytes, expected {count * dt.itemsize}")
    vals = np.frombuffer(body, dtype=dt).reshape((N,) * d)
    return GridField(d, L, N, vals.astype(np.complex128 if kind else np.float64))


# --------------------------------------------------------------------------
# descriptors
# --------------------------------------------------------------------------

def _grid(desc):
    g = desc.get("grid", {})
    d = int(g.get("d", desc.get("d", 1)))
    if d not in DEFAULT_GRID:
        raise SpecError("grid dimension must be 1 or 2")
    L0, N0 = DEFAULT_GRID[d]
    return d, float(g.get("L", L0)), int(g.get("N", N0))


def _vec(desc, key, d, default=0.0):
    v = np.atleast_1d(np.asarray(desc.get(key, [default] * d), dtype=float))
    if v.size != d:
        raise SpecError(f"'{key}' must have {d} entries")
    return v


def fields_from_descriptor(desc: dict) -> list:
    """Build fields from a JSON descriptor.

    Kinds: ``tone`` (``exp(i xi.x)``), ``cosine``, ``gaussian``, ``atom`` and ``random``
    (seeded wave-packet family).  Every kind accepts ``grid: {d, L, N}``.
    """
    if not isinstance(desc, dict) or "kind" not in desc:
        raise SpecError("field descriptor needs a 'kind'")
    kind = desc["kind"]
    d, L, N = _grid(desc)
    amp = float(desc.get("amplitude", 1.0))
    try:
        if kind in ("tone", "cosine"):
            xi = _vec(desc, "xi", d)
            fn = (lambda *x: np.exp(1j * sum(k * xx for k, xx in zip(xi, x)))) if kind == "tone" else \
                (lambda *x: np.cos(sum(k * xx for k, xx in zip(xi, x))))
            return [GridField.sample(fn, d, L, N) * amp]
        if kind == "gaussian":
            c = _vec(desc, "center", d)
            sigma = float(desc.get("sigma", 0.5))
            return [GridField.sample(lambda *x: np.exp(-0.5 * sum((xx - ci) ** 2 for xx, ci in zip(x, c)) / sigma**2),
                                     d, L, N) * amp]
        if kind == "atom":
            m = [int(v) for v in _vec(desc, "m", d)]
            return [make_atom(int(desc.get("nu", 0)), m, d, L, N) * amp]
        if kind == "random":
            return random_band_limited(int(desc.get("n", 1)), int(desc.get("seed", 0)), d, L, N,
                                       float(desc.get("band", 16.0)), int(desc.get("packets", 6)))
    except (TypeError, ValueError) as exc:
        raise SpecError(f"bad '{kind}' descriptor: {exc}") from exc
    raise SpecError(f"unknown field kind '{kind}'")


def load_json(source) -> object:
    """Parse inline JSON text or the contents of a file path."""
    text = str(source)
    if not text.lstrip().startswith(("{", "[")):
        try:
            text = Path(text).read_text()
        except OSError as exc:
            raise SpecError(f"cannot read {source}: {exc}") from exc
    if not text.strip():
        raise SpecError("empty spec")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"malformed JSON: {exc}") from exc


def dump_json(obj, path=None) -> str:
    """Deterministic JSON (sorted keys, fixed indentation); writes to ``path`` when given."""
    text = json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def _default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "to_dict"):
        return o.to_dict()
    if hasattr(o, "value"):
        return o.value
    return repr(o)
