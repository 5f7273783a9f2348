"""Deterministic CSV/JSON emission with metadata headers.

Every table carries a comment header with the package version, the config
digest and a label of the quantity emitted; identical config and version
give byte-identical files (floats are written in shortest round-trip
form, no timestamps, keys sorted).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import __version__


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, complex):
        return f"{_fmt(x.real)}{'+' if x.imag >= 0 else '-'}{_fmt(abs(x.imag))}j"
    return repr(float(x))


def metadata_lines(meta: dict) -> list[str]:
    lines = [f"# generated-by: slowdisc {__version__}"]
    for key in sorted(meta):
        lines.append(f"# {key}: {meta[key]}")
    return lines


def write_csv(path: str | Path, meta: dict, columns: dict) -> Path:
    """Write named columns (equal-length 1-d arrays) with a metadata header."""
    path = Path(path)
    names = list(columns)
    arrays = [np.atleast_1d(np.asarray(columns[n])) for n in names]
    n_rows = len(arrays[0])
    if any(len(a) != n_rows for a in arrays):
        raise ValueError("column length mismatch")
    out = metadata_lines(meta)
    out.append(",".join(names))
    for i in range(n_rows):
        out.append(",".join(_fmt(a[i]) for a in arrays))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n")
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": float(obj.real), "im": float(obj.imag)}
    return obj


def write_json(path: str | Path, meta: dict, payload) -> Path:
    path = Path(path)
    doc = {"meta": {"generated_by": f"slowdisc {__version__}", **_jsonable(meta)},
           "data": _jsonable(payload)}
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return path
