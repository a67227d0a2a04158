"""CSV and JSON artifacts.

CSV files start with ``# key=value`` metadata lines followed by a header row.
Floats are written with ``repr`` so re-reading and re-writing a file
reproduces it byte for byte.
"""

from __future__ import annotations

import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from .engine import Trace

_INT = re.compile(r"[+-]?\d+")


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def parse_value(s: str):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    if _INT.fullmatch(s):
        return int(s)
    try:
        return float(s)
    except ValueError:
        return s


def render_csv(columns, rows, meta=None) -> str:
    lines = [f"# {k}={format_value(v)}" for k, v in (meta or {}).items()]
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_csv(text: str):
    """Return ``(meta, columns, rows)`` with values converted by :func:`parse_value`."""
    meta = {}
    columns = None
    rows = []
    for line in text.splitlines():
        if columns is None and line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            meta[key] = parse_value(value)
        elif columns is None:
            columns = line.split(",")
        elif line:
            rows.append([parse_value(v) for v in line.split(",")])
    return meta, columns or [], rows


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def render_json(record) -> str:
    """JSON text; non-finite floats become null."""
    return json.dumps(_clean(record), indent=2) + "\n"


def parse_json(text: str):
    return json.loads(text)


def write_text(text: str, path=None):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def trace_to_csv(trace: Trace, extra_meta=None) -> str:
    meta = trace.metadata()
    meta.update(extra_meta or {})
    return render_csv(["q", "p"], zip(trace.q.tolist(), trace.p.tolist()), meta)


def trace_from_csv(text: str) -> Trace:
    meta, columns, rows = parse_csv(text)
    if columns != ["q", "p"]:
        raise ValueError(f"expected header q,p, got {columns}")
    q = [r[0] for r in rows]
    p = [float(r[1]) for r in rows]
    return Trace(float(meta["lambda"]), meta.get("delta"), meta["mode"], q, p, depol=meta.get("depol"))
