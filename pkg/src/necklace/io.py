"""Deterministic text output: 17 significant digits, no locale dependence."""
from __future__ import annotations

import json
import math
import os
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return "null"
        return fmt(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    if isinstance(obj, dict) and "schema" not in obj:
        obj = {"schema": SCHEMA_VERSION, **obj}
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def write_rows(path, header: str, rows) -> Path:
    """CSV writer; floats get 17 significant digits, other values ``str``."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row))
            fh.write("\n")
    return path


def output_dir(explicit=None) -> Path:
    out = Path(explicit or os.environ.get("NECKLACE_OUT", "."))
    out.mkdir(parents=True, exist_ok=True)
    return out
