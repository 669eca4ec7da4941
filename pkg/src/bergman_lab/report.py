"""Machine-readable report emission: versioned JSON and CSV.

JSON documents carry a ``schema`` tag and a ``generated_at`` timestamp; the
rest of the payload is a pure function of the run configuration (sorted
keys, stable case order), so two runs with the same configuration and seed
differ only in the timestamp line.  Infinities are encoded as the string
``"inf"``, complex numbers as ``[re, im]`` pairs, and CSV floats are
written with 17 significant digits.
"""
from __future__ import annotations

import datetime
import io
import json
import math
import sys

import numpy as np

SCHEMA_VERSION = "v1"


def fmt_float(x: float) -> str:
    """17-significant-digit decimal form (round-trip exact for doubles)."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def sanitize(obj):
    """Recursively convert a payload into JSON-encodable primitives."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [sanitize(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        return [c.real, c.imag]
    return obj


def json_report(command: str, payload: dict, timestamp: bool = True) -> str:
    doc = {"schema": f"bergman-lab/{command}/{SCHEMA_VERSION}"}
    if timestamp:
        doc["generated_at"] = datetime.datetime.now(
            datetime.timezone.utc).isoformat()
    doc.update(sanitize(payload))
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def csv_report(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, (float, np.floating)):
                cells.append(fmt_float(float(v)))
            elif isinstance(v, (complex, np.complexfloating)):
                cells.append(repr(complex(v)))
            else:
                cells.append(str(v))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def write_text(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
