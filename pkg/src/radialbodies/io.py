"""JSON specs in, CSV/JSON artifacts out."""

from __future__ import annotations

import io
import json
import math
from pathlib import Path

import numpy as np

from .geometry import ConvexBody, body_from_spec
from .logconcave import LogConcaveFn, generalized_covariogram, make_function


class InputError(ValueError):
    """A malformed input file or field; the message names the location."""


def load_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"{path}: cannot read ({e.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None


def parse_body(spec, where: str = "body") -> ConvexBody:
    if isinstance(spec, ConvexBody):
        return spec
    if not isinstance(spec, dict):
        raise InputError(f"{where}: expected an object, got {type(spec).__name__}")
    try:
        return body_from_spec(spec)
    except KeyError as e:
        raise InputError(f"{where}: missing field {e.args[0]!r}") from None
    except (ValueError, TypeError) as e:
        raise InputError(f"{where}: {e}") from None


def parse_function(spec, where: str = "function") -> LogConcaveFn:
    """{"family": name, "params": {...}} or {"covariogram": {"kind": ..., "body": ...}}."""
    if isinstance(spec, LogConcaveFn):
        return spec
    if not isinstance(spec, dict):
        raise InputError(f"{where}: expected an object, got {type(spec).__name__}")
    try:
        if "covariogram" in spec:
            c = dict(spec["covariogram"])
            kind = c.pop("kind", "classical")
            if "body" in c:
                c["body"] = parse_body(c["body"], f"{where}.covariogram.body")
            if "function" in c:
                c["function"] = parse_function(c["function"], f"{where}.covariogram.function")
            if "measure" in c:
                c["measure"] = parse_function(c["measure"], f"{where}.covariogram.measure")
            return generalized_covariogram(kind, **c)
        if "family" not in spec:
            raise InputError(f"{where}: missing field 'family'")
        return make_function(spec["family"], spec.get("params"))
    except InputError:
        raise
    except KeyError as e:
        raise InputError(f"{where}: missing field {e.args[0]!r}") from None
    except (ValueError, TypeError) as e:
        raise InputError(f"{where}: {e}") from None


def fmt(v) -> str:
    """A float with 16 significant digits (inf/nan spelled out)."""
    v = float(v)
    if not math.isfinite(v):
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return f"{v:.15e}"


def table_csv(header, rows) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(c if isinstance(c, str) else str(c) if isinstance(c, (int, np.integer))
                           else fmt(c) for c in row) + "\n")
    return out.getvalue()


def radial_csv(directions: np.ndarray, values) -> str:
    """Long format: index, theta_1..theta_n, value (one row per direction)."""
    D = np.atleast_2d(directions)
    header = ["index"] + [f"theta_{i + 1}" for i in range(D.shape[1])] + ["value"]
    rows = [[i, *D[i], v] for i, v in enumerate(np.asarray(values, dtype=float))]
    return table_csv(header, rows)


def read_radial_csv(text: str):
    lines = [l for l in text.strip().splitlines() if l]
    data = np.array([[float(c) for c in l.split(",")] for l in lines[1:]])
    return data[:, 1:-1], data[:, -1]


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
