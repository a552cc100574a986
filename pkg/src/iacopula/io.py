"""Byte-stable JSON output and parsing of the input documents."""

from __future__ import annotations

import json
import math
import os

import numpy as np

from .marginals import Marginal, MarginalError, Profile


class InputError(ValueError):
    """Malformed user input (bad JSON, wrong schema)."""


def _encode(obj, out):
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot encode {x!r} as JSON")
        out.append(format(x, ".17g"))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for n, (k, v) in enumerate(obj.items()):
            if n:
                out.append(",")
            out.append(json.dumps(str(k)))
            out.append(":")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for n, v in enumerate(obj):
            if n:
                out.append(",")
            _encode(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj) -> str:
    """JSON text with insertion-ordered keys and 17-significant-digit floats."""
    out = []
    _encode(obj, out)
    return "".join(out)


def load_json_arg(value: str, what: str):
    """Parse ``value`` as inline JSON, or as a path to a JSON file."""
    text = value
    source = "inline"
    if os.path.exists(value):
        source = value
        with open(value, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{what}: malformed JSON ({source}) at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from None


def parse_profile(obj) -> Profile:
    """A profile document is a JSON array of arrays of numbers."""
    if not isinstance(obj, list) or not obj:
        raise InputError("profile must be a non-empty JSON array of arrays")
    for i, row in enumerate(obj, start=1):
        if not isinstance(row, list) or not row:
            raise InputError(f"profile[{i}] must be a non-empty array of numbers")
        for t, v in enumerate(row, start=1):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InputError(f"profile[{i}][{t}] is not a number: {v!r}")
    marginals = []
    for i, row in enumerate(obj, start=1):
        try:
            marginals.append(Marginal(row))
        except MarginalError as exc:
            raise InputError(f"profile[{i}]: {exc}") from None
    return Profile(marginals)
