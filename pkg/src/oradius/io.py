"""Matrix JSON files: {"n": int, "entries": [[[re, im], ...], ...]} (row-major)."""
from __future__ import annotations

import json
import math

import numpy as np

from .errors import InvalidMatrix


def _reject_constant(name: str):
    raise InvalidMatrix(f"non-finite number {name} in matrix file")


def _real(x, where: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InvalidMatrix(f"{where}: expected a number, got {type(x).__name__}")
    x = float(x)
    if not math.isfinite(x):
        raise InvalidMatrix(f"{where}: non-finite value")
    return x


def parse_matrix(text: str) -> np.ndarray:
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InvalidMatrix(f"malformed JSON: {exc}") from None
    if not isinstance(obj, dict) or "entries" not in obj:
        raise InvalidMatrix('expected an object with "n" and "entries"')
    rows = obj["entries"]
    if not isinstance(rows, list) or not rows:
        raise InvalidMatrix('"entries" must be a nonempty list of rows')
    n = obj.get("n", len(rows))
    if isinstance(n, bool) or not isinstance(n, int) or n != len(rows):
        raise InvalidMatrix(f'"n" = {n!r} does not match {len(rows)} rows')
    out = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise InvalidMatrix(f"row {i} is ragged: expected {n} entries")
        for j, z in enumerate(row):
            if not isinstance(z, list) or len(z) != 2:
                raise InvalidMatrix(f"entry ({i},{j}) must be a [re, im] pair")
            out[i, j] = complex(_real(z[0], f"entry ({i},{j})"), _real(z[1], f"entry ({i},{j})"))
    return out


def read_matrix(path: str) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidMatrix(f"cannot read {path}: {exc.strerror}") from None
    return parse_matrix(text)


def format_matrix(a) -> str:
    a = np.asarray(a, dtype=np.complex128)
    entries = [[[float(z.real), float(z.imag)] for z in row] for row in a]
    return json.dumps({"n": int(a.shape[0]), "entries": entries}) + "\n"
