# utils/checks.py
import re
from typing import List

import numpy as np

from core.errors import ParseError

# dot decimals only, so "1,5" is two numbers whatever the locale says
_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def _parse_floats(raw: str | None, name: str) -> List[float]:
    if raw is None or not raw.strip():
        raise ParseError(f"{name}: empty vector")
    out = []
    for part in raw.split(","):
        token = part.strip()
        if not _NUMBER.match(token):
            raise ParseError(f"{name}: {token!r} is not a decimal number")
        out.append(float(token))
    return out


def parse_vector(raw: str | None, n: int | None = None, name: str = "vector") -> np.ndarray:
    """'x0,x1,...' -> float array, checked against length n when given."""
    v = np.array(_parse_floats(raw, name))
    if n is not None and v.shape[0] != n:
        raise ParseError(f"{name}: expected {n} components, got {v.shape[0]}")
    return v


def parse_positive(raw: str | None, n: int | None = None, name: str = "vector") -> np.ndarray:
    v = parse_vector(raw, n, name)
    if np.any(v <= 0):
        raise ParseError(f"{name}: every component must be > 0")
    return v
