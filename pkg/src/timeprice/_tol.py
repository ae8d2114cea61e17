"""Comparison tolerance shared by every geometric predicate.

Instances in this package span many orders of magnitude (the tight
families reach 1e16), so the tolerance scales with the operands.
"""

from __future__ import annotations

import numpy as np

TOL = 1e-9


def tol(*xs: float) -> float:
    return TOL * max(1.0, *(abs(x) for x in xs))


def tol_array(*xs: np.ndarray) -> np.ndarray:
    out = np.ones(np.broadcast(*xs).shape)
    for x in xs:
        out = np.maximum(out, np.abs(x))
    return TOL * out


def leq(a: float, b: float) -> bool:
    """``a <= b`` up to the scaled tolerance."""
    return a <= b + tol(a, b)


def close(a: float, b: float) -> bool:
    return abs(a - b) <= tol(a, b)
