"""Geometric primitives over type points in the (theta, v) plane."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._tol import tol, tol_array
from .errors import DegenerateSegmentError
from .model import (BuyerType, DiscreteTypeDistribution, Segment, Verdict,
                    chain_violations)


@dataclass(frozen=True)
class ThetaWindow:
    """Half-open theta interval ``[lo, hi)``; ``hi`` may be ``inf``."""

    lo: float
    hi: float = math.inf

    def __post_init__(self):
        if not (0 <= self.lo < self.hi):
            raise ValueError(f"bad window [{self.lo}, {self.hi})")


def segment_through(a: BuyerType, b: BuyerType) -> Segment:
    """Line through the two type points.

    Raises ``DegenerateSegmentError`` when both share a theta.
    """
    if a.theta == b.theta:
        raise DegenerateSegmentError(f"both points have theta={a.theta}")
    slope = (b.v - a.v) / (b.theta - a.theta)
    return Segment(slope, a.v - slope * a.theta)


def cross(s1: Segment, s2: Segment) -> float:
    """Theta where the two lines meet; symmetric in its arguments."""
    if s1.slope == s2.slope:
        raise DegenerateSegmentError("parallel segments do not cross")
    if s1.slope < s2.slope:
        s1, s2 = s2, s1
    return (s2.intercept - s1.intercept) / (s1.slope - s2.slope)


def first_at_or_after(thetas: np.ndarray, x):
    """Index of the first sorted theta that counts as ``>= x``.

    Thetas within tolerance of ``x`` count as on its right, which is how
    kinks and window edges are attributed everywhere.
    """
    x = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore"):
        return np.searchsorted(thetas, x - tol_array(x), side="left")


def above_mask(dist: DiscreteTypeDistribution, s: Segment) -> np.ndarray:
    level = s.intercept + s.slope * dist.thetas
    return dist.values >= level - tol_array(level, dist.values)


def mass_above(dist: DiscreteTypeDistribution, s: Segment, w: ThetaWindow) -> float:
    """Probability of types in ``w`` on or above the line ``s``."""
    th = dist.thetas
    i0 = int(first_at_or_after(th, w.lo))
    i1 = len(th) if math.isinf(w.hi) else int(first_at_or_after(th, w.hi))
    sel = above_mask(dist, s)[i0:i1]
    return math.fsum(dist.probs[i0:i1][sel])


class MassIndex:
    """Prefix sums of mass on or above each of a batch of lines.

    ``prefix[c, k]`` is the mass of the first ``k`` types (in theta order)
    lying on or above line ``c``, so a window query is two
    ``searchsorted`` calls and a subtraction.
    """

    def __init__(self, dist: DiscreteTypeDistribution, slopes, intercepts):
        self.thetas = dist.thetas
        slopes = np.asarray(slopes, dtype=float)[:, None]
        intercepts = np.asarray(intercepts, dtype=float)[:, None]
        level = intercepts + slopes * dist.thetas[None, :]
        above = dist.values[None, :] >= level - tol_array(level, dist.values[None, :])
        prefix = np.zeros((len(slopes), len(dist) + 1))
        np.cumsum(above * dist.probs[None, :], axis=1, out=prefix[:, 1:])
        prefix.setflags(write=False)
        self.prefix = prefix

    def index(self, x):
        return first_at_or_after(self.thetas, x)

    def window(self, c, i0, i1):
        """Mass above line(s) ``c`` between type indices ``[i0, i1)``."""
        return self.prefix[c, i1] - self.prefix[c, i0]


def validate_chain(segments: Sequence[Segment]) -> Verdict:
    return Verdict(tuple(chain_violations(list(segments))))


__all__ = ["ThetaWindow", "segment_through", "cross", "mass_above",
           "validate_chain", "MassIndex", "above_mask", "first_at_or_after", "tol"]
