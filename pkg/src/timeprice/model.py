"""Buyer types, separation lines, pricing functions and their evaluation.

A buyer of type ``(theta, v)`` facing a non-increasing pricing function
``p`` buys iff ``min_t p(t) + theta * t <= v``.  The boundary of the
non-buying region is a concave, non-decreasing piecewise-linear function
of ``theta`` (the separation line); each of its segments corresponds to
one price step: the segment slope is the time spent and the intercept
is the price paid by the buyers it serves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from ._tol import TOL, close, leq, tol
from .errors import InvalidInstanceError, InvalidLineError, NumericalFailure

MASS_TOL = 1e-9
CONTINUOUS_MASS_TOL = 1e-6


@dataclass(frozen=True)
class Verdict:
    """Outcome of a verdict-returning validation."""

    violations: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# Type distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BuyerType:
    theta: float
    v: float
    prob: float

    def __post_init__(self):
        bad = _type_violations(self.theta, self.v, self.prob)
        if bad:
            raise InvalidInstanceError(bad)


def _type_violations(theta, v, prob, label="type") -> list[str]:
    out = []
    for name, x in (("theta", theta), ("v", v), ("prob", prob)):
        if not math.isfinite(x):
            out.append(f"{label}: {name}={x} is not finite")
    if out:
        return out
    if theta < 0:
        out.append(f"{label}: theta={theta} is negative")
    if v < 0:
        out.append(f"{label}: v={v} is negative")
    if not 0 < prob <= 1:
        out.append(f"{label}: prob={prob} outside (0, 1]")
    return out


def _as_triple(t) -> tuple[float, float, float]:
    if isinstance(t, BuyerType):
        return t.theta, t.v, t.prob
    theta, v, prob = t
    return float(theta), float(v), float(prob)


def _canonical(triples) -> tuple[list[tuple[float, float, float]], int]:
    merged: dict[tuple[float, float], float] = {}
    dups = 0
    for theta, v, prob in triples:
        key = (theta, v)
        if key in merged:
            dups += 1
            merged[key] += prob
        else:
            merged[key] = prob
    return [(th, v, p) for (th, v), p in sorted(merged.items())], dups


def validate_instance(types) -> Verdict:
    """Check a discrete instance given as ``BuyerType`` objects, raw
    ``(theta, v, prob)`` triples or a ``DiscreteTypeDistribution``.

    The input is canonicalized first (sorted by ``(theta, v)``, duplicate
    points merged), so unsorted input is valid and duplicates are only
    noted.
    """
    if isinstance(types, DiscreteTypeDistribution):
        types = types.types
    triples = [_as_triple(t) for t in types]
    violations: list[str] = []
    if not triples:
        violations.append("empty instance")
    for i, (theta, v, prob) in enumerate(triples):
        violations += _type_violations(theta, v, prob, label=f"type {i}")
    canon, dups = _canonical(triples)
    total = math.fsum(p for _, _, p in canon)
    if triples and abs(total - 1.0) > MASS_TOL:
        violations.append(f"mass {total:.12g} != 1")
    notes = (f"merged {dups} duplicate (theta, v) entries",) if dups else ()
    return Verdict(tuple(violations), notes)


@dataclass(frozen=True)
class DiscreteTypeDistribution:
    """Finite type distribution, kept sorted by ``(theta, v)`` with
    duplicate points merged."""

    types: tuple[BuyerType, ...]

    def __post_init__(self):
        verdict = validate_instance(self.types)
        if not verdict:
            raise InvalidInstanceError(verdict.violations)
        canon, _ = _canonical(_as_triple(t) for t in self.types)
        object.__setattr__(self, "types", tuple(BuyerType(*t) for t in canon))

    @classmethod
    def from_triples(cls, triples: Iterable[Sequence[float]]) -> DiscreteTypeDistribution:
        return cls(tuple(_as_triple(t) for t in triples))

    def __len__(self) -> int:
        return len(self.types)

    def __iter__(self):
        return iter(self.types)

    @cached_property
    def thetas(self) -> np.ndarray:
        a = np.array([t.theta for t in self.types])
        a.setflags(write=False)
        return a

    @cached_property
    def values(self) -> np.ndarray:
        a = np.array([t.v for t in self.types])
        a.setflags(write=False)
        return a

    @cached_property
    def probs(self) -> np.ndarray:
        a = np.array([t.prob for t in self.types])
        a.setflags(write=False)
        return a

    @property
    def distinct_thetas(self) -> int:
        return len(set(self.thetas.tolist()))


def _quad(f, a, b, points, epsrel, limit=200):
    if not b > a:
        return 0.0
    pts = sorted({p for p in points if a < p < b})
    y, err, info, *rest = integrate.quad(
        f, a, b, points=pts or None, epsabs=1e-14, epsrel=epsrel,
        limit=limit, full_output=1)
    if rest and err > max(1e-13, 10 * epsrel * abs(y)):
        raise NumericalFailure(f"quadrature on [{a}, {b}] failed: {rest[0]}")
    return y


@dataclass(frozen=True)
class ContinuousDistribution:
    """Joint density of ``(theta, v)`` supported on a rectangle.

    ``theta_breaks`` lists theta values where the density (or its
    integral along v) is not smooth; ``v_breaks(theta)`` gives the v
    values where the density is discontinuous along a fixed-theta slice.
    Both only steer quadrature.
    """

    theta_range: tuple[float, float]
    v_range: tuple[float, float]
    density: Callable[[float, float], float]
    theta_breaks: tuple[float, ...] = ()
    v_breaks: Callable[[float], Sequence[float]] | None = None
    name: str = ""
    total_mass: float = field(init=False, default=float("nan"))

    def __post_init__(self):
        (t0, t1), (v0, v1) = self.theta_range, self.v_range
        if not (0 <= t0 < t1 and 0 <= v0 < v1):
            raise InvalidInstanceError([f"bad support {self.theta_range} x {self.v_range}"])
        total = self.mass(t0, t1, v0, v1, tol=1e-10)
        object.__setattr__(self, "total_mass", total)
        if abs(total - 1.0) > CONTINUOUS_MASS_TOL:
            raise InvalidInstanceError([f"density integrates to {total:.9g}, not 1"])

    def _f(self, theta, v):
        (t0, t1), (v0, v1) = self.theta_range, self.v_range
        if not (t0 <= theta <= t1 and v0 <= v <= v1):
            return 0.0
        return self.density(theta, v)

    def slice_mass(self, theta: float, v_lo: float, v_hi: float, tol: float = 1e-10) -> float:
        """Integral of the density over ``v in [v_lo, v_hi]`` at fixed theta."""
        lo, hi = max(v_lo, self.v_range[0]), min(v_hi, self.v_range[1])
        if not hi > lo:
            return 0.0
        pts = self.v_breaks(theta) if self.v_breaks else ()
        return _quad(lambda v: self._f(theta, v), lo, hi, pts, tol)

    def integrate_above(self, theta_lo, theta_hi, lower, tol=1e-10, weight=None):
        """Integrate ``weight(theta) * density`` over
        ``theta in [theta_lo, theta_hi]``, ``v >= lower(theta)``."""
        lo, hi = max(theta_lo, self.theta_range[0]), min(theta_hi, self.theta_range[1])
        v1 = self.v_range[1]

        def g(theta):
            m = self.slice_mass(theta, lower(theta), v1, tol * 1e-2)
            return m * weight(theta) if weight else m

        return _quad(g, lo, hi, self.theta_breaks, tol)

    def mass(self, theta_lo, theta_hi, v_lo, v_hi, tol=1e-10) -> float:
        lo, hi = max(theta_lo, self.theta_range[0]), min(theta_hi, self.theta_range[1])
        return _quad(lambda th: self.slice_mass(th, v_lo, v_hi, tol * 1e-2),
                     lo, hi, self.theta_breaks, tol)


# ---------------------------------------------------------------------------
# Lines and pricing functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """The line ``intercept + slope * theta``.

    ``slope`` is the time spent by the buyers this piece serves and
    ``intercept`` the price they pay.  Sign constraints belong to
    ``SeparationLine``; raw segments through arbitrary type pairs may be
    decreasing.
    """

    slope: float
    intercept: float

    def __call__(self, theta):
        return self.intercept + self.slope * theta


def chain_crosses(segments: Sequence[Segment]) -> list[float]:
    return [(b.intercept - a.intercept) / (a.slope - b.slope)
            if a.slope != b.slope else math.nan
            for a, b in zip(segments, segments[1:])]


def chain_violations(segments: Sequence[Segment]) -> list[str]:
    segments = list(segments)
    if not segments:
        return ["empty chain"]
    out = []
    for r, s in enumerate(segments):
        if not (math.isfinite(s.slope) and math.isfinite(s.intercept)):
            out.append(f"segment {r}: non-finite coefficients")
            return out
        if s.slope < 0:
            out.append(f"segment {r}: negative slope {s.slope}")
        if s.intercept < 0:
            out.append(f"segment {r}: negative intercept {s.intercept}")
    if segments[-1].slope != 0:
        out.append(f"last slope is {segments[-1].slope}, not 0")
    for r, (a, b) in enumerate(zip(segments, segments[1:])):
        if not a.slope > b.slope:
            out.append(f"slopes not decreasing at {r}: {a.slope} -> {b.slope}")
        if not a.intercept < b.intercept:
            out.append(f"intercepts not increasing at {r}: {a.intercept} -> {b.intercept}")
    if out:
        return out
    xs = chain_crosses(segments)
    if xs and xs[0] < -tol(xs[0]):
        out.append(f"cross point 0 is negative: {xs[0]}")
    for r, (a, b) in enumerate(zip(xs, xs[1:])):
        if not a < b:
            out.append(f"cross points not increasing at {r}: {a} -> {b}")
    return out


@dataclass(frozen=True)
class SeparationLine:
    """Concave, non-decreasing chain of segments ordered left to right.

    The line is ``min`` over its segments.  Segment ``r`` is active on
    ``[x_{r-1}, x_r)`` where ``x_r`` are the cross points; a type sitting
    on a kink is served by the flatter (right) segment.
    """

    segments: tuple[Segment, ...]

    def __post_init__(self):
        segs = tuple(s if isinstance(s, Segment) else Segment(*s) for s in self.segments)
        object.__setattr__(self, "segments", segs)
        bad = chain_violations(segs)
        if bad:
            raise InvalidLineError(bad)

    @classmethod
    def horizontal(cls, level: float) -> SeparationLine:
        return cls((Segment(0.0, level),))

    @cached_property
    def crosses(self) -> tuple[float, ...]:
        return tuple(chain_crosses(self.segments))

    def __len__(self) -> int:
        return len(self.segments)

    def active_index(self, theta: float) -> int:
        r = 0
        for x in self.crosses:
            if theta >= x - tol(x):
                r += 1
            else:
                break
        return r

    def active(self, theta: float) -> Segment:
        return self.segments[self.active_index(theta)]

    def __call__(self, theta: float) -> float:
        return min(s(theta) for s in self.segments)


@dataclass(frozen=True)
class PricingFunction:
    """Non-increasing step function from time spent to price.

    Steps are ``(time_threshold, price)``; ``p(t)`` is the price of the last
    step whose threshold is ``<= t``.
    """

    steps: tuple[tuple[float, float], ...]

    def __post_init__(self):
        steps = tuple((float(t), float(p)) for t, p in self.steps)
        object.__setattr__(self, "steps", steps)
        if not steps:
            raise ValueError("pricing function needs at least one step")
        if steps[0][0] != 0:
            raise ValueError(f"first threshold is {steps[0][0]}, not 0")
        for (t0, p0), (t1, p1) in zip(steps, steps[1:]):
            if not t1 > t0:
                raise ValueError(f"thresholds not increasing: {t0} -> {t1}")
            if not p1 < p0:
                raise ValueError(f"prices not decreasing: {p0} -> {p1}")
        if steps[-1][1] < 0:
            raise ValueError("negative price")

    @classmethod
    def posted(cls, price: float) -> PricingFunction:
        return cls(((0.0, price),))

    def __call__(self, t: float) -> float:
        if t < 0:
            raise ValueError("time must be nonnegative")
        price = self.steps[0][1]
        for threshold, p in self.steps:
            if threshold <= t:
                price = p
            else:
                break
        return price


@dataclass(frozen=True)
class BestAction:
    time: float
    price: float
    total_cost: float


@dataclass(frozen=True)
class Decision:
    buyer: BuyerType
    buys: bool
    time: float
    payment: float


@dataclass(frozen=True)
class Report:
    revenue: float
    time_loss: float
    decisions: tuple[Decision, ...] = ()

    @property
    def buyers(self) -> frozenset[int]:
        return frozenset(i for i, d in enumerate(self.decisions) if d.buys)


def best_response(p: PricingFunction, theta: float) -> BestAction:
    """Least time minimizing ``p(t) + theta * t``.

    A minimizer always sits at a step threshold; among near-equal costs
    the earliest threshold (highest price) wins.
    """
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    costs = [price + theta * t for t, price in p.steps]
    best = min(costs)
    for (t, price), c in zip(p.steps, costs):
        if close(c, best):
            return BestAction(t, price, c)
    raise AssertionError("unreachable")


def buyer_decision(p: PricingFunction, buyer: BuyerType) -> Decision:
    act = best_response(p, buyer.theta)
    if leq(act.total_cost, buyer.v):
        return Decision(buyer, True, act.time, act.price)
    return Decision(buyer, False, 0.0, 0.0)


def separation_from_pricing(p: PricingFunction) -> SeparationLine:
    """Lower envelope of the lines ``price + threshold * theta`` on
    ``[0, inf)``, keeping only lines that are the strict minimum
    somewhere."""
    stack: list[Segment] = []
    for t, price in reversed(p.steps):
        line = Segment(t, price)
        while stack:
            top = stack[-1]
            x = (line.intercept - top.intercept) / (top.slope - line.slope)
            if len(stack) == 1:
                if x <= tol(x):
                    stack.pop()
                    continue
                break
            prev = stack[-2]
            x_prev = (top.intercept - prev.intercept) / (prev.slope - top.slope)
            if x <= x_prev + tol(x, x_prev):
                stack.pop()
            else:
                break
        stack.append(line)
    return SeparationLine(tuple(stack))


def pricing_from_separation(line: SeparationLine) -> PricingFunction:
    """One step per segment at ``(slope, intercept)``, ordered by time."""
    return PricingFunction(tuple((s.slope, s.intercept) for s in reversed(line.segments)))


def evaluate_discrete(line: SeparationLine, dist: DiscreteTypeDistribution) -> Report:
    decisions = []
    revenue = []
    loss = []
    for b in dist.types:
        seg = line.active(b.theta)
        level = seg(b.theta)
        if leq(level, b.v):
            decisions.append(Decision(b, True, seg.slope, seg.intercept))
            revenue.append(seg.intercept * b.prob)
            loss.append(b.theta * seg.slope * b.prob)
        else:
            decisions.append(Decision(b, False, 0.0, 0.0))
    return Report(math.fsum(revenue), math.fsum(loss), tuple(decisions))


def evaluate_continuous(line: SeparationLine, c: ContinuousDistribution,
                        tol: float = 1e-8) -> Report:
    """Expected revenue and time loss of ``line`` under a density.

    Integrates segment by segment over its active window, so the only
    kinks left inside a quadrature interval come from the density.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    edges = [0.0, *line.crosses, math.inf]
    revenue = []
    loss = []
    for seg, lo, hi in zip(line.segments, edges, edges[1:]):
        lo, hi = max(lo, c.theta_range[0]), min(hi, c.theta_range[1])
        if not hi > lo:
            continue
        if seg.intercept > 0:
            m = c.integrate_above(lo, hi, seg, tol=tol)
            revenue.append(seg.intercept * m)
        if seg.slope > 0:
            w = c.integrate_above(lo, hi, seg, tol=tol, weight=lambda th: th)
            loss.append(seg.slope * w)
    return Report(math.fsum(revenue), math.fsum(loss))


__all__ = [
    "TOL", "MASS_TOL", "Verdict", "BuyerType", "DiscreteTypeDistribution",
    "ContinuousDistribution", "Segment", "SeparationLine", "PricingFunction",
    "BestAction", "Decision", "Report", "validate_instance", "best_response",
    "buyer_decision", "separation_from_pricing", "pricing_from_separation",
    "evaluate_discrete", "evaluate_continuous", "chain_violations", "chain_crosses",
]
