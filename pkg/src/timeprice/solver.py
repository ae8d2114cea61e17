"""Revenue-optimal separation lines for discrete type distributions.

The exact solver is a dynamic program over candidate segments: lines
through two type points (positive slope, nonnegative intercept) and one
horizontal line per valuation.  A chain of candidates with strictly
decreasing slopes collects, on each segment's window, the segment's
intercept times the mass on or above it.  Revenue only depends on which
types fall in each window, so the state is ``(segment, index of the
first type in its window)``:

    B(s, j) = max over j' >= j of  z_s * (P_s[j'] - P_s[j]) + U(s, j')

where ``P_s`` are prefix masses above ``s`` in theta order and
``U(s, j')`` is the best ``B(s', j')`` over flatter successors ``s'``
whose cross point with ``s`` opens window index ``j'``.  Requiring only
non-decreasing window indices admits chains with segments that are
never active; such a segment has an empty window and dropping it gives
a valid chain of the same revenue, so the optimum is unchanged.  The
whole table costs ``O(C^2)`` for ``C = O(n^2)`` candidates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._tol import tol, tol_array
from .errors import OracleCapExceeded
from .geometry import MassIndex
from .model import (DiscreteTypeDistribution, PricingFunction, Report, Segment,
                    SeparationLine, evaluate_discrete, pricing_from_separation,
                    separation_from_pricing)

ORACLE_CAP = 7
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class CandidateSegment:
    segment: Segment
    anchor_left: int
    anchor_right: int

    @property
    def horizontal(self) -> bool:
        return self.segment.slope == 0


@dataclass(frozen=True)
class SolveResult:
    line: SeparationLine
    pricing: PricingFunction
    report: Report
    optimal_value: float


def _result(line: SeparationLine, dist: DiscreteTypeDistribution) -> SolveResult:
    report = evaluate_discrete(line, dist)
    return SolveResult(line, pricing_from_separation(line), report, report.revenue)


def candidate_segments(dist: DiscreteTypeDistribution) -> list[CandidateSegment]:
    """Lines through type pairs with positive slope and nonnegative
    intercept, plus one horizontal line per distinct valuation.

    A horizontal line is anchored at the rightmost type of its level,
    which is the most permissive anchor for the chain order.
    """
    th, v = dist.thetas, dist.values
    out = []
    for i, j in itertools.combinations(range(len(dist)), 2):
        if not th[i] < th[j] or not v[j] > v[i]:
            continue
        slope = (v[j] - v[i]) / (th[j] - th[i])
        icpt = v[i] - slope * th[i]
        if icpt < 0:
            if icpt < -tol(v[i], slope * th[i]):
                continue
            icpt = 0.0
        out.append(CandidateSegment(Segment(float(slope), float(icpt)), i, j))
    right_of_level = {}
    for i in range(len(dist)):
        right_of_level[float(v[i])] = i
    for level, i in sorted(right_of_level.items()):
        out.append(CandidateSegment(Segment(0.0, level), i, i))
    return out


class _Tables:
    """Flat arrays over candidates sorted by ascending slope."""

    def __init__(self, dist: DiscreteTypeDistribution):
        cands = candidate_segments(dist)
        cands.sort(key=lambda c: (c.segment.slope, c.segment.intercept))
        self.cands = cands
        self.n = len(dist)
        self.d = np.array([c.segment.slope for c in cands])
        self.z = np.array([c.segment.intercept for c in cands])
        self.mass = MassIndex(dist, self.d, self.z)
        self.horizontal = self.d == 0
        # candidates with slope < d[s] are exactly cands[:n_flatter[s]]
        self.n_flatter = np.searchsorted(self.d, self.d, side="left")

    def successors(self, s: int):
        """Flatter candidates and the window index their cross with ``s``
        opens."""
        c = np.arange(self.n_flatter[s])
        x = (self.z[c] - self.z[s]) / (self.d[s] - self.d[c])
        return c, self.mass.index(x)


class _Layer:
    """``B(s, j)`` with tie-break data and back-pointers."""

    def __init__(self, m: int, n: int):
        self.value = np.full((m, n + 1), -np.inf)
        self.nseg = np.zeros((m, n + 1), dtype=np.int64)
        self.final = np.full((m, n + 1), np.inf)
        self.succ = np.full((m, n + 1), -1, dtype=np.int64)
        self.succ_j = np.full((m, n + 1), -1, dtype=np.int64)


def _better(v, ns, fi, bv, bns, bfi) -> bool:
    if bv == -math.inf:
        return v > bv
    if v > bv + TIE_RTOL * max(1.0, abs(bv)):
        return True
    if v < bv - TIE_RTOL * max(1.0, abs(bv)):
        return False
    return (ns, fi) < (bns, bfi)


def _fill_row(t: _Tables, s: int, out: _Layer, nxt: _Layer | None, succ_cache=None):
    """Compute ``B(s, .)`` into ``out`` reading successors from ``nxt``."""
    n = t.n
    prefix = t.mass.prefix[s]
    z_s = t.z[s]
    # best option per window index j' (value excludes -z_s * P_s[j])
    g_val = [-math.inf] * (n + 1)
    g_ns = [0] * (n + 1)
    g_fi = [math.inf] * (n + 1)
    g_succ = [-1] * (n + 1)
    if nxt is not None and t.n_flatter[s] > 0:
        c, jp = succ_cache[s] if succ_cache is not None else t.successors(s)
        val = z_s * prefix[jp] + nxt.value[c, jp]
        keep = np.isfinite(val)
        c, jp, val = c[keep], jp[keep], val[keep]
        if len(c):
            ns = nxt.nseg[c, jp] + 1
            fi = nxt.final[c, jp]
            best = np.full(n + 1, -np.inf)
            np.maximum.at(best, jp, val)
            bj = best[jp]
            near = val >= bj - TIE_RTOL * np.maximum(1.0, np.abs(bj))
            c, jp, val, ns, fi = c[near], jp[near], val[near], ns[near], fi[near]
            order = np.lexsort((fi, ns, jp))
            _, first = np.unique(jp[order], return_index=True)
            for k in order[first]:
                j = int(jp[k])
                g_val[j], g_ns[j], g_fi[j], g_succ[j] = float(val[k]), int(ns[k]), float(fi[k]), int(c[k])
    # terminal option: s stays active to +inf (only horizontal lines)
    cur = (-math.inf, 0, math.inf, -1, -1)
    if t.horizontal[s]:
        cur = (z_s * prefix[n], 1, z_s, -1, -1)
    row_v, row_ns, row_fi = out.value[s], out.nseg[s], out.final[s]
    row_succ, row_sj = out.succ[s], out.succ_j[s]
    for j in range(n, -1, -1):
        if g_succ[j] >= 0 and _better(g_val[j], g_ns[j], g_fi[j], cur[0], cur[1], cur[2]):
            cur = (g_val[j], g_ns[j], g_fi[j], g_succ[j], j)
        if cur[0] > -math.inf:
            row_v[j] = cur[0] - z_s * prefix[j]
            row_ns[j], row_fi[j], row_succ[j], row_sj[j] = cur[1], cur[2], cur[3], cur[4]


def _pick_start(layer: _Layer) -> int:
    col = layer.value[:, 0]
    best = -1
    for s in np.flatnonzero(np.isfinite(col)):
        if best < 0 or _better(col[s], layer.nseg[s, 0], layer.final[s, 0],
                               col[best], layer.nseg[best, 0], layer.final[best, 0]):
            best = int(s)
    return best


def _walk(t: _Tables, layers: list[_Layer], start: int) -> list[Segment]:
    out = []
    s, j, b = start, 0, len(layers) - 1
    while s >= 0:
        out.append(t.cands[s].segment)
        layer = layers[b]
        s, j = int(layer.succ[s, j]), int(layer.succ_j[s, j])
        b = max(b - 1, 0) if len(layers) > 1 else 0
    return out


def _solve_unbounded(t: _Tables):
    layer = _Layer(len(t.cands), t.n)
    for s in range(len(t.cands)):
        _fill_row(t, s, layer, layer)
    start = _pick_start(layer)
    return layer.value[start, 0], _walk(t, [layer], start)


def _solve_budget(t: _Tables, k: int):
    m = len(t.cands)
    cache = {s: t.successors(s) for s in range(m) if t.n_flatter[s] > 0}
    layers = []
    for b in range(k):
        layer = _Layer(m, t.n)
        for s in range(m):
            _fill_row(t, s, layer, layers[-1] if layers else None, cache)
        layers.append(layer)
    start = _pick_start(layers[-1])
    return layers[-1].value[start, 0], _walk(t, layers, start)


def _envelope(segments: list[Segment]) -> list[Segment]:
    """Drop segments that are never strictly the minimum on ``[0, inf)``."""
    return list(separation_from_pricing(
        PricingFunction(tuple((s.slope, s.intercept) for s in reversed(segments)))).segments)


def _finish(value: float, segments: list[Segment], dist) -> SolveResult:
    res = _result(SeparationLine(tuple(_envelope(segments))), dist)
    if abs(res.optimal_value - value) > 1e-9 * max(1.0, abs(value)):
        raise RuntimeError(f"dynamic program value {value!r} disagrees with "
                           f"evaluation {res.optimal_value!r}")
    return res


def solve_optimal(dist: DiscreteTypeDistribution) -> SolveResult:
    """Revenue-maximal separation line for a discrete distribution."""
    tables = _Tables(dist)
    value, segments = _solve_unbounded(tables)
    return _finish(value, segments, dist)


def solve_kstep(dist: DiscreteTypeDistribution, k: int) -> SolveResult:
    """Best separation line with at most ``k`` segments (``k``-step pricing)."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    tables = _Tables(dist)
    value, segments = _solve_budget(tables, min(k, len(dist) + 1))
    return _finish(value, segments, dist)


def solve_posted(dist: DiscreteTypeDistribution) -> tuple[float, float]:
    """Best single price among the valuations; ties go to the lower price."""
    best_price, best_rev = None, 0.0
    for price in sorted(set(dist.values.tolist())):
        sel = dist.values >= price - tol_array(price, dist.values)
        rev = price * math.fsum(dist.probs[sel])
        if best_price is None or rev > best_rev + TIE_RTOL * max(1.0, abs(best_rev)):
            best_price, best_rev = price, rev
    return best_price, best_rev


def brute_force_optimal(dist: DiscreteTypeDistribution) -> SolveResult:
    """Exhaustive search over chains of type-pair and horizontal lines.

    Shares nothing with the dynamic program except ``evaluate_discrete``.
    """
    n = len(dist)
    if n > ORACLE_CAP:
        raise OracleCapExceeded(f"brute force is capped at {ORACLE_CAP} types, got {n}")
    pts = [(b.theta, b.v) for b in dist.types]
    lines = set()
    for (t1, v1), (t2, v2) in itertools.combinations(pts, 2):
        if t1 == t2:
            continue
        slope = (v2 - v1) / (t2 - t1)
        icpt = v1 - slope * t1
        if slope > 0 and icpt >= -tol(v1, slope * t1):
            lines.add((slope, max(icpt, 0.0)))
    sloped = sorted(lines, key=lambda l: (-l[0], l[1]))
    levels = sorted({v for _, v in pts})

    best = None

    def consider(chain):
        nonlocal best
        line = SeparationLine(tuple(Segment(*s) for s in chain))
        rev = evaluate_discrete(line, dist).revenue
        key = (rev, -len(chain), -chain[-1][1])
        if best is None or rev > best[0][0] + TIE_RTOL * max(1.0, abs(best[0][0])):
            best = (key, line)
        elif rev >= best[0][0] - TIE_RTOL * max(1.0, abs(best[0][0])) and key[1:] > best[0][1:]:
            best = (key, line)

    def fits(chain, nxt):
        if not chain:
            return True
        a = chain[-1]
        if not (a[0] > nxt[0] and a[1] < nxt[1]):
            return False
        if len(chain) == 1:
            return True
        b = chain[-2]
        x_prev = (a[1] - b[1]) / (b[0] - a[0])
        x = (nxt[1] - a[1]) / (a[0] - nxt[0])
        return x_prev < x

    def grow(chain, start):
        for level in levels:
            if fits(chain, (0.0, level)):
                consider(chain + [(0.0, level)])
        for k in range(start, len(sloped)):
            if fits(chain, sloped[k]):
                grow(chain + [sloped[k]], k + 1)

    grow([], 0)
    return _result(best[1], dist)


__all__ = ["CandidateSegment", "SolveResult", "candidate_segments", "solve_optimal",
           "solve_kstep", "solve_posted", "brute_force_optimal", "ORACLE_CAP"]
