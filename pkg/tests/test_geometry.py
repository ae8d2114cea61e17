import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from timeprice import (BuyerType, DegenerateSegmentError, DiscreteTypeDistribution, Segment,
                       ThetaWindow, cross, gen_kstep_tight, mass_above, segment_through,
                       validate_chain)
from timeprice.geometry import MassIndex

from conftest import instances, lines


def test_segment_through_examples():
    assert segment_through(BuyerType(0, 1, 1), BuyerType(1, 2, 1)) == Segment(1, 1)
    assert segment_through(BuyerType(1, 2, 1), BuyerType(3, 2, 1)) == Segment(0, 2)


def test_segment_through_kstep_points():
    q1, q2 = gen_kstep_tight(2, 2, 0.01).types
    s = segment_through(q1, q2)
    assert s.slope == pytest.approx(0.01, rel=1e-12)
    assert s(q1.theta) == pytest.approx(q1.v) and s(q2.theta) == pytest.approx(q2.v)


def test_segment_through_degenerate():
    with pytest.raises(DegenerateSegmentError):
        segment_through(BuyerType(1, 1, 1), BuyerType(1, 2, 1))


@pytest.mark.parametrize("a, b, x", [
    (Segment(1, 2 / 3), Segment(0, 4 / 3), 2 / 3),
    (Segment(1, 1), Segment(0, 2), 1.0),
    (Segment(2, 1), Segment(1, 2.5), 1.5),
])
def test_cross_examples(a, b, x):
    assert cross(a, b) == pytest.approx(x, abs=1e-15)
    assert cross(b, a) == cross(a, b)


def test_cross_parallel():
    with pytest.raises(DegenerateSegmentError):
        cross(Segment(1, 0), Segment(1, 2))


def test_cross_exact_on_rationals():
    a = Segment(Fraction(3, 7), Fraction(1, 3))
    b = Segment(Fraction(1, 5), Fraction(5, 9))
    x = cross(a, b)
    assert isinstance(x, Fraction)
    assert a(x) == b(x)


def test_window_validation():
    ThetaWindow(0)
    with pytest.raises(ValueError):
        ThetaWindow(1, 1)
    with pytest.raises(ValueError):
        ThetaWindow(-1, 2)


def test_mass_above_examples(two_types):
    assert mass_above(two_types, Segment(1, 1), ThetaWindow(0)) == 1.0
    assert mass_above(two_types, Segment(0, 1.5), ThetaWindow(0, 1)) == 0.0
    assert mass_above(two_types, Segment(0, 1.5), ThetaWindow(0)) == 0.5


def test_mass_above_groups_equal_thetas():
    d = DiscreteTypeDistribution.from_triples([(1, 1, 0.25), (1, 3, 0.25), (2, 5, 0.5)])
    assert mass_above(d, Segment(0, 2), ThetaWindow(1, 2)) == 0.25
    assert mass_above(d, Segment(0, 2), ThetaWindow(0.5, 1)) == 0.0


def test_validate_chain_examples():
    assert validate_chain([Segment(1, 2 / 3), Segment(0, 4 / 3)]).ok
    v = validate_chain([Segment(0, 1), Segment(1, 2)])
    assert any("slopes not decreasing" in s for s in v.violations)
    v = validate_chain([Segment(1, 2), Segment(0, 1)])
    assert any("intercepts not increasing" in s for s in v.violations)


def test_validate_chain_cross_order():
    v = validate_chain([Segment(2, 0), Segment(1, 3), Segment(0, 4)])
    assert any("cross points" in s for s in v.violations)


def _brute_mass(dist, s, lo, hi):
    return math.fsum(t.prob for t in dist if lo <= t.theta < hi and t.v >= s(t.theta) - 1e-12)


segments = st.builds(Segment, st.integers(0, 20).map(lambda x: x / 4),
                     st.integers(0, 20).map(lambda x: x / 4))
cuts = st.integers(0, 60).map(lambda x: x * 0.05 + 0.025)  # off-grid cut points


@given(instances(), segments, cuts, cuts)
def test_mass_above_additive(dist, s, a, b):
    a, b = sorted((a, b))
    if a == b:
        return
    whole = mass_above(dist, s, ThetaWindow(0))
    parts = (mass_above(dist, s, ThetaWindow(0, a)) + mass_above(dist, s, ThetaWindow(a, b))
             + mass_above(dist, s, ThetaWindow(b)))
    assert parts == pytest.approx(whole, abs=1e-12)
    assert mass_above(dist, s, ThetaWindow(a, b)) == pytest.approx(_brute_mass(dist, s, a, b), abs=1e-12)


@given(instances(), segments, st.integers(0, 8).map(lambda x: x / 4))
def test_mass_above_monotone(dist, s, lift):
    higher = Segment(s.slope, s.intercept + lift)
    assert mass_above(dist, higher, ThetaWindow(0)) <= mass_above(dist, s, ThetaWindow(0)) + 1e-15


@given(instances(), st.lists(segments, min_size=1, max_size=5), cuts, cuts)
def test_mass_index_matches_direct(dist, segs, a, b):
    a, b = sorted((a, b))
    if a == b:
        return
    idx = MassIndex(dist, [s.slope for s in segs], [s.intercept for s in segs])
    i0, i1 = idx.index(a), idx.index(b)
    for c, s in enumerate(segs):
        assert idx.window(c, i0, i1) == pytest.approx(mass_above(dist, s, ThetaWindow(a, b)), abs=1e-12)


@given(st.tuples(segments, segments))
def test_cross_antisymmetric(pair):
    a, b = pair
    if a.slope == b.slope:
        return
    assert cross(a, b) == cross(b, a)


@given(lines())
def test_chain_continuous_at_kinks(line):
    for (a, b), x in zip(zip(line.segments, line.segments[1:]), line.crosses):
        assert a(x) == pytest.approx(b(x), abs=1e-9)
    assert validate_chain(line.segments).ok


def test_mass_above_vectorized_agrees():
    rng = np.random.default_rng(4)
    from conftest import random_instance
    d = random_instance(rng, 30)
    s = Segment(0.5, 0.5)
    total = sum(mass_above(d, s, ThetaWindow(lo, lo + 0.5)) for lo in np.arange(0, 3.5, 0.5))
    assert total == pytest.approx(mass_above(d, s, ThetaWindow(0)), abs=1e-12)
