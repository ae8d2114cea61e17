import numpy as np
import pytest
from hypothesis import strategies as st

from timeprice import DiscreteTypeDistribution, Segment, SeparationLine

GRID = 0.05  # coarse coordinate grid for random instances


def random_instance(rng: np.random.Generator, n: int, grid: float = GRID,
                    theta_cells: int = 60, v_cells: int = 60) -> DiscreteTypeDistribution:
    """``n`` distinct grid points with random positive masses summing to 1."""
    cells = rng.choice(theta_cells * v_cells, size=n, replace=False)
    thetas = (cells // v_cells) * grid
    values = (cells % v_cells + 1) * grid
    w = rng.integers(1, 20, size=n).astype(float)
    w /= w.sum()
    return DiscreteTypeDistribution.from_triples(zip(thetas, values, w))


@st.composite
def instances(draw, max_n=6):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, max_n))
    return random_instance(np.random.default_rng(seed), n)


@st.composite
def lines(draw, max_segments=5):
    """Valid separation lines with rational-friendly coordinates."""
    k = draw(st.integers(1, max_segments))
    slopes = sorted(draw(st.lists(st.integers(1, 40), min_size=k - 1, max_size=k - 1,
                                  unique=True)), reverse=True)
    slopes = [s / 8 for s in slopes] + [0.0]
    gaps = draw(st.lists(st.integers(1, 30), min_size=k - 1, max_size=k - 1))
    z0 = draw(st.integers(0, 40)) / 8
    # crosses increasing: choose cross points, derive intercepts
    xs = np.cumsum([g / 8 for g in gaps]) if gaps else []
    segs = [Segment(slopes[0], z0)]
    for r, x in enumerate(xs):
        prev = segs[-1]
        z = prev.intercept + (prev.slope - slopes[r + 1]) * x
        segs.append(Segment(slopes[r + 1], z))
    return SeparationLine(tuple(segs))


@pytest.fixture
def two_types():
    return DiscreteTypeDistribution.from_triples([(0, 1, 0.5), (1, 2, 0.5)])
