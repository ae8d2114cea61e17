import math

import pytest

from timeprice import (ContinuousDistribution, certified_solve, discretize, gen_band,
                       solve_optimal)

OPT = 22 / 27


@pytest.fixture(scope="module")
def band():
    return gen_band().distribution


def test_uniform_square_quarters():
    u = ContinuousDistribution((0, 1), (0, 1), lambda t, v: 1.0)
    res = discretize(u, 0.5)
    got = [(t.theta, t.v) for t in res.dist]
    assert got == [(0.5, 0), (0.5, 0.5), (1, 0), (1, 0.5)]
    assert all(t.prob == pytest.approx(0.25, abs=1e-9) for t in res.dist)
    assert res.eta == pytest.approx(0.5, abs=1e-9)
    assert res.error_bound == pytest.approx(0.5 * 1 + 0.5)


def test_grid_anchored_at_support_corner():
    u = ContinuousDistribution((1, 2), (3, 4), lambda t, v: 1.0)
    res = discretize(u, 0.5)
    assert sorted((t.theta, t.v) for t in res.dist) == [(1.5, 3), (1.5, 3.5), (2, 3), (2, 3.5)]


def test_truncated_last_cell():
    u = ContinuousDistribution((0, 1), (0, 1), lambda t, v: 1.0)
    res = discretize(u, 0.4)
    assert sorted({t.theta for t in res.dist}) == pytest.approx([0.4, 0.8, 1.0])
    assert res.raw_mass == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("eps, eta, bound", [(0.2, 0.1, 0.5), (0.1, 0.05, 0.25)])
def test_band_eta(band, eps, eta, bound):
    res = discretize(band, eps)
    assert res.eta == pytest.approx(eta, abs=1e-6)
    assert res.error_bound == pytest.approx(bound, abs=1e-5)
    assert res.v_max == 3
    assert abs(res.mass_defect) <= 1e-5


def test_atoms_at_right_bottom(band):
    eps = 0.25
    res = discretize(band, eps)
    for t in res.dist:
        # right edge of a theta cell, bottom edge of a v cell
        assert math.isclose(t.theta / eps, round(t.theta / eps), abs_tol=1e-9) and t.theta > 0
        assert math.isclose(t.v / eps, round(t.v / eps), abs_tol=1e-9) and t.v < 3


def test_rejects_bad_epsilon(band):
    with pytest.raises(ValueError):
        discretize(band, 10)
    with pytest.raises(ValueError):
        discretize(band, 0)


@pytest.mark.parametrize("eps", [0.5, 0.25, 0.2])
def test_certified_band(band, eps):
    res, cert = certified_solve(band, eps)
    r = res.optimal_value
    eta = cert.discretization.eta
    assert OPT - eps <= r <= OPT + eta * 3
    assert cert.lower <= OPT <= cert.upper
    assert cert.error_bound == pytest.approx(eta * 3 + eps)
    assert abs(r - OPT) <= cert.error_bound


def test_bound_shrinks(band):
    assert discretize(band, 0.1).error_bound < discretize(band, 0.2).error_bound


def test_concentrated_density():
    # all mass in the cell [0.5, 1] x [0.5, 1]
    c = ContinuousDistribution((0, 1), (0, 1), lambda t, v: 4.0 if t >= 0.5 and v >= 0.5 else 0.0,
                               theta_breaks=(0.5,), v_breaks=lambda t: (0.5,))
    res, cert = certified_solve(c, 0.5)
    assert len(res.report.decisions) == 1
    single = res.report.decisions[0].buyer
    assert (single.theta, single.v) == (1, 0.5)
    assert res.optimal_value == pytest.approx(0.5)
    assert res.optimal_value == pytest.approx(solve_optimal(cert.discretization.dist).optimal_value)
