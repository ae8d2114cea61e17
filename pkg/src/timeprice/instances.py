"""Named instance families with known revenue behaviour.

Generators compute in exact rational arithmetic and convert to floats
at the end, so tiny probabilities and huge coordinates keep full
relative precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InvalidInstanceError
from .model import (BuyerType, ContinuousDistribution, DiscreteTypeDistribution,
                    PricingFunction, Segment, SeparationLine)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _kstep_thetas(k, r, eps):
    q = r / eps
    return [(r - 1) * (q ** i - 1) / (q - 1) for i in range(1, k + 1)]


def _check_kstep(k, r, eps):
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    if not r > 1:
        raise ValueError("r must exceed 1")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")


def gen_kstep_tight(k: int, r: float, eps: float) -> DiscreteTypeDistribution:
    """``k`` types on which every posted price earns exactly ``r`` while a
    ``k``-segment line earns close to ``k * r``.

    Type ``i`` sits at ``v = r**i`` with mass ``r**(1-i) - r**-i`` (the last
    one takes the remaining ``r**(1-k)``).
    """
    _check_kstep(k, r, eps)
    r, eps = _frac(r), _frac(eps)
    thetas = _kstep_thetas(k, r, eps)
    probs = [r ** (1 - i) - r ** (-i) for i in range(1, k)] + [r ** (1 - k)]
    return DiscreteTypeDistribution(tuple(
        BuyerType(float(th), float(r ** i), float(p))
        for i, (th, p) in enumerate(zip(thetas, probs), start=1)))


def kstep_tight_line(k: int, r: float, eps: float) -> SeparationLine:
    """The line joining consecutive type points of ``gen_kstep_tight``,
    horizontal from the last one on.  Segment ``i`` has slope ``eps**i``."""
    _check_kstep(k, r, eps)
    r, eps = _frac(r), _frac(eps)
    thetas = _kstep_thetas(k, r, eps)
    segs = [Segment(float(eps ** i), float(r ** i - eps ** i * thetas[i - 1]))
            for i in range(1, k)]
    segs.append(Segment(0.0, float(r ** k)))
    return SeparationLine(tuple(segs))


def kstep_revenue_floor(k: int, r: float, eps: float) -> float:
    """Lower bound ``(1-eps) * ((k-1)(r-1) + r)`` on the revenue of
    ``kstep_tight_line``, summed type by type."""
    return (1 - eps) * ((k - 1) * (r - 1) + r)


def gen_loss_tight(k: int, d: float = 1e4, eps: float = 1e-6) -> DiscreteTypeDistribution:
    """``k`` types whose optimal line joins them consecutively, making the
    total time loss close to ``k - 1`` times the revenue.

    ``theta_i = 1 + d + ... + d**(i-1)``,
    ``v_i = sum_{j<i} d**j * (1 - j*eps)`` and mass proportional to
    ``w_i = prod_{2<=j<=i} theta_{j-1} d**(2-j) / (1 + d + theta_{j-1} d**(1-j))``.
    """
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    if not d > k:
        raise ValueError("d must exceed k")
    if not 0 < eps < 1 / k:
        raise ValueError("eps must lie in (0, 1/k)")
    d, eps = _frac(d), _frac(eps)
    thetas = [(d ** i - 1) / (d - 1) for i in range(1, k + 1)]
    values = [sum(d ** j * (1 - j * eps) for j in range(i)) for i in range(1, k + 1)]
    weights = [Fraction(1)]
    for j in range(2, k + 1):
        th = thetas[j - 2]
        weights.append(weights[-1] * th * d ** (2 - j) / (1 + d + th * d ** (1 - j)))
    total = sum(weights)
    return DiscreteTypeDistribution(tuple(
        BuyerType(float(th), float(v), float(w / total))
        for th, v, w in zip(thetas, values, weights)))


def loss_tight_weights(k: int, d: float = 1e4) -> list[float]:
    """Unnormalized weights ``w_i`` of ``gen_loss_tight``."""
    d = _frac(d)
    thetas = [(d ** i - 1) / (d - 1) for i in range(1, k + 1)]
    w = [Fraction(1)]
    for j in range(2, k + 1):
        th = thetas[j - 2]
        w.append(w[-1] * th * d ** (2 - j) / (1 + d + th * d ** (1 - j)))
    return [float(x) for x in w]


@dataclass(frozen=True)
class BandClosedForm:
    distribution: ContinuousDistribution
    optimal_line: SeparationLine
    optimal_pricing: PricingFunction
    optimal_revenue: Fraction
    posted_revenue: Fraction
    posted_price: Fraction
    time_loss: Fraction


def _band_density(theta: float, v: float) -> float:
    return 0.5 if 0 <= v - theta <= 1 and 0 <= theta <= 2 else 0.0


def band_distribution() -> ContinuousDistribution:
    """Uniform density 1/2 on ``{0 <= v - theta <= 1, 0 <= theta <= 2}``."""
    return ContinuousDistribution(
        theta_range=(0.0, 2.0), v_range=(0.0, 3.0), density=_band_density,
        v_breaks=lambda theta: (theta, theta + 1.0), name="band")


def gen_band() -> BandClosedForm:
    """Positively correlated band with its closed-form optimum
    ``min(2/3 + theta, 4/3)``, i.e. price 4/3 immediately or 2/3 after
    waiting one time unit."""
    line = SeparationLine((Segment(1.0, 2 / 3), Segment(0.0, 4 / 3)))
    return BandClosedForm(
        distribution=band_distribution(),
        optimal_line=line,
        optimal_pricing=PricingFunction(((0.0, 4 / 3), (1.0, 2 / 3))),
        optimal_revenue=Fraction(22, 27),
        posted_revenue=Fraction(25, 32),
        posted_price=Fraction(5, 4),
        time_loss=Fraction(1, 27),
    )


def gen_product(theta_marginal: Sequence[tuple[float, float]],
                v_marginal: Sequence[tuple[float, float]]) -> DiscreteTypeDistribution:
    """Independent theta and v: atom ``(theta_a, v_b)`` with mass ``p_a * q_b``."""
    for name, marginal in (("theta", theta_marginal), ("v", v_marginal)):
        total = math.fsum(p for _, p in marginal)
        if not marginal or abs(total - 1) > 1e-9:
            raise InvalidInstanceError([f"{name} marginal has mass {total:.12g}, not 1"])
    return DiscreteTypeDistribution(tuple(
        BuyerType(float(th), float(v), float(p) * float(q))
        for th, p in theta_marginal for v, q in v_marginal))
