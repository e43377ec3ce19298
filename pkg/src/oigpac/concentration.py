"""Tail bounds used by the sample-size formulas and martingale diagnostics."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, log, sqrt

from .hypothesis_space import InputError


@dataclass(frozen=True)
class TailBound:
    probability_bound: float
    params: dict = field(default_factory=dict)


def _clamp(p: float) -> float:
    return min(1.0, max(0.0, p))


def azuma_additive(k: int, c: float, t: float) -> TailBound:
    """``exp(-t^2 / (2 k c^2))`` for a martingale with increments bounded by ``c``."""
    if k < 1 or c <= 0 or t < 0:
        raise InputError("need k >= 1, c > 0, t >= 0")
    return TailBound(_clamp(exp(-t * t / (2 * k * c * c))), {"k": k, "c": c, "t": t})


def azuma_multiplicative(mu: float, delta_mult: float, c: float) -> TailBound:
    """``exp(-delta^2 mu / ((2 + delta) c))``."""
    if mu < 0 or delta_mult <= 0 or c <= 0:
        raise InputError("need mu >= 0, delta_mult > 0, c > 0")
    p = exp(-delta_mult**2 * mu / ((2 + delta_mult) * c))
    return TailBound(_clamp(p), {"mu": mu, "delta_mult": delta_mult, "c": c})


def hoeffding(t_deviation: float, count: int) -> TailBound:
    """``exp(-2 count t^2)`` for the mean of ``count`` variables in ``[0, 1]``."""
    if count < 1 or t_deviation < 0:
        raise InputError("need count >= 1 and t >= 0")
    p = exp(-2 * count * t_deviation**2)
    return TailBound(_clamp(p), {"t": t_deviation, "count": count})


# inverses: the deviation at which each bound equals a target probability

def azuma_deviation(k: int, c: float, prob: float) -> float:
    return c * sqrt(2 * k * log(1 / prob))


def azuma_multiplicative_mu(delta_mult: float, c: float, prob: float) -> float:
    return (2 + delta_mult) * c * log(1 / prob) / delta_mult**2


def hoeffding_deviation(count: int, prob: float) -> float:
    return sqrt(log(1 / prob) / (2 * count))
