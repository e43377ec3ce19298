"""Finite distributions with rational probabilities, exact risks and sampling."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from ._base import expected_loss, exact_proba, point_mass
from .hypothesis_space import HypothesisClass, InputError, Labeling, parse_label_token


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Independent stream for ``(seed, *keys)``; every random draw goes through this."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, keys)]))


class FiniteDistribution:
    """Distribution over ``(point, label)`` pairs with exact rational masses."""

    def __init__(self, probs: Mapping[tuple[int, int], Fraction], domain_size: int | None = None):
        clean = {}
        for (x, y), p in probs.items():
            x, y, p = int(x), int(y), Fraction(p)
            if y not in (1, -1):
                raise InputError(f"label {y} is not +1/-1")
            if p < 0:
                raise InputError("probabilities must be nonnegative")
            if p:
                clean[(x, y)] = clean.get((x, y), Fraction(0)) + p
        if sum(clean.values(), Fraction(0)) != 1:
            raise InputError("probabilities must sum to exactly 1")
        m = max(x for x, _ in clean) + 1
        domain_size = m if domain_size is None else domain_size
        if min(x for x, _ in clean) < 0 or m > domain_size:
            raise InputError("support outside the domain")
        self.domain_size = domain_size
        self.probs = dict(sorted(clean.items()))
        self._support = np.array(list(self.probs), dtype=np.int64)
        self._cdf = np.cumsum([float(p) for p in self.probs.values()])
        self._cdf[-1] = 1.0

    def __repr__(self):
        return f"FiniteDistribution({self.probs!r}, domain_size={self.domain_size})"

    def marginal(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for (x, _), p in self.probs.items():
            out[x] = out.get(x, Fraction(0)) + p
        return out

    def sample(self, count: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        if count < 0:
            raise InputError("count must be nonnegative")
        idx = np.searchsorted(self._cdf, rng.random(count), side="right")
        pairs = self._support[np.minimum(idx, len(self._support) - 1)]
        return pairs[:, 0].copy(), pairs[:, 1].copy()


def sample_iid(D: FiniteDistribution, count: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """``count`` i.i.d. draws; ``seed`` is an int or a Generator."""
    rng = seed if isinstance(seed, np.random.Generator) else rng_for(seed)
    return D.sample(count, rng)


def load_distribution(path: str | Path, domain_size: int | None = None) -> FiniteDistribution:
    """Read CSV rows ``point,label,numerator,denominator``."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"distribution file not found: {path}")
    probs: dict = {}
    with path.open(newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            if len(row) != 4:
                raise InputError(f"expected point,label,num,den in {path}, got {row}")
            try:
                x = int(row[0])
                p = Fraction(int(row[2]), int(row[3]))
            except (ValueError, ZeroDivisionError):
                raise InputError(f"bad distribution row {row} in {path}") from None
            key = (x, parse_label_token(row[1]))
            probs[key] = probs.get(key, Fraction(0)) + p
    if not probs:
        raise InputError(f"empty distribution file: {path}")
    return FiniteDistribution(probs, domain_size)


def dump_distribution(D: FiniteDistribution) -> str:
    return "".join(f"{x},{y:+d},{p.numerator},{p.denominator}\n" for (x, y), p in D.probs.items())


def planted_noise(h: Labeling, eta, marginal: Sequence | None = None) -> FiniteDistribution:
    """Labels follow ``h`` except for an independent flip with probability ``eta``."""
    eta = Fraction(eta)
    m = len(h)
    if not 0 <= eta <= 1:
        raise InputError("flip rate must be in [0, 1]")
    marginal = [Fraction(1, m)] * m if marginal is None else [Fraction(p) for p in marginal]
    probs = {}
    for x, (lab, px) in enumerate(zip(h, marginal)):
        probs[(x, lab)] = (1 - eta) * px
        probs[(x, -lab)] = eta * px
    return FiniteDistribution(probs, m)


# -- risks ------------------------------------------------------------------------

def predictor_table(h, domain_size: int) -> list[dict]:
    """Prediction distribution at every domain point.

    ``h`` may be a labeling of the domain, a fitted estimator, or a callable
    mapping a point to a label.
    """
    if isinstance(h, (tuple, list, np.ndarray)):
        if len(h) != domain_size:
            raise InputError("labeling length does not match the domain")
        return [point_mass(v) for v in h]
    if hasattr(h, "predict"):
        return exact_proba(h, np.arange(domain_size))
    if callable(h):
        return [point_mass(h(x)) for x in range(domain_size)]
    raise InputError(f"cannot evaluate predictor of type {type(h).__name__}")


def exact_risk(h, D: FiniteDistribution, loss=None) -> Fraction:
    table = predictor_table(h, D.domain_size)
    return sum((p * expected_loss(table[x], y, loss) for (x, y), p in D.probs.items()), Fraction(0))


def best_in_class(D: FiniteDistribution, H: HypothesisClass, loss=None) -> tuple[Fraction, Labeling]:
    """Smallest risk in ``H`` and the first member attaining it."""
    best, arg = None, None
    for h in H:
        r = exact_risk(h, D, loss)
        if best is None or r < best:
            best, arg = r, h
    return best, arg


@dataclass(frozen=True)
class RiskReport:
    learner_risk: Fraction
    best_in_class_risk: Fraction
    excess: Fraction
    best_hypothesis: Labeling


def excess_risk(h, D: FiniteDistribution, H: HypothesisClass, loss=None) -> RiskReport:
    r = exact_risk(h, D, loss)
    best, arg = best_in_class(D, H, loss)
    return RiskReport(r, best, r - best, arg)


# -- Monte-Carlo PAC failure ------------------------------------------------------------

def wilson_interval(failures: int, trials: int, alpha: float = 0.05) -> tuple[float, float]:
    lo, hi = proportion_confint(failures, trials, alpha=alpha, method="wilson")
    return float(lo), float(hi)


@dataclass(frozen=True)
class PacFailureEstimate:
    failures: int
    trials: int
    excesses: tuple[Fraction, ...]

    @property
    def failure_rate(self) -> float:
        return self.failures / self.trials

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials)


def estimate_pac_failure(
    builder: Callable,
    D: FiniteDistribution,
    H: HypothesisClass,
    epsilon,
    trials: int,
    seed: int,
    sample_size: int,
    loss=None,
) -> PacFailureEstimate:
    """Fraction of trials whose exact excess risk exceeds ``epsilon``.

    Trial ``j`` draws ``sample_size`` examples from ``rng_for(seed, j)`` and
    calls ``builder(X, y, rng)``; only sampling is random, risks are exact.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    eps = Fraction(epsilon)
    best, _ = best_in_class(D, H, loss)
    excesses = []
    for j in range(trials):
        rng = rng_for(seed, j)
        X, y = D.sample(sample_size, rng)
        excesses.append(exact_risk(builder(X, y, rng), D, loss) - best)
    failures = sum(e > eps for e in excesses)
    return PacFailureEstimate(failures, trials, tuple(excesses))
