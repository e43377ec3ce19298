"""Empirical Rademacher complexity of a finite set of labelings."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import sqrt

import numpy as np

from .hypothesis_space import InputError, ResourceLimitError
from .oig_agnostic import AgnosticOig, phi_full

EXACT_GUARD = 20
_CHUNK = 1 << 14


def _as_matrix(Hres) -> np.ndarray:
    rows = [tuple(int(b) for b in h) for h in Hres]
    if not rows:
        raise InputError("restricted class must be non-empty")
    M = np.array(sorted(set(rows)), dtype=np.int64)
    if M.ndim != 2 or not np.all(np.abs(M) == 1):
        raise InputError("labelings must be equal-length sequences of +1/-1")
    return M


def _signs(start: int, stop: int, n: int) -> np.ndarray:
    v = np.arange(start, stop, dtype=np.int64)
    return 1 - 2 * ((v[:, None] >> np.arange(n)) & 1)


def max_correlation_total(Hres) -> int:
    """Sum over all ``2**n`` sign vectors of ``max_h <sigma, h>``."""
    M = _as_matrix(Hres)
    n = M.shape[1]
    if n > EXACT_GUARD:
        raise ResourceLimitError(f"exact enumeration needs n <= {EXACT_GUARD}")
    total = 0
    for start in range(0, 1 << n, _CHUNK):
        S = _signs(start, min(start + _CHUNK, 1 << n), n)
        total += int((S @ M.T).max(axis=1).sum())
    return total


def exact_rademacher(Hres) -> Fraction:
    """``(1/n) E_sigma max_h <sigma, h>`` over all sign vectors, exactly."""
    M = _as_matrix(Hres)
    n = M.shape[1]
    return Fraction(max_correlation_total(M), n << n)


@dataclass(frozen=True)
class RademacherEstimate:
    value: float | Fraction
    n: int
    mode: str  # "exact" or "monte_carlo"
    se: float = 0.0
    trials: int = 0
    seed: int | None = None


def mc_rademacher(Hres, trials: int, seed: int) -> RademacherEstimate:
    """Monte-Carlo mean of ``max_h <sigma, h> / n`` with its standard error.

    Draws are made in fixed-size chunks, chunk ``j`` using the stream
    ``SeedSequence([seed, j])``, so results do not depend on batching.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    M = _as_matrix(Hres)
    n = M.shape[1]
    vals = []
    for j, start in enumerate(range(0, trials, _CHUNK)):
        size = min(_CHUNK, trials - start)
        rng = np.random.default_rng(np.random.SeedSequence([seed, j]))
        S = rng.choice(np.array([-1, 1]), size=(size, n))
        vals.append((S @ M.T).max(axis=1) / n)
    vals = np.concatenate(vals)
    se = float(vals.std(ddof=1) / sqrt(trials)) if trials > 1 else float("nan")
    return RademacherEstimate(float(vals.mean()), n, "monte_carlo", se, trials, seed)


def vc_rademacher_bound(vc: int, n: int) -> float:
    if vc < 0 or n < 1:
        raise InputError("need vc >= 0 and n >= 1")
    return 31 * sqrt(vc / n)


def within_vc_bound(value: Fraction, vc: int, n: int) -> bool:
    """Exact test of ``value <= 31 sqrt(vc/n)`` for a nonnegative ``value``."""
    value = Fraction(value)
    return value <= 0 or value * value <= Fraction(961 * vc, n)


@dataclass(frozen=True)
class IdentityCheck:
    equal: bool
    phi: Fraction
    half_n_rademacher: Fraction


def phi_rademacher_identity_check(oig: AgnosticOig, Hres=None) -> IdentityCheck:
    """Compare the density of the whole hypercube with ``(n/2)`` times the Rademacher value."""
    if Hres is None:
        Hres = [tuple(1 - 2 * ((int(v) >> np.arange(oig.n)) & 1)) for v in oig.restriction]
    phi = phi_full(oig).value
    rhs = Fraction(oig.n, 2) * exact_rademacher(Hres)
    return IdentityCheck(phi == rhs, phi, rhs)
