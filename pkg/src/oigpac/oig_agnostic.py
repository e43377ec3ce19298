"""The agnostic one-inclusion graph: the full hypercube over a sample with credits.

Vertex ``v`` of the hypercube ``Q_n`` is the labeling whose coordinate ``i``
is ``-1`` iff bit ``i`` of ``v`` is set.  A vertex's credit is its Hamming
distance to the nearest restriction of the class to the sample.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from math import lcm
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln

from ._base import TransductiveClassifier, check_X, point_mass
from .hypothesis_space import (
    HypothesisClass,
    InputError,
    Labeling,
    ResourceLimitError,
    check_points,
    index_to_labeling,
    labeling_to_index,
)
from .oig_realizable import transductive_error
from .orientation import Orientation, min_max_excess_orientation

CREDIT_GUARD = 20
ORIENT_GUARD = 14
BRUTE_FORCE_GUARD = 4


@lru_cache(maxsize=None)
def hypercube_edges(n: int) -> np.ndarray:
    """Edges of ``Q_n`` as ``(lower, upper)`` pairs, grouped by coordinate."""
    v = np.arange(1 << n, dtype=np.int64)
    blocks = []
    for c in range(n):
        lower = v[(v >> c) & 1 == 0]
        blocks.append(np.stack([lower, lower | (1 << c)], axis=1))
    out = np.concatenate(blocks) if blocks else np.empty((0, 2), dtype=np.int64)
    out.setflags(write=False)
    return out


def restriction_indices(H: HypothesisClass, T: Sequence[int]) -> np.ndarray:
    T = check_points(T, H.domain_size)
    cols = H.matrix[:, list(T)] == -1
    weights = 1 << np.arange(len(T), dtype=np.int64)
    return np.unique(cols.astype(np.int64) @ weights)


def _bfs_distance(n: int, sources: np.ndarray) -> np.ndarray:
    dist = np.full(1 << n, -1, dtype=np.int64)
    dist[sources] = 0
    frontier, d = np.asarray(sources, dtype=np.int64), 0
    flips = 1 << np.arange(n, dtype=np.int64)
    while frontier.size:
        d += 1
        nb = np.unique((frontier[:, None] ^ flips).ravel())
        nb = nb[dist[nb] < 0]
        dist[nb] = d
        frontier = nb
    return dist


@dataclass(frozen=True, eq=False)
class AgnosticOig:
    n: int
    restriction: np.ndarray  # sorted vertex ids of H|T
    credits: np.ndarray  # length 2**n

    @property
    def num_vertices(self) -> int:
        return 1 << self.n

    @property
    def num_edges(self) -> int:
        return self.n << (self.n - 1) if self.n else 0

    def credit(self, u) -> int:
        return int(self.credits[_as_vertex(u)])

    def restriction_labelings(self) -> frozenset[Labeling]:
        return frozenset(index_to_labeling(int(v), self.n) for v in self.restriction)


def agnostic_oig_from_restriction(vertices, n: int | None = None) -> AgnosticOig:
    """Agnostic graph for an explicit restriction (labelings or vertex ids)."""
    vertices = list(vertices)
    if not vertices:
        raise InputError("restriction must be non-empty")
    if n is None:
        if not isinstance(vertices[0], (tuple, list)):
            raise InputError("pass n when giving vertex ids")
        n = len(vertices[0])
    if n > CREDIT_GUARD:
        raise ResourceLimitError(f"sample length {n} exceeds the credit guard {CREDIT_GUARD}")
    ids = np.unique(np.array([_as_vertex(v) for v in vertices], dtype=np.int64))
    credits = _bfs_distance(n, ids)
    credits.setflags(write=False)
    return AgnosticOig(n, ids, credits)


def compute_credits(H: HypothesisClass, T: Sequence[int]) -> AgnosticOig:
    """Credits of every labeling of ``T`` by multi-source BFS from ``H|T``."""
    n = len(check_points(T, H.domain_size))
    if n > CREDIT_GUARD:
        raise ResourceLimitError(f"sample length {n} exceeds the credit guard {CREDIT_GUARD}")
    return agnostic_oig_from_restriction(restriction_indices(H, T), n)


# -- densities ----------------------------------------------------------------

@total_ordering
@dataclass(frozen=True)
class DensityValue:
    numerator: int
    denominator: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __float__(self):
        return self.numerator / self.denominator

    def __eq__(self, other):
        if isinstance(other, DensityValue):
            other = other.value
        return self.value == other

    def __lt__(self, other):
        if isinstance(other, DensityValue):
            other = other.value
        return self.value < other

    def __hash__(self):
        return hash(self.value)


def _as_vertex(u) -> int:
    if isinstance(u, (tuple, list, np.ndarray)):
        return labeling_to_index(u)
    return int(u)


def _as_ids(U: Iterable) -> np.ndarray:
    ids = np.unique(np.array([_as_vertex(u) for u in U], dtype=np.int64))
    return ids


def _mask(ids: np.ndarray, n: int) -> np.ndarray:
    m = np.zeros(1 << n, dtype=bool)
    m[ids] = True
    return m


def internal_edges(U, n: int) -> int:
    """Number of hypercube edges with both endpoints in ``U``."""
    e = hypercube_edges(n)
    m = _mask(_as_ids(U), n)
    return int(np.count_nonzero(m[e[:, 0]] & m[e[:, 1]]))


def discounted_density(U, oig: AgnosticOig) -> DensityValue:
    """``(|E(U,U)| - total credit of U) / |U|`` as an exact rational."""
    ids = _as_ids(U)
    if ids.size == 0:
        raise InputError("density of an empty vertex set")
    if ids.max() >= oig.num_vertices or ids.min() < 0:
        raise InputError("vertex outside the hypercube")
    num = internal_edges(ids, oig.n) - int(oig.credits[ids].sum())
    return DensityValue(num, int(ids.size))


def phi_full(oig: AgnosticOig) -> DensityValue:
    """Density of the whole hypercube, ``(n 2^(n-1) - sum of credits) / 2^n``."""
    return DensityValue(oig.num_edges - int(oig.credits.sum()), oig.num_vertices)


def subset_table(oig: AgnosticOig):
    """Edge count, credit total and size of every nonempty vertex subset.

    Subset ``s`` (``1 <= s < 2**(2**n)``) contains vertex ``v`` iff bit ``v``
    of ``s`` is set.
    """
    if oig.n > BRUTE_FORCE_GUARD:
        raise ResourceLimitError(f"subset enumeration needs n <= {BRUTE_FORCE_GUARD}")
    N = oig.num_vertices
    s = np.arange(1, 1 << N, dtype=np.int64)
    member = ((s[:, None] >> np.arange(N)) & 1).astype(bool)
    e = hypercube_edges(oig.n)
    edges = np.count_nonzero(member[:, e[:, 0]] & member[:, e[:, 1]], axis=1)
    credit = member.astype(np.int64) @ oig.credits
    size = member.sum(axis=1)
    return s, member, edges, credit, size


def max_density_bruteforce(oig: AgnosticOig) -> tuple[frozenset[Labeling], DensityValue]:
    """Exact maximizer of the discounted density over all nonempty subsets.

    Ties go to the larger subset, then to the lexicographically smallest list
    of vertex ids.
    """
    s, member, edges, credit, size = subset_table(oig)
    num = edges - credit
    scale = lcm(*range(1, oig.num_vertices + 1))
    scaled = num * (scale // size)
    best = np.flatnonzero(scaled == scaled.max())
    best = best[size[best] == size[best].max()]
    keys = [tuple(np.flatnonzero(member[j]).tolist()) for j in best]
    j = best[min(range(len(best)), key=keys.__getitem__)]
    U = frozenset(index_to_labeling(int(v), oig.n) for v in np.flatnonzero(member[j]))
    return U, DensityValue(int(num[j]), int(size[j]))


# -- symmetrization -------------------------------------------------------------

def mirror(U, i: int) -> frozenset[Labeling]:
    """Flip coordinate ``i`` of every labeling in ``U``."""
    return frozenset(u[:i] + (-u[i],) + u[i + 1 :] for u in map(tuple, U))


def _check_index(U, i):
    U = frozenset(map(tuple, U))
    if U:
        n = len(next(iter(U)))
        if not 0 <= i < n:
            raise InputError(f"coordinate {i} outside 0..{n - 1}")
    return U


def symmetrize(U, i: int) -> frozenset[Labeling]:
    """Smallest superset of ``U`` closed under flipping coordinate ``i``."""
    U = _check_index(U, i)
    return U | mirror(U, i)


class PartitionSets(NamedTuple):
    n_plus: frozenset
    n_minus: frozenset
    i_plus: frozenset
    i_minus: frozenset


def partition_sets(U, i: int) -> PartitionSets:
    """Split ``U`` by the sign of coordinate ``i`` and by whether the mirror is in ``U``."""
    U = _check_index(U, i)
    plus = frozenset(u for u in U if u[i] == 1)
    minus = U - plus
    n_plus = plus & mirror(minus, i)
    n_minus = minus & mirror(plus, i)
    return PartitionSets(n_plus, n_minus, plus - n_plus, minus - n_minus)


def g_value(U, alpha, oig: AgnosticOig) -> Fraction:
    """Potential ``|E(U,U)| - total credit of U - alpha |U|``."""
    ids = _as_ids(U)
    if ids.size == 0:
        raise InputError("potential of an empty vertex set")
    return Fraction(internal_edges(ids, oig.n) - int(oig.credits[ids].sum())) - Fraction(alpha) * int(ids.size)


# -- orientation and learner ------------------------------------------------------

def orient_agnostic(oig: AgnosticOig) -> tuple[Orientation, int]:
    """Orientation of ``Q_n`` minimizing the largest out-degree minus credit."""
    if oig.n > ORIENT_GUARD:
        raise ResourceLimitError(f"hypercube orientation needs n <= {ORIENT_GUARD}")
    return min_max_excess_orientation(oig.num_vertices, hypercube_edges(oig.n), oig.credits)


@lru_cache(maxsize=256)
def _head_table(H: HypothesisClass, T: tuple[int, ...]) -> np.ndarray:
    """``table[c, v]`` is True when the coordinate-``c`` edge at lower vertex ``v`` points up."""
    oig = compute_credits(H, T)
    orient, _ = orient_agnostic(oig)
    n = len(T)
    table = np.zeros((n, 1 << n), dtype=bool)
    e = orient.edges
    coord = np.repeat(np.arange(n), 1 << (n - 1)) if n else np.empty(0, dtype=np.int64)
    table[coord, e[:, 0]] = orient.head == e[:, 1]
    table.setflags(write=False)
    return table


class AgnosticOIGClassifier(TransductiveClassifier):
    """Transductive learner from a min-max excess out-degree orientation of ``Q_n``.

    The training sample is sorted by (point, label) and the test point takes
    the first slot among equal points, so predictions depend only on the
    multiset of examples.  Total sample size (training plus one) is limited
    to ``ORIENT_GUARD``.
    """

    def __init__(self, hypothesis_class=None):
        self.hypothesis_class = hypothesis_class

    def _fit(self, X, y):
        if self.hypothesis_class is None:
            raise InputError("AgnosticOIGClassifier needs a hypothesis_class")
        if len(X) + 1 > ORIENT_GUARD:
            raise ResourceLimitError(f"sample size {len(X) + 1} exceeds {ORIENT_GUARD}")
        order = np.lexsort((y, X))
        self.sorted_X_, self.sorted_y_ = X[order], y[order]

    def _predict_one(self, x: int) -> int:
        xs = self.sorted_X_.tolist()
        slot = bisect_left(xs, x)
        T = tuple(xs[:slot] + [x] + xs[slot:])
        labels = self.sorted_y_.tolist()
        labels = labels[:slot] + [1] + labels[slot:]
        lower = labeling_to_index(labels)
        up = _head_table(self.hypothesis_class, T)[slot, lower]
        return -1 if up else 1

    def predict_exact_proba(self, X):
        self._check_fitted()
        X = check_X(X, self.hypothesis_class.domain_size)
        return [point_mass(self._predict_one(int(x))) for x in X]


def learner_excess_batch(H: HypothesisClass, T: Sequence[int], ids) -> np.ndarray:
    """Transductive excess of :class:`AgnosticOIGClassifier`, times ``n``, for many labelings.

    ``T`` must have distinct points; ``ids`` are vertex ids of labelings of
    ``T`` in the given order.  Returns integer numerators over ``n``.  Same
    predictions as the estimator, read straight from its head table.
    """
    T = tuple(int(x) for x in T)
    n = len(T)
    if len(set(T)) != n:
        raise InputError("batched excess needs distinct sample points")
    order = np.argsort(T)
    table = _head_table(H, tuple(sorted(T)))
    ids = np.asarray(ids, dtype=np.int64)
    # move bit order[j] of each id to position j (sorted coordinates)
    sid = np.zeros_like(ids)
    for j, src in enumerate(order):
        sid |= ((ids >> int(src)) & 1) << j
    mistakes = np.zeros(len(ids), dtype=np.int64)
    for c in range(n):
        minus = (sid >> c) & 1
        up = table[c, sid & ~(1 << c)]
        mistakes += up != minus.astype(bool)
    credits = compute_credits(H, T).credits
    return mistakes - credits[ids]


# -- one repeated point ----------------------------------------------------------

def _symmetric_threshold_exact(L: int) -> tuple[Fraction, list[Fraction]]:
    R = [Fraction(1)]
    for a in range(1, L):
        R.append((a * R[-1] + L) / (L - a))
    if L % 2 == 0:
        t = Fraction(L, 2) / (R[L // 2 - 1] + 1)
    else:
        t = Fraction(L, 2) / R[(L - 1) // 2]
    return t, R


def repeated_point_decisions(L: int) -> list[Fraction]:
    """Optimal symmetric randomized decisions for ``L`` copies of one point.

    The class restricted to the sample is ``{all +, all -}``.  Entry ``b`` is
    the probability of predicting ``+1`` when ``b`` of the ``L - 1`` training
    labels are ``+1``.  The worst excess out-degree equals the density of the
    whole hypercube, the smallest possible value.
    """
    if L < 1:
        raise InputError("need at least one copy")
    t, R = _symmetric_threshold_exact(L)
    p = [Fraction(0)] * L
    for b in range(L):
        if 2 * b < L - 1:
            p[b] = t * R[b] / L
        elif 2 * b == L - 1:
            p[b] = Fraction(1, 2)
        else:
            p[b] = 1 - t * R[L - 1 - b] / L
    return p


def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


@lru_cache(maxsize=64)
def repeated_point_decisions_float(L: int) -> np.ndarray:
    """Floating-point version of :func:`repeated_point_decisions` for large ``L``."""
    if L < 1:
        raise InputError("need at least one copy")
    # only the lower half of R is needed, and there it stays moderate
    half = L // 2
    a = np.arange(half + 1)
    log_cum = np.logaddexp.accumulate(_log_binom(L, a))
    R = np.exp(log_cum - _log_binom(L - 1, a))
    t = (L / 2) / (R[half - 1] + 1) if L % 2 == 0 else (L / 2) / R[half]
    lower = t * R / L
    b = np.arange(L)
    mirrored = np.minimum(b, L - 1 - b)
    p = np.where(2 * b < L - 1, lower[mirrored], 1 - lower[mirrored])
    p[2 * b == L - 1] = 0.5
    p.setflags(write=False)
    return p


def repeated_point_excess(p: Sequence) -> list:
    """Excess out-degree at each vertex class (``a`` pluses, ``a = 0..L``)."""
    L = len(p)
    out = []
    for a in range(L + 1):
        e = (L - a) * (p[a] if a < L else 0) + a * ((1 - p[a - 1]) if a > 0 else 0)
        out.append(e - min(a, L - a))
    return out


class RepeatedPointOIGClassifier(TransductiveClassifier):
    """Optimal randomized agnostic learner on a one-point domain.

    The training labels enter only through their count of ``+1``; the
    prediction is ``+1`` with the probability given by
    :func:`repeated_point_decisions`.  If the class fixes the point's label,
    that label is predicted.  Samples larger than ``exact_limit`` use the
    floating-point decisions.
    """

    def __init__(self, hypothesis_class=None, exact_limit=256):
        self.hypothesis_class = hypothesis_class
        self.exact_limit = exact_limit

    def _fit(self, X, y):
        H = self.hypothesis_class
        if H is None or H.domain_size != 1:
            raise InputError("RepeatedPointOIGClassifier needs a class on a one-point domain")
        self.plus_count_ = int(np.count_nonzero(y == 1))

    def prob_plus(self) -> Fraction:
        self._check_fitted()
        labels = {h[0] for h in self.hypothesis_class}
        if len(labels) == 1:
            return Fraction(1) if 1 in labels else Fraction(0)
        L = len(self.X_) + 1
        if L <= self.exact_limit:
            return repeated_point_decisions(L)[self.plus_count_]
        return Fraction(float(repeated_point_decisions_float(L)[self.plus_count_]))

    def predict_exact_proba(self, X):
        X = check_X(X, 1)
        p = self.prob_plus()
        return [{1: p, -1: 1 - p} for _ in X]


# -- excess ------------------------------------------------------------------------

def empirical_losses(H: HypothesisClass, X, y) -> np.ndarray:
    """Number of mistakes of every member of ``H`` on the sample."""
    X = check_X(X, H.domain_size)
    y = np.asarray(y).ravel()
    return np.count_nonzero(H.matrix[:, X] != y, axis=1)


def agnostic_transductive_excess(learner, X, y, H: HypothesisClass) -> Fraction:
    """0-1 leave-one-out error of ``learner`` minus the best empirical error in ``H``."""
    best = Fraction(int(empirical_losses(H, X, y).min()), len(np.asarray(y).ravel()))
    return transductive_error(learner, X, y) - best
