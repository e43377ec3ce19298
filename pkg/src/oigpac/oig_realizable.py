"""The realizable one-inclusion graph and its min-max out-degree learner."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from sklearn.base import clone

from ._base import TransductiveClassifier, check_X, exact_proba, expected_loss, point_mass
from .hypothesis_space import HypothesisClass, InputError, Labeling, restrict
from .orientation import Orientation, brute_force_min_max_excess, min_max_excess_orientation


class InfeasiblePartialError(InputError):
    """The given labels match no vertex of the graph (input is not realizable)."""


@dataclass(frozen=True, eq=False)
class RealizableOig:
    n: int
    vertices: tuple[Labeling, ...]
    edges: tuple[tuple[int, int], ...]  # vertex-id pairs, a < b
    edge_coord: tuple[int, ...]  # coordinate on which each edge flips
    index: dict = field(repr=False)
    edge_id: dict = field(repr=False)

    @property
    def edge_array(self) -> np.ndarray:
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)


def oig_from_vertices(vertices) -> RealizableOig:
    """One-inclusion graph on an explicit set of equal-length labelings."""
    verts = tuple(sorted(set(tuple(int(b) for b in v) for v in vertices)))
    if not verts:
        raise InputError("a one-inclusion graph needs at least one vertex")
    n = len(verts[0])
    index = {v: j for j, v in enumerate(verts)}
    edges, coords = [], []
    for a, v in enumerate(verts):
        for i in range(n):
            w = v[:i] + (-v[i],) + v[i + 1 :]
            b = index.get(w)
            if b is not None and b > a:
                edges.append((a, b))
                coords.append(i)
    edge_id = {e: k for k, e in enumerate(edges)}
    return RealizableOig(n, verts, tuple(edges), tuple(coords), index, edge_id)


def build_realizable_oig(H: HypothesisClass, T: Sequence[int]) -> RealizableOig:
    return oig_from_vertices(restrict(H, T))


def orient_min_max_outdegree(G: RealizableOig) -> Orientation:
    orient, _ = min_max_excess_orientation(len(G.vertices), G.edge_array)
    return orient


def brute_force_min_max_outdegree(G: RealizableOig) -> int:
    return brute_force_min_max_excess(len(G.vertices), G.edge_array)


def oig_predict(G: RealizableOig, orientation: Orientation, partial, test_index: int) -> int:
    """Label at ``test_index`` given the other ``n-1`` labels.

    ``partial`` has length ``n``; its entry at ``test_index`` is ignored.
    """
    if not 0 <= test_index < G.n:
        raise InputError(f"test index {test_index} outside 0..{G.n - 1}")
    if len(partial) != G.n:
        raise InputError(f"partial labeling must have length {G.n}")
    base = [int(b) if j != test_index else 1 for j, b in enumerate(partial)]
    plus = tuple(base)
    base[test_index] = -1
    minus = tuple(base)
    a, b = G.index.get(plus), G.index.get(minus)
    if a is None and b is None:
        raise InfeasiblePartialError("no completion of the partial labeling is a vertex")
    if a is None:
        return -1
    if b is None:
        return 1
    head = int(orientation.head[G.edge_id[(min(a, b), max(a, b))]])
    return G.vertices[head][test_index]


# -- transductive error -------------------------------------------------------

def loo_distributions(learner, X, y) -> list[dict]:
    """Prediction distribution on ``x_i`` after training on ``S`` minus ``i``, for each i."""
    X, y = np.asarray(X), np.asarray(y)
    out = []
    for i in range(len(X)):
        mask = np.arange(len(X)) != i
        est = clone(learner).fit(X[mask], y[mask])
        out.append(exact_proba(est, X[i : i + 1])[0])
    return out


def transductive_error(learner, X, y, loss=None) -> Fraction:
    """Exact leave-one-out average loss of ``learner`` on the sample ``(X, y)``.

    Randomized learners contribute their expected loss.  ``loss`` defaults to
    the 0-1 loss.
    """
    y = np.asarray(y)
    if len(y) == 0:
        raise InputError("transductive error needs a non-empty sample")
    dists = loo_distributions(learner, X, y)
    return sum((expected_loss(d, int(t), loss) for d, t in zip(dists, y)), Fraction(0)) / len(y)


# -- learner --------------------------------------------------------------------

def compressed_sample(points: Sequence[int]) -> tuple[int, ...]:
    """Sorted distinct points, with any repeated point kept exactly twice.

    Two copies of a point are always labeled alike, so more copies add no
    vertices or edges: the graph on the compressed sample is isomorphic to the
    graph on the original index positions.
    """
    counts = Counter(int(p) for p in points)
    return tuple(p for p in sorted(counts) for _ in range(min(counts[p], 2)))


@lru_cache(maxsize=4096)
def _oriented(H: HypothesisClass, T: tuple[int, ...]):
    G = build_realizable_oig(H, T)
    return G, orient_min_max_outdegree(G)


class RealizableOIGClassifier(TransductiveClassifier):
    """Transductive learner reading predictions off a min-max out-degree orientation.

    To predict at ``x`` it builds the graph of ``H`` restricted to the
    training points plus ``x``, orients it optimally, and follows the edge
    between the two completions of the training labels.

    Parameters
    ----------
    hypothesis_class : HypothesisClass
    """

    def __init__(self, hypothesis_class=None):
        self.hypothesis_class = hypothesis_class

    def _fit(self, X, y):
        if self.hypothesis_class is None:
            raise InputError("RealizableOIGClassifier needs a hypothesis_class")
        seen = {}
        for p, lab in zip(X.tolist(), y.tolist()):
            if seen.setdefault(p, lab) != lab:
                raise InfeasiblePartialError(f"point {p} carries both labels")
        self.labels_of_ = seen

    def _predict_one(self, x: int) -> int:
        if x in self.labels_of_:
            # forced: the test point repeats a training point
            return self.labels_of_[x]
        T = compressed_sample(self.X_.tolist() + [x])
        G, orient = _oriented(self.hypothesis_class, T)
        slot = T.index(x)
        partial = [self.labels_of_.get(p, 0) for p in T]
        return oig_predict(G, orient, partial, slot)

    def predict_exact_proba(self, X):
        self._check_fitted()
        X = check_X(X, self.hypothesis_class.domain_size)
        return [point_mass(self._predict_one(int(x))) for x in X]
