"""Simple learners and the symmetrizing / monotonizing wrappers."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np
from sklearn.base import clone

from ._base import TransductiveClassifier, check_X, exact_proba, point_mass
from .hypothesis_space import InputError


class ConstantClassifier(TransductiveClassifier):
    """Ignores the data and always predicts ``label``."""

    def __init__(self, label=1):
        self.label = label

    def predict_exact_proba(self, X):
        self._check_fitted()
        return [point_mass(self.label) for _ in check_X(X)]


class ERMClassifier(TransductiveClassifier):
    """Empirical risk minimizer over a finite class (first minimizer in class order)."""

    def __init__(self, hypothesis_class=None):
        self.hypothesis_class = hypothesis_class

    def _fit(self, X, y):
        H = self.hypothesis_class
        if H is None:
            raise InputError("ERMClassifier needs a hypothesis_class")
        errors = np.count_nonzero(H.matrix[:, X] != y, axis=1) if len(X) else np.zeros(len(H))
        self.hypothesis_ = H.members[int(np.argmin(errors))]

    def predict_exact_proba(self, X):
        self._check_fitted()
        X = check_X(X, self.hypothesis_class.domain_size)
        return [point_mass(self.hypothesis_[x]) for x in X]


class LastLabelClassifier(TransductiveClassifier):
    """Order-sensitive toy learner: repeats the label of the last training example."""

    def __init__(self, default=1):
        self.default = default

    def predict_exact_proba(self, X):
        self._check_fitted()
        label = int(self.y_[-1]) if len(self.y_) else self.default
        return [point_mass(label) for _ in check_X(X)]


def _mix(dists, weight: Fraction) -> dict:
    out: dict = {}
    for d in dists:
        for lab, p in d.items():
            out[lab] = out.get(lab, Fraction(0)) + weight * p
    return out


class SymmetricWrapper(TransductiveClassifier):
    """Trains ``base`` on the sample sorted by (point, label).

    The result depends only on the multiset of examples, whatever the base.
    """

    def __init__(self, base=None):
        self.base = base

    def _fit(self, X, y):
        order = np.lexsort((y, X))
        self.base_ = clone(self.base).fit(X[order], y[order])

    def predict_exact_proba(self, X):
        self._check_fitted()
        return exact_proba(self.base_, X)


class MonotoneWrapper(TransductiveClassifier):
    """Randomized learner that trains ``base`` on a uniform random subsample.

    With training size ``s`` the base sees ``s - 1`` examples chosen
    uniformly, so its error rate at total size ``n + 1`` is the base rate at
    ``n``.  If ``base_rate`` (a function of the total sample size) is given,
    the subsample size instead targets the best base rate at any smaller
    size, which makes :meth:`declared_rate` non-increasing.  Predictions are
    the exact average over all subsamples.
    """

    def __init__(self, base=None, base_rate=None):
        self.base = base
        self.base_rate = base_rate

    def declared_rate(self, n: int) -> float:
        if self.base_rate is None:
            raise InputError("no base_rate was declared")
        if n < 2:
            raise InputError("the wrapper needs a sample of size at least 2")
        return min(self.base_rate(m) for m in range(1, n))

    def _target_train_size(self, s: int) -> int:
        if self.base_rate is None:
            return s - 1
        n = s + 1
        best = self.declared_rate(n)
        m = max(m for m in range(1, n) if self.base_rate(m) == best)
        return m - 1

    def _fit(self, X, y):
        if len(X) < 1:
            raise InputError("the wrapper needs a sample of size at least 2")
        size = self._target_train_size(len(X))
        self.fits_ = [
            clone(self.base).fit(X[list(idx)], y[list(idx)])
            for idx in combinations(range(len(X)), size)
        ]
        self.weight_ = Fraction(1, comb(len(X), size))

    def predict_exact_proba(self, X):
        self._check_fitted()
        X = check_X(X)
        per_fit = [exact_proba(f, X) for f in self.fits_]
        return [_mix([p[j] for p in per_fit], self.weight_) for j in range(len(X))]


def wrap_symmetric(learner) -> SymmetricWrapper:
    return SymmetricWrapper(learner)


def wrap_monotone(learner, base_rate=None) -> MonotoneWrapper:
    return MonotoneWrapper(learner, base_rate)
