"""Estimator plumbing shared by every transductive learner."""
from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .hypothesis_space import InputError

Proba = dict  # label -> Fraction


def check_X(X, domain_size: int | None = None, allow_empty: bool = True) -> np.ndarray:
    """Point indices as a 1-D int array; accepts shape ``(n,)`` or ``(n, 1)``."""
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise InputError("X must be a sequence of point indices or an (n, 1) array")
    if arr.size == 0:
        if not allow_empty:
            raise InputError("X must contain at least one point")
        return np.empty(0, dtype=np.int64)
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.mod(arr, 1) == 0):
            raise InputError("point indices must be integers")
    arr = arr.astype(np.int64)
    if domain_size is not None and (arr.min() < 0 or arr.max() >= domain_size):
        raise InputError(f"point indices must lie in 0..{domain_size - 1}")
    return arr


def check_y(y, n: int) -> np.ndarray:
    arr = np.asarray(y).ravel()
    if arr.size != n:
        raise InputError(f"got {n} points but {arr.size} labels")
    arr = arr.astype(np.int64)
    if arr.size and not np.all((arr == 1) | (arr == -1)):
        raise InputError("labels must be +1 or -1")
    return arr


def point_mass(label) -> Proba:
    return {int(label): Fraction(1)}


def exact_proba(est, X) -> list[Proba]:
    """Exact prediction distributions of a fitted estimator.

    Estimators without ``predict_exact_proba`` are treated as deterministic.
    """
    if hasattr(est, "predict_exact_proba"):
        return est.predict_exact_proba(X)
    return [point_mass(p) for p in np.asarray(est.predict(X)).ravel()]


def expected_loss(dist: Proba, y_true, loss=None) -> Fraction:
    if loss is None:
        return sum((p for lab, p in dist.items() if lab != y_true), Fraction(0))
    return sum((p * loss(lab, y_true) for lab, p in dist.items()), Fraction(0))


class TransductiveClassifier(ClassifierMixin, BaseEstimator):
    """Base for learners over integer points with labels in {-1, +1}.

    Subclasses implement ``_fit`` and ``predict_exact_proba``; ``predict``
    returns the more likely label (``+1`` on ties) and ``predict_proba``
    follows ``classes_ = [-1, 1]``.
    """

    def _domain_size(self):
        H = getattr(self, "hypothesis_class", None)
        return None if H is None else H.domain_size

    def fit(self, X, y):
        X = check_X(X, self._domain_size())
        y = check_y(y, len(X))
        self.classes_ = np.array([-1, 1])
        self.X_, self.y_ = X, y
        self.n_features_in_ = 1
        self._fit(X, y)
        return self

    def _fit(self, X, y):
        pass

    def _check_fitted(self):
        check_is_fitted(self, "X_")

    def predict_exact_proba(self, X) -> list[Proba]:
        raise NotImplementedError

    def predict_proba(self, X) -> np.ndarray:
        dists = self.predict_exact_proba(X)
        return np.array([[float(d.get(-1, 0)), float(d.get(1, 0))] for d in dists]).reshape(-1, 2)

    def predict(self, X) -> np.ndarray:
        dists = self.predict_exact_proba(X)
        return np.array([1 if d.get(1, 0) >= d.get(-1, 0) else -1 for d in dists], dtype=np.int64)
