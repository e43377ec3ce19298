"""Turning transductive learners into PAC learners, plus sample-size budgets."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, log, sqrt
from typing import Callable

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, clone

from ._base import TransductiveClassifier, check_X, check_y, exact_proba, expected_loss, point_mass
from .hypothesis_space import HypothesisClass, InputError
from .learners import wrap_monotone, wrap_symmetric  # noqa: F401  (re-exported)
from .losses import ZERO_ONE, LossFn, generalized_median, validate_pseudometric
from .oig_agnostic import repeated_point_decisions_float
from .sim import FiniteDistribution, best_in_class, exact_risk, rng_for


class ContractError(InputError):
    """An argument violates an operation's contract (e.g. a non-pseudometric loss)."""


# -- budgets ------------------------------------------------------------------------

def _ceil(x: float) -> int:
    # values such as ln(e) land a hair above an integer in floating point
    r = round(x)
    return int(r) if abs(x - r) < 1e-9 else ceil(x)


def _check_unit(**kw):
    for name, v in kw.items():
        if not 0 < v < 1 and not (name == "epsilon" and v == 1):
            raise InputError(f"{name} must lie in (0, 1), got {v}")


def k_agnostic(epsilon: float, delta: float) -> int:
    """Ensemble size ``ceil(32 ln(2/delta) / epsilon^2)``."""
    _check_unit(epsilon=epsilon, delta=delta)
    return _ceil(32 * log(2 / delta) / epsilon**2)


def k_realizable(epsilon: float, delta: float) -> int:
    """Ensemble size ``ceil(3 ln(2/delta) / epsilon)``."""
    _check_unit(epsilon=epsilon, delta=delta)
    return _ceil(3 * log(2 / delta) / epsilon)


def validation_size(k: int, delta: float, epsilon: float) -> int:
    """Hold-out size ``ceil(ln(k/delta) / epsilon^2)``."""
    if k <= 0:
        raise InputError("k must be positive")
    _check_unit(epsilon=epsilon, delta=delta)
    return max(1, _ceil(log(k / delta) / epsilon**2))


def pac_budget(mode: str, epsilon: float, delta: float, m_trans: Callable[[float], int]) -> int:
    """Transductive sample size at ``epsilon/4`` plus the reduction's extra samples.

    Agnostic: ``(8/eps^2) ln(2/(eps delta))``, with the target ``eps`` standing
    in for the rate inside the log.  Realizable: ``(3/eps) ln(2/delta)``.
    """
    _check_unit(epsilon=epsilon, delta=delta)
    base = int(m_trans(epsilon / 4))
    if mode == "agnostic":
        return base + _ceil(8 / epsilon**2 * log(2 / (epsilon * delta)))
    if mode == "realizable":
        return base + _ceil(3 / epsilon * log(2 / delta))
    raise InputError(f"unknown mode {mode!r}")


def oig_agnostic_rate(d: int, n: int) -> float:
    """Agnostic transductive rate ``16 sqrt(d/n)`` of the OIG learner."""
    return 16 * sqrt(d / n)


def oig_agnostic_sample_size(d: int) -> Callable[[float], int]:
    """Inverse of :func:`oig_agnostic_rate`: ``eps -> ceil(256 d / eps^2)``."""
    return lambda eps: _ceil(256 * d / eps**2)


def oig_realizable_sample_size(d: int) -> Callable[[float], int]:
    return lambda eps: _ceil(d / eps)


# -- Algorithm: validation selection ----------------------------------------------------

def prefix_fits(learner, X, y, n: int, k: int) -> list:
    """``h_{i-1}`` trained on the first ``n + i - 1`` examples, ``i = 1..k``."""
    return [clone(learner).fit(X[: n + i - 1], y[: n + i - 1]) for i in range(1, k + 1)]


def empirical_loss(est, X, y, loss=None) -> Fraction:
    dists = exact_proba(est, X)
    return sum((expected_loss(d, int(t), loss) for d, t in zip(dists, y)), Fraction(0)) / len(y)


@dataclass
class SelectionResult:
    predictor: object
    index: int  # 0-based position among h_0..h_{k-1}
    validation_losses: list
    candidates: list


def run_reduction_agnostic(learner, X, y, X_val, y_val, n: int, loss=None) -> SelectionResult:
    """Train on growing prefixes and keep the candidate with least validation loss.

    ``X`` holds ``n + k`` examples; ties go to the earliest candidate.
    """
    X, X_val = check_X(X), check_X(X_val, allow_empty=False)
    y, y_val = check_y(y, len(X)), check_y(y_val, len(X_val))
    k = len(X) - n
    if n < 0 or k < 1:
        raise InputError(f"need n >= 0 and at least one extra example; got n={n}, |S|={len(X)}")
    cands = prefix_fits(learner, X, y, n, k)
    losses = [empirical_loss(h, X_val, y_val, loss) for h in cands]
    j = min(range(k), key=lambda i: (losses[i], i))
    return SelectionResult(cands[j], j, losses, cands)


class MedianEnsemble(TransductiveClassifier):
    """Pointwise generalized median of already fitted predictors."""

    def __init__(self, members=(), loss=ZERO_ONE):
        self.members = members
        self.loss = loss

    def fit(self, X=None, y=None):
        self.classes_ = np.array([-1, 1])
        self.X_ = np.empty(0, dtype=np.int64)
        return self

    def member_predictions(self, X) -> np.ndarray:
        # randomized members contribute their most likely label
        return np.array([np.asarray(m.predict(X)).ravel() for m in self.members])

    def predict_exact_proba(self, X):
        X = check_X(X)
        P = self.member_predictions(X)
        return [point_mass(generalized_median(P[:, j].tolist(), self.loss)) for j in range(len(X))]


def run_reduction_realizable(learner, X, y, n: int, loss: LossFn = ZERO_ONE) -> MedianEnsemble:
    """Median of the ``k`` prefix-trained predictors (``X`` holds ``n + k`` examples)."""
    if not validate_pseudometric(loss).ok:
        raise ContractError("the loss must be a pseudometric")
    X = check_X(X)
    y = check_y(y, len(X))
    k = len(X) - n
    if n < 0 or k < 1:
        raise InputError(f"need n >= 0 and at least one extra example; got n={n}, |S|={len(X)}")
    return MedianEnsemble(prefix_fits(learner, X, y, n, k), loss).fit()


class AgnosticReduction(ClassifierMixin, BaseEstimator):
    """Estimator form of the validation-selection reduction.

    ``fit`` splits its input into the first ``n + k`` training examples and
    the remaining ``k_val`` validation examples.
    """

    def __init__(self, learner=None, n=1, k=1, k_val=1):
        self.learner = learner
        self.n = n
        self.k = k
        self.k_val = k_val

    def fit(self, X, y):
        X = check_X(X)
        y = check_y(y, len(X))
        need = self.n + self.k + self.k_val
        if len(X) != need:
            raise InputError(f"expected {need} examples, got {len(X)}")
        m = self.n + self.k
        self.result_ = run_reduction_agnostic(self.learner, X[:m], y[:m], X[m:], y[m:], self.n)
        self.classes_ = np.array([-1, 1])
        return self

    def predict_exact_proba(self, X):
        return exact_proba(self.result_.predictor, X)

    def predict(self, X):
        return self.result_.predictor.predict(X)


class RealizableReduction(ClassifierMixin, BaseEstimator):
    """Estimator form of the median-aggregation reduction."""

    def __init__(self, learner=None, n=1, k=1, loss=ZERO_ONE):
        self.learner = learner
        self.n = n
        self.k = k
        self.loss = loss

    def fit(self, X, y):
        X = check_X(X)
        if len(X) != self.n + self.k:
            raise InputError(f"expected {self.n + self.k} examples, got {len(X)}")
        self.ensemble_ = run_reduction_realizable(self.learner, X, y, self.n, self.loss)
        self.classes_ = np.array([-1, 1])
        return self

    def predict_exact_proba(self, X):
        return self.ensemble_.predict_exact_proba(X)

    def predict(self, X):
        return self.ensemble_.predict(X)


# -- martingale diagnostics ----------------------------------------------------------

@dataclass(frozen=True)
class MartingaleTrace:
    d: tuple  # d_1..d_k
    agnostic_risks: tuple  # excess risk of h_{i-1}
    epsilon: Fraction

    @property
    def k(self) -> int:
        return len(self.d)

    @property
    def M_partial_sums(self) -> tuple:
        out, s = [], Fraction(0)
        for r, d in zip(self.agnostic_risks, self.d):
            s += r - d
            out.append(s)
        return tuple(out)

    @property
    def B_partial_sums(self) -> tuple:
        # backward sums: entry i is sum_{j >= i} (d_j - eps)
        out, s = [], Fraction(0)
        for d in reversed(self.d):
            s += d - self.epsilon
            out.append(s)
        return tuple(reversed(out))


def martingale_trace(
    learner, D: FiniteDistribution, H: HypothesisClass, n: int, k: int, seed: int, epsilon=0, loss=None
) -> MartingaleTrace:
    """One run of the prefix process with exact per-step quantities.

    ``d_i`` uses the learner's expected loss at the fresh example.
    """
    rng = rng_for(seed)
    X, y = D.sample(n + k, rng)
    best_risk, h_star = best_in_class(D, H, loss)
    d, risks = [], []
    for i, h in enumerate(prefix_fits(learner, X, y, n, k), start=1):
        x_new, y_new = int(X[n + i - 1]), int(y[n + i - 1])
        own = expected_loss(exact_proba(h, [x_new])[0], y_new, loss)
        ref = expected_loss(point_mass(h_star[x_new]), y_new, loss)
        d.append(own - ref)
        risks.append(exact_risk(h, D, loss) - best_risk)
    return MartingaleTrace(tuple(d), tuple(risks), Fraction(epsilon))


def azuma_threshold(k: int, delta: float) -> float:
    return sqrt(8 * k * log(2 / delta))


# -- vectorized engines for a one-point domain ---------------------------------------------
#
# On a one-point domain with class {+1, -1} the agnostic OIG learner is the
# symmetric randomized rule of ``repeated_point_decisions``: it depends on the
# training data only through the number of +1 labels.  The engines below
# simulate many independent trials at once by tracking that count.

def _plus_prob(q) -> tuple[Fraction, int]:
    q = Fraction(q)
    # h* = +1 unless -1 is strictly better (class order breaks ties towards +1)
    return q, 1 if q >= Fraction(1, 2) else 0


def repeated_point_select(plus_S: np.ndarray, plus_val: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Selected candidate index and its +1 probability, per trial.

    ``plus_S`` is a boolean ``(trials, n + k)`` array of +1 labels; ``plus_val``
    a boolean ``(trials, k')`` array.  Validation losses are floats.
    """
    trials, total = plus_S.shape
    k = total - n
    count = plus_S[:, :n].sum(axis=1)
    frac_minus = 1 - plus_val.mean(axis=1)
    best_loss = np.full(trials, np.inf)
    best_idx = np.zeros(trials, dtype=np.int64)
    best_p = np.zeros(trials)
    for i in range(1, k + 1):
        L = n + i  # training size n + i - 1 plus the test point
        if i > 1:
            count = count + plus_S[:, n + i - 2]
        p = repeated_point_decisions_float(L)[count]
        vloss = p * frac_minus + (1 - p) * (1 - frac_minus)
        better = vloss < best_loss
        best_loss = np.where(better, vloss, best_loss)
        best_idx = np.where(better, i - 1, best_idx)
        best_p = np.where(better, p, best_p)
    return best_idx, best_p


def repeated_point_risk_excess(p_plus, q) -> Fraction:
    """Exact excess risk of predicting +1 w.p. ``p_plus`` when ``P(y=+1) = q``."""
    q, star = _plus_prob(q)
    p = p_plus if isinstance(p_plus, Fraction) else Fraction(float(p_plus))
    return (p - star) * (1 - 2 * q)


@dataclass(frozen=True)
class BatchedTraces:
    d_sum: np.ndarray
    risk_sum: np.ndarray
    k: int


def repeated_point_traces(q, n: int, k: int, trials: int, seed: int, chunk: int = 2000) -> BatchedTraces:
    """Sums of ``d_i`` and of the excess risks over ``trials`` independent runs."""
    qf, star = _plus_prob(q)
    margin = float(1 - 2 * qf)
    d_sum, r_sum = [], []
    for c, start in enumerate(range(0, trials, chunk)):
        size = min(chunk, trials - start)
        rng = rng_for(seed, c)
        plus = rng.random((size, n + k)) < float(qf)
        count = plus[:, :n].sum(axis=1)
        ds = np.zeros(size)
        rs = np.zeros(size)
        for i in range(1, k + 1):
            p = repeated_point_decisions_float(n + i)[count]
            y_plus = plus[:, n + i - 1]
            own = np.where(y_plus, 1 - p, p)
            ref = (y_plus != bool(star)).astype(float)
            ds += own - ref
            rs += (p - star) * margin
            count = count + y_plus
        d_sum.append(ds)
        r_sum.append(rs)
    return BatchedTraces(np.concatenate(d_sum), np.concatenate(r_sum), k)
