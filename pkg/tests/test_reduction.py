from fractions import Fraction
from math import e

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oigpac._base import TransductiveClassifier, exact_proba, expected_loss, point_mass
from oigpac.hypothesis_space import HypothesisClass, InputError, vc_dimension
from oigpac.learners import ConstantClassifier, ERMClassifier
from oigpac.losses import LossFn, ZERO_ONE
from oigpac.oig_agnostic import AgnosticOIGClassifier, RepeatedPointOIGClassifier
from oigpac.oig_realizable import RealizableOIGClassifier, transductive_error
from oigpac.reduction import (
    AgnosticReduction,
    ContractError,
    RealizableReduction,
    k_agnostic,
    k_realizable,
    martingale_trace,
    pac_budget,
    prefix_fits,
    repeated_point_risk_excess,
    repeated_point_select,
    run_reduction_agnostic,
    run_reduction_realizable,
    validation_size,
)
from oigpac.sim import FiniteDistribution, best_in_class, exact_risk, planted_noise, rng_for


def test_k_agnostic_examples():
    assert k_agnostic(1, 2 / e) == 32
    assert k_agnostic(0.1, 0.05) == 11805
    assert k_agnostic(0.5, 0.5) == 178


def test_k_realizable_examples():
    assert k_realizable(1, 2 / e) == 3
    assert k_realizable(0.1, 0.05) == 111
    assert k_realizable(0.01, 0.01) == 1590


def test_validation_size_examples():
    assert validation_size(e * 0.5, 0.5, 1) == 1
    assert validation_size(100, 0.05, 0.1) == 761
    assert validation_size(32, 0.5, 0.5) == 17


def test_pac_budget_examples():
    assert pac_budget("realizable", 1, 2 / e, lambda eps: 10) == 13
    # 200 ln(100) = 921.03..., whose ceiling is 922
    assert pac_budget("agnostic", 0.2, 0.1, lambda eps: 400) == 1322
    seen = []
    pac_budget("agnostic", 0.2, 0.1, lambda eps: seen.append(eps) or 0)
    assert seen == [pytest.approx(0.05)]


def test_budget_contracts():
    with pytest.raises(InputError):
        k_agnostic(0, 0.1)
    with pytest.raises(InputError):
        k_realizable(0.1, 1.5)
    with pytest.raises(InputError):
        pac_budget("other", 0.5, 0.5, lambda eps: 1)


H4 = HypothesisClass.thresholds(4)


def test_single_candidate():
    X, y = np.array([0, 1, 2]), np.array([1, 1, -1])
    sel = run_reduction_agnostic(ERMClassifier(H4), X, y, [3], [-1], n=2)
    assert sel.index == 0
    assert sel.predictor.hypothesis_ == ERMClassifier(H4).fit(X[:2], y[:2]).hypothesis_
    ens = run_reduction_realizable(ERMClassifier(H4), X, y, n=2)
    assert ens.predict(range(4)).tolist() == ERMClassifier(H4).fit(X[:2], y[:2]).predict(range(4)).tolist()


def test_constant_learner_selected_unchanged():
    X, y = np.arange(4), np.array([1, -1, -1, 1])
    sel = run_reduction_agnostic(ConstantClassifier(-1), X, y, [0, 1], [1, 1], n=1)
    assert sel.predictor.predict(range(4)).tolist() == [-1] * 4
    ens = run_reduction_realizable(ConstantClassifier(-1), X, y, n=1)
    assert ens.predict(range(4)).tolist() == [-1] * 4


def test_selection_is_a_minimizer():
    H = HypothesisClass.full(3)
    D = planted_noise((1, -1, 1), Fraction(1, 4))
    for t in range(20):
        rng = rng_for(5, t)
        X, y = D.sample(8, rng)
        Xv, yv = D.sample(9, rng)
        sel = run_reduction_agnostic(AgnosticOIGClassifier(H), X, y, Xv, yv, n=3)
        assert sel.validation_losses[sel.index] == min(sel.validation_losses)
        assert sel.index == sel.validation_losses.index(min(sel.validation_losses))


def test_erm_selection_monte_carlo():
    # ERM on a 2-point domain: the selected predictor rarely has excess above 3 eps
    H = HypothesisClass.full(2)
    D = planted_noise((1, -1), Fraction(1, 5))
    best, _ = best_in_class(D, H)
    eps, delta, n, k = 0.1, 0.1, 20, 10
    k_val = validation_size(k, delta, eps)
    failures = 0
    for t in range(1000):
        rng = rng_for(8, t)
        X, y = D.sample(n + k, rng)
        Xv, yv = D.sample(k_val, rng)
        sel = run_reduction_agnostic(ERMClassifier(H), X, y, Xv, yv, n)
        failures += exact_risk(sel.predictor, D) - best > 3 * Fraction(eps)
    assert failures / 1000 <= delta


class Spy(TransductiveClassifier):
    log: list = []

    def _fit(self, X, y):
        Spy.log.append((X.tolist(), y.tolist()))

    def predict_exact_proba(self, X):
        return [point_mass(1) for _ in X]


def test_prefix_discipline():
    Spy.log = []
    X, y = np.arange(7) % 3, np.array([1, -1, 1, 1, -1, -1, 1])
    fits = prefix_fits(Spy(), X, y, n=3, k=4)
    assert len(fits) == 4
    for i, (seen_X, seen_y) in enumerate(Spy.log, start=1):
        assert seen_X == X[: 3 + i - 1].tolist() and seen_y == y[: 3 + i - 1].tolist()
        # the fresh example (x_{n+i}, y_{n+i}) is never in the prefix
        assert len(seen_X) == 3 + i - 1


def test_median_guarantee_pointwise():
    H = HypothesisClass.full(3)
    D = planted_noise((1, 1, -1), Fraction(1, 3))
    for t in range(30):
        X, y = D.sample(9, rng_for(3, t))
        ens = run_reduction_realizable(ERMClassifier(H), X, y, n=4)
        P = ens.member_predictions(np.arange(3))
        med = ens.predict(np.arange(3))
        for x in range(3):
            for truth in (1, -1):
                avg = sum(ZERO_ONE(int(p), truth) for p in P[:, x]) / Fraction(P.shape[0])
                assert ZERO_ONE(int(med[x]), truth) <= 2 * avg
    with pytest.raises(ContractError):
        bad = LossFn((1, -1), ((0, 1), (0, 0)))
        run_reduction_realizable(ERMClassifier(H), [0, 1], [1, 1], 1, bad)


def test_estimator_wrappers():
    D = planted_noise(H4.members[2], 0)
    X, y = D.sample(9, rng_for(1))
    est = AgnosticReduction(ERMClassifier(H4), n=3, k=3, k_val=3).fit(X, y)
    assert est.predict(range(4)).shape == (4,)
    assert est.get_params()["k_val"] == 3
    est = RealizableReduction(RealizableOIGClassifier(H4), n=3, k=3).fit(X[:6], y[:6])
    assert est.score(np.arange(4), np.array(H4.members[2])) >= 0.5
    with pytest.raises(InputError):
        AgnosticReduction(ERMClassifier(H4), n=3, k=3, k_val=3).fit(X[:5], y[:5])


def test_martingale_trace_examples():
    plus = HypothesisClass(2, ((1, 1), (-1, -1)))
    D = FiniteDistribution({(0, 1): Fraction(1, 2), (1, 1): Fraction(1, 2)})
    tr = martingale_trace(ConstantClassifier(1), D, plus, n=2, k=5, seed=0)
    assert all(d == 0 for d in tr.d)
    D = planted_noise((1, -1), Fraction(1, 3))
    tr = martingale_trace(ERMClassifier(HypothesisClass.full(2)), D, HypothesisClass.full(2), 3, 8, seed=2,
                          epsilon=Fraction(1, 10))
    assert tr.M_partial_sums[-1] == sum(tr.agnostic_risks) - sum(tr.d)
    assert tr.B_partial_sums[0] == sum(tr.d) - tr.k * Fraction(1, 10)


def test_forward_step_expectation_is_excess_risk():
    H = HypothesisClass.full(3)
    D = planted_noise((1, -1, 1), Fraction(1, 4), [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)])
    best, h_star = best_in_class(D, H)
    X, y = D.sample(6, rng_for(12))
    for h in prefix_fits(AgnosticOIGClassifier(H), X, y, n=2, k=4):
        dists = exact_proba(h, np.arange(3))
        expected_d = sum(
            (p * (expected_loss(dists[x], lab) - expected_loss(point_mass(h_star[x]), lab)) for (x, lab), p in D.probs.items()),
            Fraction(0),
        )
        assert expected_d == exact_risk(h, D) - best


@given(st.lists(st.tuples(st.integers(0, 2), st.sampled_from((1, -1))), min_size=2, max_size=6))
@settings(max_examples=40, deadline=None)
def test_backward_step_bounded_by_rate(sample):
    # E[d_i | S_i]: the fresh example is a uniformly random member of S_i
    H = HypothesisClass.thresholds(3)
    D = planted_noise(H.members[1], Fraction(1, 5))
    _, h_star = best_in_class(D, H)
    X = np.array([x for x, _ in sample])
    y = np.array([lab for _, lab in sample])
    own = transductive_error(AgnosticOIGClassifier(H), X, y)
    ref = Fraction(sum(h_star[x] != lab for x, lab in sample), len(sample))
    d = vc_dimension(H)
    cond = own - ref
    assert cond <= 0 or cond * cond <= Fraction(256 * d, len(sample))


def test_batched_selection_matches_generic():
    H = HypothesisClass.full(1)
    q = Fraction(7, 10)
    n, k, k_val = 5, 6, 7
    rng = rng_for(21)
    plus_S = rng.random((25, n + k)) < float(q)
    plus_val = rng.random((25, k_val)) < float(q)
    idx, p = repeated_point_select(plus_S, plus_val, n)
    for t in range(25):
        y = np.where(plus_S[t], 1, -1)
        yv = np.where(plus_val[t], 1, -1)
        sel = run_reduction_agnostic(RepeatedPointOIGClassifier(H), np.zeros(n + k, int), y, np.zeros(k_val, int), yv, n)
        assert abs(float(sel.validation_losses[sel.index]) - float(sel.validation_losses[int(idx[t])])) < 1e-9
        assert abs(float(sel.predictor.prob_plus()) - p[t]) < 1e-9 or sel.index != idx[t]
        assert repeated_point_risk_excess(sel.predictor.prob_plus(), q) == (sel.predictor.prob_plus() - 1) * (1 - 2 * q)
