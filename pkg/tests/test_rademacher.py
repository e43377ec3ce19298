from fractions import Fraction
from itertools import product
from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oigpac.hypothesis_space import HypothesisClass, random_class, vc_dimension
from oigpac.oig_agnostic import agnostic_oig_from_restriction, compute_credits, phi_full
from oigpac.rademacher import (
    exact_rademacher,
    mc_rademacher,
    phi_rademacher_identity_check,
    vc_rademacher_bound,
    within_vc_bound,
)

DIAG = [(1, 1), (-1, -1)]


def _oracle(Hres):
    # direct definition: average over sign vectors of the best correlation, over n
    Hres = list(Hres)
    n = len(Hres[0])
    total = sum(max(sum(s * h for s, h in zip(sig, u)) for u in Hres) for sig in product((1, -1), repeat=n))
    return Fraction(total, n * 2**n)


def test_exact_examples():
    assert exact_rademacher([(1, -1, 1)]) == 0
    assert exact_rademacher(list(product((1, -1), repeat=3))) == 1
    assert exact_rademacher(DIAG) == Fraction(1, 2)


def test_mc_examples():
    est = mc_rademacher([(1, 1, -1)], 2000, seed=1)
    assert abs(est.value) <= 3 * est.se + 1e-12
    est = mc_rademacher(list(product((1, -1), repeat=2)), 500, seed=2)
    assert est.value == 1
    est = mc_rademacher(DIAG, 10**5, seed=3)
    assert abs(est.value - 0.5) <= 3 * est.se


def test_mc_is_reproducible():
    a = mc_rademacher(DIAG, 1000, seed=9)
    b = mc_rademacher(DIAG, 1000, seed=9)
    assert a == b


def test_vc_bound_examples():
    assert vc_rademacher_bound(0, 5) == 0
    assert vc_rademacher_bound(1, 1) == 31
    assert vc_rademacher_bound(4, 100) == pytest.approx(6.2)


def test_identity_examples():
    single = phi_rademacher_identity_check(agnostic_oig_from_restriction([(1, 1, 1)]))
    assert single.equal and single.phi == 0
    full = phi_rademacher_identity_check(compute_credits(HypothesisClass.full(2), (0, 1)))
    assert full.equal and full.phi == 1
    diag = phi_rademacher_identity_check(agnostic_oig_from_restriction(DIAG))
    assert diag.equal and diag.phi == Fraction(1, 2)


@st.composite
def restrictions(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    return n, sorted(draw(st.sets(st.tuples(*[st.sampled_from((1, -1))] * n), min_size=1)))


@given(restrictions())
@settings(max_examples=80, deadline=None)
def test_exact_matches_definition_and_identity(nH):
    n, Hres = nH
    rad = exact_rademacher(Hres)
    assert rad == _oracle(Hres)
    assert phi_full(agnostic_oig_from_restriction(Hres)).value == Fraction(n, 2) * rad


@given(restrictions(), st.data())
@settings(max_examples=60, deadline=None)
def test_adding_hypotheses_never_decreases(nH, data):
    n, Hres = nH
    extra = data.draw(st.tuples(*[st.sampled_from((1, -1))] * n))
    assert exact_rademacher(Hres + [extra]) >= exact_rademacher(Hres)


@given(st.integers(1, 6), st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_within_vc_bound(m, seed):
    rng = np.random.default_rng(seed)
    H = random_class(rng, m, int(rng.integers(1, 2**m + 1)))
    T = tuple(range(m))
    rad = exact_rademacher(compute_credits(H, T).restriction_labelings())
    d = vc_dimension(H)
    assert within_vc_bound(rad, d, m)
    assert float(rad) <= 31 * sqrt(d / m) + 1e-12
