from math import log, sqrt

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oigpac.concentration import (
    azuma_additive,
    azuma_deviation,
    azuma_multiplicative,
    azuma_multiplicative_mu,
    hoeffding,
    hoeffding_deviation,
)
from oigpac.hypothesis_space import InputError


def test_azuma_examples():
    assert azuma_additive(5, 1.0, 0.0).probability_bound == 1
    assert azuma_additive(1, 2.0, sqrt(8 * log(4))).probability_bound == pytest.approx(0.25, rel=1e-12)
    assert azuma_additive(3, 1.0, 100.0).probability_bound < 1e-300


def test_multiplicative_examples():
    assert azuma_multiplicative(0.0, 1.0, 1.0).probability_bound == 1
    assert azuma_multiplicative(3 * log(2), 1.0, 1.0).probability_bound == pytest.approx(0.5, rel=1e-12)
    assert azuma_multiplicative(3 * log(2 / 0.1), 1.0, 1.0).probability_bound == pytest.approx(0.05, rel=1e-12)


def test_hoeffding_examples():
    assert hoeffding(0.0, 10).probability_bound == 1
    t = sqrt(log(1 / 0.05) / (2 * 761))
    assert hoeffding(t, 761).probability_bound == pytest.approx(0.05, rel=1e-12)
    one = hoeffding(0.1, 50).probability_bound
    assert hoeffding(0.1, 100).probability_bound == pytest.approx(one**2, rel=1e-12)


def test_bad_parameters():
    for call in (lambda: azuma_additive(0, 1, 1), lambda: hoeffding(-1, 3), lambda: azuma_multiplicative(1, 0, 1)):
        with pytest.raises(InputError):
            call()


@given(st.integers(1, 500), st.floats(0.1, 3), st.floats(0, 50), st.floats(0, 50))
def test_azuma_monotone(k, c, t1, t2):
    lo, hi = sorted((t1, t2))
    assert azuma_additive(k, c, hi).probability_bound <= azuma_additive(k, c, lo).probability_bound


@given(st.floats(0.01, 0.1), st.integers(1, 1000), st.integers(1, 1000))
def test_hoeffding_monotone_in_count(t, a, b):
    lo, hi = sorted((a, b))
    assert hoeffding(t, hi).probability_bound <= hoeffding(t, lo).probability_bound


@given(st.floats(0, 30), st.floats(0.05, 4), st.floats(0.1, 3), st.floats(0, 4), st.floats(0.1, 3))
def test_multiplicative_monotone(mu, dm, c, dm2, mu2):
    base = azuma_multiplicative(mu, dm, c).probability_bound
    assert azuma_multiplicative(mu + mu2, dm, c).probability_bound <= base
    assert azuma_multiplicative(mu, dm + dm2, c).probability_bound <= base


@given(st.floats(1e-6, 0.999))
def test_inverses_recover_probability(p):
    assert azuma_additive(40, 1.5, azuma_deviation(40, 1.5, p)).probability_bound == pytest.approx(p, rel=1e-12)
    mu = azuma_multiplicative_mu(0.7, 2.0, p)
    assert azuma_multiplicative(mu, 0.7, 2.0).probability_bound == pytest.approx(p, rel=1e-12)
    assert hoeffding(hoeffding_deviation(300, p), 300).probability_bound == pytest.approx(p, rel=1e-12)
