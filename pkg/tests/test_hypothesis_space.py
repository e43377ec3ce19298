from itertools import combinations
from math import log2

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oigpac.hypothesis_space import (
    HypothesisClass,
    InputError,
    dump_class,
    index_to_labeling,
    labeling_to_index,
    load_class,
    load_sample,
    random_class,
    restrict,
    shatters,
    vc_dimension,
)


def classes(max_m=4):
    return st.integers(1, max_m).flatmap(
        lambda m: st.sets(st.tuples(*[st.sampled_from((1, -1))] * m), min_size=1).map(
            lambda members: HypothesisClass(m, tuple(sorted(members)))
        )
    )


def test_restrict_examples():
    assert restrict(HypothesisClass.full(2), (0, 1)) == {(1, 1), (1, -1), (-1, 1), (-1, -1)}
    assert restrict(HypothesisClass(2, ((1, 1),)), (0, 0)) == {(1, 1)}
    H = HypothesisClass(3, ((1, -1, 1), (-1, -1, 1)))
    assert restrict(H, (1, 2)) == {(-1, 1)}


def test_shatters_examples():
    H = HypothesisClass(2, ((1, 1), (-1, -1)))
    assert shatters(H, ())
    assert not shatters(H, (0, 1))
    assert shatters(H, (0,))


def test_vc_examples():
    assert vc_dimension(HypothesisClass(3, ((1, -1, 1),))) == 0
    assert vc_dimension(HypothesisClass.full(4)) == 4
    thresholds = HypothesisClass(4, ((-1,) * 4, (1, -1, -1, -1), (1, 1, -1, -1), (1, 1, 1, -1), (1,) * 4))
    assert vc_dimension(thresholds) == 1
    assert vc_dimension(HypothesisClass.thresholds(6)) == 1


def test_index_roundtrip():
    # bit i set iff coordinate i is -1
    assert labeling_to_index((1, 1, 1)) == 0
    assert labeling_to_index((-1, 1, 1)) == 1
    assert index_to_labeling(6, 3) == (1, -1, -1)
    for v in range(16):
        assert labeling_to_index(index_to_labeling(v, 4)) == v


@given(classes(), st.lists(st.integers(0, 3), min_size=1, max_size=5))
def test_restriction_matches_projection(H, T):
    T = tuple(x % H.domain_size for x in T)
    assert restrict(H, T) == {tuple(h[x] for x in T) for h in H}
    # repeating the sample does not change which labelings appear, up to projection
    doubled = restrict(H, T + T)
    assert {u[: len(T)] for u in doubled} == restrict(H, T)


@given(classes())
def test_vc_sauer_sanity(H):
    d = vc_dimension(H)
    assert 2**d <= len(H)
    assert d <= log2(len(H))
    assert any(shatters(H, S) for S in combinations(range(H.domain_size), d))
    assert not any(shatters(H, S) for S in combinations(range(H.domain_size), d + 1))


@given(st.integers(1, 5))
def test_vc_full_and_singleton(m):
    assert vc_dimension(HypothesisClass.full(m)) == m
    assert vc_dimension(HypothesisClass(m, ((1,) * m,))) == 0


def test_class_file_roundtrip(tmp_path):
    H = random_class(np.random.default_rng(3), 4, 6)
    p = tmp_path / "h.txt"
    p.write_text(dump_class(H))
    assert load_class(p) == H
    p.write_text("# comment\n3\n+1 -1 +1\n1,0,0\n")
    assert load_class(p).members == ((1, -1, 1), (1, -1, -1))


def test_sample_file(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("0 +\n2 -1\n2 1\n")
    assert load_sample(p, 3) == ((0, 2, 2), (1, -1, 1))
    p.write_text("0\n1\n")
    assert load_sample(p, 3) == ((0, 1), None)
    p.write_text("0 +\n1\n")
    with pytest.raises(InputError):
        load_sample(p, 3)
    p.write_text("5\n")
    with pytest.raises(InputError):
        load_sample(p, 3)


def test_bad_inputs(tmp_path):
    with pytest.raises(InputError):
        load_class(tmp_path / "missing.txt")
    with pytest.raises(InputError):
        HypothesisClass(2, ((1, 0),))
    with pytest.raises(InputError):
        HypothesisClass(2, ((1, 1, 1),))
