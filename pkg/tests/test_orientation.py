from itertools import combinations

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from oigpac.orientation import brute_force_min_max_excess, min_max_excess_orientation


@st.composite
def graphs(draw):
    v = draw(st.integers(1, 6))
    pairs = list(combinations(range(v), 2))
    edges = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=min(len(pairs), 9))) if pairs else []
    credits = draw(st.lists(st.integers(0, 2), min_size=v, max_size=v))
    return v, np.array(edges, dtype=np.int64).reshape(-1, 2), np.array(credits)


def test_square_is_a_cycle():
    edges = np.array([[0, 1], [0, 2], [1, 3], [2, 3]])
    orient, t = min_max_excess_orientation(4, edges)
    assert t == 1
    assert orient.outdegree().tolist() == [1, 1, 1, 1]


def test_edgeless():
    orient, t = min_max_excess_orientation(3, np.empty((0, 2), dtype=np.int64))
    assert t == 0 and orient.achieved_max_outdegree == 0


def test_credits_shift_the_load():
    # a star: the center has enough credit to absorb every tail
    edges = np.array([[0, 1], [0, 2], [0, 3]])
    orient, t = min_max_excess_orientation(4, edges, np.array([3, 0, 0, 0]))
    assert t == 0
    assert orient.outdegree()[0] == 3


@given(graphs())
@settings(max_examples=150, deadline=None)
def test_flow_matches_brute_force(g):
    v, edges, credits = g
    orient, t = min_max_excess_orientation(v, edges, credits)
    assert orient.max_excess == t
    assert t == brute_force_min_max_excess(v, edges, credits)
    assert orient.outdegree().sum() == len(edges)
    for (a, b), h in zip(edges.tolist(), orient.head.tolist()):
        assert h in (a, b)
