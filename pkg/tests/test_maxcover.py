from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptim.maxcover import greedy_reference, max_cover, upper_bound_count, upper_bound_given_set
from adaptim.rrset import RRCollection

FIXTURE = [[1], [1, 2], [3]]


def best_cov(c, b):
    return max(sum(1 for s in c.sets if set(s) & set(S))
               for S in combinations(c.candidates.tolist(), b))


def test_upper_bound_examples():
    c = RRCollection.from_sets(FIXTURE)
    assert upper_bound_given_set(c, set(), 1) == 2 / 3
    assert upper_bound_given_set(c, set(), 2) == 1.0   # gains 2 (node 1) + 1 (node 2 or 3)
    hub = RRCollection.from_sets([[0, 1], [0], [0, 2]])
    assert upper_bound_given_set(hub, set(), 1) == 1.0
    with pytest.raises(ValueError):
        upper_bound_given_set(c, {1, 2}, 1)


def test_max_cover_fixture():
    c = RRCollection.from_sets(FIXTURE)
    r1 = max_cover(c, 1)
    assert r1.seeds == (1,) and r1.coverage == 2
    r2 = max_cover(c, 2)
    assert r2.seed_set == {1, 3} and r2.coverage == 3
    assert r2.f_upper >= 1.0
    assert r2.f >= 0.75 * r2.f_upper


def test_identical_sets():
    r = max_cover(RRCollection.from_sets([[5], [5], [5]]), 1)
    assert r.seeds == (5,) and r.f_upper == 1.0


def test_zero_gain_fill_and_limits():
    c = RRCollection.from_sets([[4], [4]], n=6)
    assert max_cover(c, 3).seeds == (4, 0, 1)
    with pytest.raises(ValueError):
        max_cover(c, 7)
    restricted = RRCollection.from_sets([[4]], n=6, candidates=[2, 4])
    assert max_cover(restricted, 2).seeds == (4, 2)


collections = st.lists(st.lists(st.integers(0, 15), min_size=1, max_size=6, unique=True),
                       min_size=1, max_size=64)


@settings(max_examples=150, deadline=None)
@given(collections, st.integers(1, 4))
def test_sandwich_exact(sets, b):
    c = RRCollection.from_sets(sets, n=16)
    res = max_cover(c, b)
    num, den = b**b - (b - 1) ** b, b**b
    assert res.coverage * den >= num * res.upper
    assert res.upper >= best_cov(c, b)
    assert res.seeds == greedy_reference(c, b)
    assert res.upper <= upper_bound_count(c, [], b)
    for j in range(b + 1):
        assert res.upper <= upper_bound_count(c, res.seeds[:j], b)
