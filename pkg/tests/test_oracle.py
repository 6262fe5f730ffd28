import math
from itertools import combinations

import pytest

from adaptim.diffusion import monte_carlo_spread
from adaptim.graph import Graph, random_graph, residual_subgraph
from adaptim.oracle import CapacityError, exact_opt, exact_spread


def test_trivial_values():
    assert exact_spread(Graph.from_edges(3, [0], [1], [0.7]), {2}) == 1.0
    assert exact_spread(Graph.from_edges(2, [0], [1], [0.5]), {0}) == 1.5
    assert exact_spread(Graph.from_edges(2, [0], [1], [0.5]), set()) == 0.0


def test_directed_triangle():
    # 0 -> 1 -> 2 -> 0 at p = 0.5: 1 + 0.5 + 0.25
    g = Graph.from_edges(3, [0, 1, 2], [1, 2, 0], [0.5] * 3)
    assert exact_spread(g, {0}) == pytest.approx(1.75, abs=1e-15)
    est = monte_carlo_spread(g, {0}, sims=1_000_000, seed=1)
    # spread is 1, 2, 3 with probability 1/2, 1/4, 1/4
    sd = math.sqrt(0.5 * 0.75 ** 2 + 0.25 * 0.25 ** 2 + 0.25 * 1.25 ** 2)
    assert abs(est - 1.75) <= 3 * sd / 1000


def test_hand_computed_diamond():
    # 0->1, 0->2, 1->3, 2->3 all at p: E = 1 + 2p + Pr[3 reached], Pr = 1 - (1 - p^2)^2
    p = 0.3
    g = Graph.from_edges(4, [0, 0, 1, 2], [1, 2, 3, 3], [p] * 4)
    assert exact_spread(g, {0}) == pytest.approx(1 + 2 * p + 1 - (1 - p * p) ** 2, rel=1e-12)


def test_opt_saturation_and_star(star):
    g = random_graph(6, 10, seed=3)
    S, val = exact_opt(g, 6)
    assert S == frozenset(range(6)) and val == pytest.approx(6.0)
    S, val = exact_opt(star, 1)
    assert S == {0} and val == star.n


def test_opt_tie_break_lexicographic():
    g = Graph.from_edges(4, [], [], [])
    assert exact_opt(g, 2) == (frozenset({0, 1}), 2.0)


def test_residual_graph_excludes_dead_nodes(g8):
    r = residual_subgraph(g8, [0, 5])
    assert exact_spread(r, {1}) <= r.n_alive
    S, _ = exact_opt(r, 1)
    assert not S & {0, 5}


def test_capacity():
    g = random_graph(8, 30, seed=1)
    with pytest.raises(CapacityError):
        exact_spread(g, {0})


def test_bounds_monotone_submodular(g8):
    n = g8.n
    f = {}
    for size in range(n + 1):
        for S in combinations(range(n), size):
            f[frozenset(S)] = exact_spread(g8, S)
    for S, v in f.items():
        assert len(S) - 1e-12 <= v <= n + 1e-12
    for T, fT in f.items():
        for S in (T - {u} for u in T):
            assert f[S] <= fT + 1e-12
            for v in range(n):
                if v in T:
                    continue
                assert f[S | {v}] - f[S] >= f[T | {v}] - fT - 1e-12
    _, best1 = exact_opt(g8, 1)
    assert best1 == pytest.approx(max(f[frozenset({u})] for u in range(n)))
