import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptim.graph import (Graph, GraphFormatError, assign_wc_probabilities, load_edge_list,
                           preferential_attachment, random_graph, residual_subgraph)


def write(tmp_path, text):
    p = tmp_path / "edges.txt"
    p.write_text(text)
    return p


def test_load_simple_directed(tmp_path):
    g = load_edge_list(write(tmp_path, "0 1\n1 2\n"), directed=True)
    assert (g.n, g.m) == (3, 2)
    assert g.out_edges(0) == [(1, 0.0)]


def test_load_rejects_probability_out_of_range(tmp_path):
    with pytest.raises(GraphFormatError, match="outside"):
        load_edge_list(write(tmp_path, "0 1 1.5\n"))


def test_load_rejects_empty_and_malformed(tmp_path):
    with pytest.raises(GraphFormatError):
        load_edge_list(write(tmp_path, "# only a comment\n\n"))
    with pytest.raises(GraphFormatError, match="line 2"):
        load_edge_list(write(tmp_path, "0 1\n0 x\n"))
    with pytest.raises(GraphFormatError, match="line 1"):
        load_edge_list(write(tmp_path, "0 1 0.5 7\n"))


def test_load_header_comments_tabs_and_undirected(tmp_path):
    g = load_edge_list(write(tmp_path, "10 2\n# c\n0\t1 0.5\n3 4\n"), directed=False)
    assert g.n == 10
    assert g.m == 4
    assert sorted(g.out_edges(1)) == [(0, 0.5)]
    assert g.in_edges(3) == [(4, 0.0)]


def test_header_not_confused_with_edge(tmp_path):
    # "0 1" looks like a header (m=1 matches one remaining line) but n=0 is too small
    g = load_edge_list(write(tmp_path, "0 1\n1 2\n"))
    assert g.m == 2


def test_wc_probabilities():
    g = Graph.from_edges(6, [0, 1, 2, 3, 4], [5, 5, 5, 5, 0])
    w = assign_wc_probabilities(g)
    assert [p for _, p in w.in_edges(5)] == [0.25] * 4
    assert w.in_edges(0) == [(4, 1.0)]
    assert w.out_edges(5) == [] and w.in_edges(4) == []
    again = assign_wc_probabilities(w)
    assert again.same_structure(w)


def test_residual_examples():
    g = Graph.from_edges(3, [0, 1], [1, 2], [0.5, 0.5])
    assert residual_subgraph(g, []).same_structure(g)
    r = residual_subgraph(g, [1])
    assert r.alive_nodes.tolist() == [0, 2]
    assert not r.traversable.any()
    full = residual_subgraph(g, [0, 1, 2])
    assert full.n_alive == 0 and not full.traversable.any()
    with pytest.raises(ValueError):
        residual_subgraph(g, [3])


graphs = st.builds(lambda n, m, s: random_graph(n, m, seed=s),
                   st.integers(2, 12), st.integers(0, 40), st.integers(0, 10_000))


@settings(max_examples=60, deadline=None)
@given(graphs, st.data())
def test_graph_invariants_and_residual_algebra(g, data):
    assert g.out_degree().sum() == g.m == g.in_degree().sum()
    out = {(u, v, p) for u in range(g.n) for v, p in g.out_edges(u)}
    inn = {(u, v, p) for v in range(g.n) for u, p in g.in_edges(v)}
    assert out == inn
    assert np.all((g.out_prob >= 0) & (g.out_prob <= 1))
    A = data.draw(st.sets(st.integers(0, g.n - 1)))
    B = data.draw(st.sets(st.integers(0, g.n - 1)))
    once = residual_subgraph(g, A)
    assert residual_subgraph(once, A).same_structure(once)
    assert residual_subgraph(g, A | B).same_structure(residual_subgraph(once, B))
    assert once.epoch == residual_subgraph(g, A).epoch
    assert once.n_alive == g.n - len(A)


def test_preferential_attachment_shape():
    g = preferential_attachment(200, 3, seed=4)
    assert g.n == 200 and g.m == 2 * 3 * (200 - 3)
    assert g.in_degree().max() > 3 * np.median(g.in_degree())
