"""Small named graphs used by the test-suite and ``adaptim verify``."""
from __future__ import annotations

import numpy as np

from .diffusion import Realization
from .graph import Graph, assign_wc_probabilities, preferential_attachment, random_graph

# Six-node walkthrough network, nodes v1..v6 -> 0..5.  The edge list is a
# reconstruction consistent with the walkthrough: v1 reaches v2, v4 and
# (through v4) v5; v1->v3 and v4->v6 fail; seeding v3 afterwards reaches v6.
WALKTHROUGH_EDGES = [(0, 1), (0, 2), (0, 3), (3, 4), (3, 5), (2, 5)]
WALKTHROUGH_LIVE = [1, 0, 1, 1, 0, 1]


def walkthrough_graph(p: float = 0.5) -> Graph:
    src, dst = zip(*WALKTHROUGH_EDGES)
    return Graph.from_edges(6, src, dst, [p] * len(src))


def walkthrough_realization(g: Graph) -> Realization:
    """The world in which the walkthrough's feedback is observed."""
    bits = np.zeros(g.m, dtype=np.uint8)
    for (u, v), live in zip(WALKTHROUGH_EDGES, WALKTHROUGH_LIVE):
        lo, hi = g.out_ptr[u], g.out_ptr[u + 1]
        e = lo + g.out_dst[lo:hi].tolist().index(v)
        bits[e] = live
    return Realization.from_bits(bits)


def oracle_graph(seed: int = 8) -> Graph:
    """Fixed 8-node, 12-edge graph with mixed probabilities."""
    return random_graph(8, 12, seed=seed, p_range=(0.1, 0.9))


def dominating_star(leaves: int = 7) -> Graph:
    """Node 0 reaches every leaf with probability 1; leaves have no edges."""
    return Graph.from_edges(leaves + 1, [0] * leaves, list(range(1, leaves + 1)), [1.0] * leaves)


def synthetic_wc(n: int = 1000, edges_per_node: int = 3, seed: int = 1) -> Graph:
    """Preferential-attachment graph with weighted-cascade probabilities."""
    return assign_wc_probabilities(preferential_attachment(n, edges_per_node, seed))


def write_edge_list(g: Graph, path, with_prob: bool = True) -> None:
    with open(path, "w") as fh:
        for u, v, p in zip(g.edge_src.tolist(), g.out_dst.tolist(), g.out_prob.tolist()):
            fh.write(f"{u} {v} {p!r}\n" if with_prob else f"{u} {v}\n")
