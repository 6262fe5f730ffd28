"""Pure-Python implementations of the hot kernels.

Used when the compiled extension is unavailable (or forced through
``ADAPTIM_PURE_PYTHON=1``).  Signatures and outputs match ``_kernels.pyx``
exactly; the test-suite checks both backends against each other.
"""
from collections import deque

import numpy as np

from ._rng import GOLDEN, INV_2_53, MASK64, mix64

NAME = "python"


def _sample_key(key, j):
    return mix64(mix64((key & MASK64) + GOLDEN) ^ mix64(j + GOLDEN))


def _unif(key, counter):
    return (mix64(key + (counter + 1) * GOLDEN) >> 11) * INV_2_53


def edge_bits(prob, key):
    """Materialize the live/blocked bit of every edge for one realization."""
    p = prob.tolist()
    key = int(key)
    return np.array([_unif(key, e) < p[e] for e in range(len(p))], dtype=np.uint8)


def _reach(ptr, dst, prob, alive, seeds, key, live):
    seen = set()
    order = []
    for s in seeds:
        if s not in seen:
            seen.add(s)
            order.append(s)
    queue = deque(order)
    while queue:
        u = queue.popleft()
        for e in range(ptr[u], ptr[u + 1]):
            v = dst[e]
            if v in seen or not alive[v]:
                continue
            if live is not None:
                ok = live[e]
            else:
                ok = _unif(key, e) < prob[e]
            if ok:
                seen.add(v)
                order.append(v)
                queue.append(v)
    return order


def forward_reach(out_ptr, out_dst, out_prob, alive, seeds, key, live):
    """BFS over live edges among alive nodes; returns nodes in visit order.

    ``live`` is a per-edge uint8 mask, or an empty array to derive edge
    status lazily from ``key``.
    """
    order = _reach(
        out_ptr.tolist(), out_dst.tolist(), out_prob.tolist(), alive.tolist(),
        [int(s) for s in seeds], int(key),
        live.tolist() if len(live) else None,
    )
    return np.array(order, dtype=np.int64)


def spread_counts(out_ptr, out_dst, out_prob, alive, seeds, keys):
    ptr, dst, prob, al = out_ptr.tolist(), out_dst.tolist(), out_prob.tolist(), alive.tolist()
    seeds = [int(s) for s in seeds]
    return np.array(
        [len(_reach(ptr, dst, prob, al, seeds, int(k), None)) for k in keys],
        dtype=np.int64,
    )


def sample_rr(in_ptr, in_src, in_eid, in_prob, alive, candidates, key, start, count):
    """Draw ``count`` RR-sets with global sample indices ``start, start+1, ...``.

    Returns the flattened member lists and the length of each set.
    """
    ptr, src, eid, prob = in_ptr.tolist(), in_src.tolist(), in_eid.tolist(), in_prob.tolist()
    al = alive.tolist()
    cand = candidates.tolist()
    nc = len(cand)
    key = int(key)
    nodes = []
    lengths = []
    for j in range(start, start + count):
        sk = _sample_key(key, j)
        r = int(_unif(sk, 0) * nc)
        if r >= nc:
            r = nc - 1
        root = cand[r]
        members = [root]
        seen = {root}
        head = 0
        while head < len(members):
            v = members[head]
            head += 1
            for i in range(ptr[v], ptr[v + 1]):
                u = src[i]
                if u in seen or not al[u]:
                    continue
                if _unif(sk, eid[i] + 1) < prob[i]:
                    seen.add(u)
                    members.append(u)
        nodes.extend(members)
        lengths.append(len(members))
    return np.array(nodes, dtype=np.int32), np.array(lengths, dtype=np.int64)


def cover_pick(set_ptr, set_nodes, node_ptr, node_sets, covered, gains, u):
    """Mark every uncovered set containing ``u`` as covered.

    Decrements ``gains`` for all members of the newly covered sets, in
    place, and returns how many sets became covered.
    """
    newly = 0
    for i in range(node_ptr[u], node_ptr[u + 1]):
        s = node_sets[i]
        if covered[s]:
            continue
        covered[s] = 1
        newly += 1
        for w in set_nodes[set_ptr[s]:set_ptr[s + 1]].tolist():
            gains[w] -= 1
    return newly
