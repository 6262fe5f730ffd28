"""Exact expected spread and optimum by enumerating every live-edge world.

Exponential in the number of traversable edges; intended for fixtures with
at most 24 edges among alive nodes.  Shares no code with the sampling
kernels, so it can serve as their reference.
"""
from __future__ import annotations

import math
from itertools import combinations
from typing import Iterable

import numpy as np

from .graph import Graph, NodeSet

MAX_EDGES = 24
MAX_NODES = 63
_CHUNK = 1 << 18


class CapacityError(ValueError):
    pass


def _live_edges(g: Graph):
    mask = g.traversable
    src = g.edge_src[mask]
    dst = g.out_dst[mask]
    prob = g.out_prob[mask]
    if len(src) > MAX_EDGES:
        raise CapacityError(f"{len(src)} traversable edges; enumeration limited to {MAX_EDGES}")
    if g.n > MAX_NODES:
        raise CapacityError(f"n={g.n}; bitmask reachability limited to {MAX_NODES} nodes")
    return src.tolist(), dst.tolist(), prob.tolist()


def _chunks(m: int):
    total = 1 << m
    for lo in range(0, total, _CHUNK):
        yield np.arange(lo, min(lo + _CHUNK, total), dtype=np.int64)


def _world_probs(idx, prob):
    out = np.ones(len(idx))
    for e, p in enumerate(prob):
        bit = (idx >> e) & 1
        out *= np.where(bit == 1, p, 1.0 - p)
    return out


def _closure(idx, start_mask, src, dst, n):
    """Reachability bitmask per world, starting from ``start_mask``."""
    one = np.uint64(1)
    reach = np.full(len(idx), np.uint64(start_mask), dtype=np.uint64)
    live = [((idx >> e) & 1).astype(np.uint64) for e in range(len(src))]
    for _ in range(n):
        before = reach.copy()
        for e, (u, v) in enumerate(zip(src, dst)):
            reach |= ((reach >> np.uint64(u)) & live[e] & one) << np.uint64(v)
        if np.array_equal(before, reach):
            break
    return reach


def _mask(nodes) -> int:
    out = 0
    for u in nodes:
        out |= 1 << int(u)
    return out


def exact_spread(g: Graph, seeds: Iterable[int]) -> float:
    """Sum over all 2^m worlds of Pr[world] * |nodes reachable from seeds|."""
    seeds = sorted({int(s) for s in seeds})
    for s in seeds:
        if not g.is_alive(s):
            raise ValueError(f"seed {s} is not an alive node")
    src, dst, prob = _live_edges(g)
    if not seeds:
        return 0.0
    start = _mask(seeds)
    parts = []
    for idx in _chunks(len(src)):
        reach = _closure(idx, start, src, dst, g.n)
        parts.append(float(np.dot(_world_probs(idx, prob), np.bitwise_count(reach))))
    return math.fsum(parts)


def exact_opt(g: Graph, b: int) -> tuple[NodeSet, float]:
    """Best size-``b`` seed set among alive nodes; ties go to the lexicographically smallest."""
    nodes = g.alive_nodes.tolist()
    if not 1 <= b <= len(nodes):
        raise ValueError(f"b={b} outside [1, {len(nodes)}]")
    src, dst, prob = _live_edges(g)
    subsets = list(combinations(nodes, b))
    if len(subsets) > 200_000:
        raise CapacityError(f"{len(subsets)} candidate sets")
    totals = [[] for _ in subsets]
    for idx in _chunks(len(src)):
        w = _world_probs(idx, prob)
        single = {u: _closure(idx, 1 << u, src, dst, g.n) for u in nodes}
        for j, sub in enumerate(subsets):
            reach = single[sub[0]].copy()
            for u in sub[1:]:
                reach |= single[u]
            totals[j].append(float(np.dot(w, np.bitwise_count(reach))))
    values = [math.fsum(t) for t in totals]
    best = 0
    for j in range(1, len(values)):
        if values[j] > values[best] * (1 + 1e-12) + 1e-12:
            best = j
    return frozenset(subsets[best]), values[best]
