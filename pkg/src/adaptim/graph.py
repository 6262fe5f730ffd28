"""Directed graphs with IC edge probabilities, stored as CSR arrays.

Edge ids are positions in the out-edge CSR order (sorted by source, stable
with respect to input order).  Residual graphs share every array with the
graph they came from and differ only in the ``alive`` mask.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

NodeSet = frozenset


class GraphFormatError(ValueError):
    """Malformed edge-list input."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    m: int
    out_ptr: np.ndarray
    out_dst: np.ndarray
    out_prob: np.ndarray
    in_ptr: np.ndarray
    in_src: np.ndarray
    in_eid: np.ndarray
    in_prob: np.ndarray
    alive: np.ndarray

    @classmethod
    def from_edges(cls, n: int, src, dst, prob=None) -> "Graph":
        src = np.asarray(src, dtype=np.int64).reshape(-1)
        dst = np.asarray(dst, dtype=np.int64).reshape(-1)
        if prob is None:
            prob = np.zeros(len(src))
        prob = np.asarray(prob, dtype=np.float64).reshape(-1)
        if not (len(src) == len(dst) == len(prob)):
            raise ValueError("src, dst and prob must have equal length")
        if len(src) and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ValueError(f"node id out of range [0, {n})")
        if np.any(~((prob >= 0.0) & (prob <= 1.0))):
            raise ValueError("edge probabilities must lie in [0, 1]")

        order = np.argsort(src, kind="stable")
        out_dst, out_prob, out_src = dst[order], prob[order], src[order]
        out_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(out_src, minlength=n), out=out_ptr[1:])

        eid = np.arange(len(src), dtype=np.int64)
        rev = np.argsort(out_dst, kind="stable")
        in_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(out_dst, minlength=n), out=in_ptr[1:])
        return cls(
            n=int(n), m=len(src),
            out_ptr=_frozen(out_ptr),
            out_dst=_frozen(np.ascontiguousarray(out_dst)),
            out_prob=_frozen(np.ascontiguousarray(out_prob)),
            in_ptr=_frozen(in_ptr),
            in_src=_frozen(np.ascontiguousarray(out_src[rev])),
            in_eid=_frozen(eid[rev]),
            in_prob=_frozen(np.ascontiguousarray(out_prob[rev])),
            alive=_frozen(np.ones(n, dtype=np.uint8)),
        )

    # -- views ---------------------------------------------------------
    @property
    def node_count(self) -> int:
        return self.n

    @property
    def edge_count(self) -> int:
        return self.m

    @cached_property
    def edge_src(self) -> np.ndarray:
        return _frozen(np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.out_ptr)))

    @cached_property
    def alive_nodes(self) -> np.ndarray:
        return _frozen(np.flatnonzero(self.alive).astype(np.int64))

    @property
    def n_alive(self) -> int:
        return len(self.alive_nodes)

    @cached_property
    def epoch(self) -> str:
        """Identifies the residual graph; equal masks give equal epochs."""
        h = hashlib.blake2b(digest_size=16)
        h.update(np.array([self.n, self.m], dtype=np.int64).tobytes())
        h.update(self.out_dst.tobytes())
        h.update(self.out_prob.tobytes())
        h.update(self.alive.tobytes())
        return h.hexdigest()

    @cached_property
    def traversable(self) -> np.ndarray:
        """Boolean mask over edge ids: both endpoints alive."""
        a = self.alive.astype(bool)
        return _frozen(a[self.edge_src] & a[self.out_dst])

    def out_edges(self, u: int) -> list[tuple[int, float]]:
        lo, hi = self.out_ptr[u], self.out_ptr[u + 1]
        return list(zip(self.out_dst[lo:hi].tolist(), self.out_prob[lo:hi].tolist()))

    def in_edges(self, v: int) -> list[tuple[int, float]]:
        lo, hi = self.in_ptr[v], self.in_ptr[v + 1]
        return list(zip(self.in_src[lo:hi].tolist(), self.in_prob[lo:hi].tolist()))

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_ptr)

    def in_degree(self) -> np.ndarray:
        return np.diff(self.in_ptr)

    def is_alive(self, u: int) -> bool:
        return 0 <= u < self.n and bool(self.alive[u])

    def same_structure(self, other: "Graph") -> bool:
        return (
            self.n == other.n and self.m == other.m
            and np.array_equal(self.out_ptr, other.out_ptr)
            and np.array_equal(self.out_dst, other.out_dst)
            and np.array_equal(self.out_prob, other.out_prob)
            and np.array_equal(self.alive, other.alive)
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, alive={self.n_alive})"


def load_edge_list(path, directed: bool = True) -> Graph:
    """Read a whitespace-separated edge list.

    Data lines are ``u v`` or ``u v p``; ``#`` starts a comment line.  An
    optional first line ``n m`` is recognised when its ``m`` matches the
    number of remaining data lines and ``n`` exceeds every node id.  Edges
    without ``p`` get probability 0.  Undirected input is doubled into two
    arcs.
    """
    rows = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = re.split(r"[ \t]+", line)
        if len(parts) not in (2, 3):
            raise GraphFormatError(f"line {lineno}: expected 'u v' or 'u v p', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
            p = float(parts[2]) if len(parts) == 3 else None
        except ValueError:
            raise GraphFormatError(f"line {lineno}: cannot parse {raw!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative node id")
        rows.append((lineno, u, v, p))
    if not rows:
        raise GraphFormatError(f"{path}: no edges")

    declared_n = None
    head = rows[0]
    if head[3] is None and len(rows) > 1:
        body = rows[1:]
        max_id = max(max(u, v) for _, u, v, _ in body)
        if head[2] == len(body) and head[1] > max_id:
            declared_n = head[1]
            rows = body

    for lineno, _, _, p in rows:
        if p is not None and not 0.0 <= p <= 1.0:
            raise GraphFormatError(f"line {lineno}: probability {p} outside [0, 1]")
    src = np.array([r[1] for r in rows], dtype=np.int64)
    dst = np.array([r[2] for r in rows], dtype=np.int64)
    prob = np.array([0.0 if r[3] is None else r[3] for r in rows])
    n = declared_n if declared_n is not None else int(max(src.max(), dst.max())) + 1
    if not directed:
        src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
        prob = np.concatenate([prob, prob])
    return Graph.from_edges(n, src, dst, prob)


def assign_wc_probabilities(g: Graph) -> Graph:
    """Weighted cascade: every edge into ``v`` gets probability 1/in-degree(v)."""
    indeg = g.in_degree()
    prob = 1.0 / np.maximum(indeg[g.out_dst], 1)
    return replace(Graph.from_edges(g.n, g.edge_src, g.out_dst, prob), alive=g.alive)


def residual_subgraph(g: Graph, activated: Iterable[int]) -> Graph:
    """Mask out ``activated`` nodes; ids stay stable and arrays are shared."""
    idx = np.fromiter((int(u) for u in activated), dtype=np.int64)
    if len(idx) and (idx.min() < 0 or idx.max() >= g.n):
        raise ValueError(f"activated node out of range [0, {g.n})")
    if len(idx) == 0:
        return g
    alive = g.alive.copy()
    alive[idx] = 0
    return replace(g, alive=_frozen(alive))


def preferential_attachment(n: int, edges_per_node: int, seed: int = 0) -> Graph:
    """Undirected Barabasi-Albert style graph, returned as doubled arcs.

    Probabilities are left at 0; call :func:`assign_wc_probabilities`.
    """
    rng = np.random.default_rng(seed)
    k = edges_per_node
    if n <= k:
        raise ValueError("need n > edges_per_node")
    src, dst = [], []
    pool = list(range(k))  # endpoint multiset, degree-weighted after warm-up
    for v in range(k, n):
        targets = set()
        while len(targets) < k:
            targets.add(pool[rng.integers(len(pool))])
        for t in sorted(targets):
            src.append(v)
            dst.append(t)
            pool.extend((v, t))
    src, dst = np.array(src), np.array(dst)
    return Graph.from_edges(n, np.concatenate([src, dst]), np.concatenate([dst, src]))


def random_graph(n: int, m: int, seed: int = 0, p_range=(0.05, 0.95)) -> Graph:
    """Small random digraph without self-loops, used for oracle fixtures."""
    rng = np.random.default_rng(seed)
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    pick = rng.choice(len(pairs), size=min(m, len(pairs)), replace=False)
    src = [pairs[i][0] for i in pick]
    dst = [pairs[i][1] for i in pick]
    prob = np.round(rng.uniform(*p_range, size=len(src)), 3)
    return Graph.from_edges(n, src, dst, prob)
