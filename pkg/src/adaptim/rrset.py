"""Reverse-reachable set pools with an inverted node -> set index.

Sample ``j`` of a pool with key ``K`` is a pure function of
``(K, j, graph)``: its root and every edge coin come from the stream
``derive_key(K, j)``.  Pools can therefore be grown or generated in any
partition and still hold identical sets.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import _rng
from ._backend import kernels
from .graph import Graph

MAGIC = b"ADRR"
VERSION = 1


class StaleCollectionError(RuntimeError):
    """The collection was drawn on a different residual graph."""


def sample_rr_set(g: Graph, key: int, index: int = 0) -> np.ndarray:
    """One RR-set (root first) drawn with sample index ``index`` of stream ``key``."""
    if g.n_alive == 0:
        raise RuntimeError("graph has no alive nodes")
    nodes, _ = kernels.sample_rr(g.in_ptr, g.in_src, g.in_eid, g.in_prob, g.alive,
                                 g.alive_nodes, np.uint64(key), int(index), 1)
    return nodes.astype(np.int64)


@dataclass(eq=False)
class RRCollection:
    """Append-only pool.  Single writer; readers must not overlap :meth:`extend`."""

    n: int
    candidates: np.ndarray
    graph_epoch: str
    key: int
    nodes: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int32))
    offsets: np.ndarray = field(default_factory=lambda: np.zeros(1, dtype=np.int64))
    _index: tuple | None = field(default=None, repr=False)

    @classmethod
    def empty(cls, g: Graph, key: int) -> "RRCollection":
        if g.n_alive == 0:
            raise RuntimeError("graph has no alive nodes")
        return cls(n=g.n, candidates=g.alive_nodes, graph_epoch=g.epoch, key=int(key))

    @classmethod
    def from_sets(cls, sets: Iterable[Iterable[int]], n: int | None = None,
                  candidates=None) -> "RRCollection":
        """Build a collection from explicit sets (fixtures, tests)."""
        sets = [list(dict.fromkeys(int(u) for u in s)) for s in sets]
        if any(not s for s in sets):
            raise ValueError("RR-sets must be non-empty")
        if n is None:
            n = 1 + max((max(s) for s in sets), default=-1)
        if candidates is None:
            candidates = np.arange(n, dtype=np.int64)
        lengths = np.array([len(s) for s in sets], dtype=np.int64)
        offsets = np.zeros(len(sets) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        flat = np.array([u for s in sets for u in s], dtype=np.int32)
        return cls(n=n, candidates=np.asarray(candidates, dtype=np.int64),
                   graph_epoch="explicit", key=0, nodes=flat, offsets=offsets)

    @property
    def total(self) -> int:
        return len(self.offsets) - 1

    def __len__(self) -> int:
        return self.total

    def set_at(self, j: int) -> np.ndarray:
        return self.nodes[self.offsets[j]:self.offsets[j + 1]]

    @property
    def sets(self) -> list[list[int]]:
        return [self.set_at(j).tolist() for j in range(self.total)]

    def lengths(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def index(self) -> tuple[np.ndarray, np.ndarray]:
        """``(node_ptr, set_ids)``: sets containing ``u`` are ``set_ids[node_ptr[u]:node_ptr[u+1]]``."""
        if self._index is None:
            owner = np.repeat(np.arange(self.total, dtype=np.int64), self.lengths())
            order = np.argsort(self.nodes, kind="stable")
            ptr = np.zeros(self.n + 1, dtype=np.int64)
            np.cumsum(np.bincount(self.nodes, minlength=self.n), out=ptr[1:])
            self._index = (ptr, owner[order])
        return self._index

    def node_coverage(self) -> np.ndarray:
        """Number of sets containing each node."""
        return np.bincount(self.nodes, minlength=self.n).astype(np.int64)

    def extend(self, g: Graph, count: int) -> "RRCollection":
        if count < 1:
            raise ValueError("count must be positive")
        if g.epoch != self.graph_epoch:
            raise StaleCollectionError("collection was sampled on a different residual graph")
        nodes, lengths = kernels.sample_rr(g.in_ptr, g.in_src, g.in_eid, g.in_prob, g.alive,
                                           g.alive_nodes, np.uint64(self.key),
                                           self.total, int(count))
        self.nodes = np.concatenate([self.nodes, nodes])
        self.offsets = np.concatenate([self.offsets, self.offsets[-1] + np.cumsum(lengths)])
        self._index = None
        return self

    # -- debugging dump -------------------------------------------------
    _HEADER = "<HHqqQq"  # version, epoch length, n, total, key, candidate count

    def dump(self, path) -> None:
        """Write ``magic | header | epoch | candidates | offsets | nodes`` (little endian)."""
        epoch = self.graph_epoch.encode()
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack(self._HEADER, VERSION, len(epoch), self.n, self.total,
                                 self.key, len(self.candidates)))
            fh.write(epoch)
            fh.write(self.candidates.astype("<i8").tobytes())
            fh.write(self.offsets.astype("<i8").tobytes())
            fh.write(self.nodes.astype("<i4").tobytes())

    @classmethod
    def restore(cls, path) -> "RRCollection":
        data = open(path, "rb").read()
        if data[:4] != MAGIC:
            raise ValueError("not an RR-set dump")
        version, elen, n, total, key, ncand = struct.unpack_from(cls._HEADER, data, 4)
        if version != VERSION:
            raise ValueError(f"unsupported dump version {version}")
        pos = 4 + struct.calcsize(cls._HEADER)
        epoch = data[pos:pos + elen].decode()
        pos += elen
        cand = np.frombuffer(data, dtype="<i8", count=ncand, offset=pos).astype(np.int64)
        pos += 8 * ncand
        offsets = np.frombuffer(data, dtype="<i8", count=total + 1, offset=pos).astype(np.int64)
        pos += 8 * (total + 1)
        if len(data) - pos != 4 * int(offsets[-1]):
            raise ValueError("corrupt RR-set dump")
        nodes = np.frombuffer(data, dtype="<i4", offset=pos).astype(np.int32)
        return cls(n=n, candidates=cand, graph_epoch=epoch, key=key,
                   nodes=nodes, offsets=offsets)


def extend_collection(c: RRCollection, g: Graph, count: int) -> RRCollection:
    return c.extend(g, count)


def new_collection(g: Graph, key: int, count: int = 0) -> RRCollection:
    c = RRCollection.empty(g, key)
    return c.extend(g, count) if count else c


def pool_key(master_key: int, pool: int) -> int:
    return _rng.derive_key(master_key, _rng.RR_POOL, pool)


def coverage_fraction(c: RRCollection, S: Iterable[int]) -> tuple[int, float]:
    """``(Cov, F)``: number and fraction of sets meeting ``S``."""
    if c.total < 1:
        raise ValueError("empty collection")
    members = np.zeros(c.n, dtype=bool)
    S = [int(u) for u in S]
    if not S:
        return 0, 0.0
    members[S] = True
    hit = np.logical_or.reduceat(members[c.nodes], c.offsets[:-1])
    cov = int(hit.sum())
    return cov, cov / c.total
