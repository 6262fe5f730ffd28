"""Greedy maximum coverage over an RR-set pool, with an upper bound on the optimum.

Marginal gains are kept exact: picking ``u`` walks the sets that ``u``
newly covers and decrements the gain of each member, so one greedy run
costs O(total pool size) plus O(n) per step.  All bounds are tracked as
integer counts, which makes the sandwich checks exact.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ._backend import kernels
from .rrset import RRCollection


@dataclass(frozen=True)
class CoverResult:
    seeds: tuple[int, ...]  # in pick order
    coverage: int           # Cov(seeds)
    upper: int              # integer numerator of F^u
    total: int

    @property
    def seed_set(self) -> frozenset:
        return frozenset(self.seeds)

    @property
    def f(self) -> float:
        return self.coverage / self.total

    @property
    def f_upper(self) -> float:
        return self.upper / self.total


def _top_sum(values: np.ndarray, b: int) -> int:
    if len(values) <= b:
        return int(values.sum())
    return int(np.partition(values, len(values) - b)[len(values) - b:].sum())


def _gains_given(c: RRCollection, S) -> tuple[int, np.ndarray, np.ndarray]:
    members = np.zeros(c.n, dtype=bool)
    members[list(S)] = True
    hit = np.logical_or.reduceat(members[c.nodes], c.offsets[:-1]) if c.total else np.zeros(0, bool)
    open_nodes = c.nodes[np.repeat(~hit, c.lengths())]
    gains = np.bincount(open_nodes, minlength=c.n).astype(np.int64)
    avail = np.zeros(c.n, dtype=bool)
    avail[c.candidates] = True
    avail[members] = False
    return int(hit.sum()), gains, avail


def upper_bound_count(c: RRCollection, S: Iterable[int], b: int) -> int:
    """Cov(S) plus the ``b`` largest marginal coverage gains with respect to ``S``."""
    S = [int(u) for u in S]
    if len(set(S)) > b:
        raise ValueError("|S| must not exceed b")
    cov, gains, avail = _gains_given(c, S)
    return cov + _top_sum(gains[avail], b)


def upper_bound_given_set(c: RRCollection, S: Iterable[int], b: int) -> float:
    return upper_bound_count(c, S, b) / c.total


def max_cover(c: RRCollection, b: int) -> CoverResult:
    """Pick ``b`` nodes greedily by marginal coverage (ties to the smallest id).

    The upper bound is the minimum of :func:`upper_bound_count` over the
    empty set and every greedy prefix.
    """
    if b < 1:
        raise ValueError("b must be >= 1")
    if c.total < 1:
        raise ValueError("empty collection")
    if b > len(c.candidates):
        raise ValueError(f"b={b} exceeds the {len(c.candidates)} alive nodes")

    node_ptr, node_sets = c.index
    gains = c.node_coverage()
    avail = np.zeros(c.n, dtype=bool)
    avail[c.candidates] = True
    covered = np.zeros(c.total, dtype=np.uint8)
    cov = 0
    upper = _top_sum(gains[avail], b)
    picks = []
    for _ in range(b):
        u = int(np.argmax(np.where(avail, gains, -1)))
        picks.append(u)
        avail[u] = False
        cov += int(kernels.cover_pick(c.offsets, c.nodes, node_ptr, node_sets,
                                      covered, gains, u))
        upper = min(upper, cov + _top_sum(gains[avail], b))
    return CoverResult(tuple(picks), cov, upper, c.total)


def greedy_reference(c: RRCollection, b: int) -> tuple[int, ...]:
    """Naive greedy that recounts every marginal gain from scratch."""
    picks: list[int] = []
    for _ in range(b):
        cov, gains, avail = _gains_given(c, picks)
        picks.append(int(np.argmax(np.where(avail, gains, -1))))
    return tuple(picks)
