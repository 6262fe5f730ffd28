"""Realizations, forward propagation, full-adoption feedback and Monte Carlo spread."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

from . import _rng
from ._backend import kernels
from .graph import Graph, NodeSet

_NO_BITS = np.empty(0, dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class Realization:
    """One live-edge world.

    Edge ``e`` is live iff ``uniform(key, e) < p(e)``; bits are only
    materialized when :attr:`live` is read.  Explicit worlds (hand-built
    fixtures) carry their bits directly.
    """

    master_seed: int
    prob: np.ndarray = field(repr=False)
    bits: np.ndarray | None = field(default=None, repr=False)

    @property
    def key(self) -> int:
        return _rng.derive_key(self.master_seed, _rng.REALIZATION)

    @property
    def edge_count(self) -> int:
        return len(self.prob)

    @cached_property
    def live(self) -> np.ndarray:
        if self.bits is not None:
            return self.bits
        out = kernels.edge_bits(self.prob, np.uint64(self.key))
        out.setflags(write=False)
        return out

    def is_live(self, e: int) -> bool:
        if self.bits is not None:
            return bool(self.bits[e])
        return _rng.uniform(self.key, e) < self.prob[e]

    @classmethod
    def from_bits(cls, bits, master_seed: int = 0) -> "Realization":
        bits = np.asarray(bits, dtype=np.uint8).copy()
        bits.setflags(write=False)
        return cls(master_seed, prob=bits.astype(np.float64), bits=bits)

    def _kernel_bits(self) -> np.ndarray:
        return self.bits if self.bits is not None else _NO_BITS


@dataclass(frozen=True)
class Feedback:
    activated: NodeSet
    revealed_edges: list  # (edge id, live) for every out-edge of every activated node


def sample_realization(g: Graph, seed: int) -> Realization:
    return Realization(int(seed) & _rng.MASK64, prob=g.out_prob)


def _seed_array(g: Graph, seeds: Iterable[int]) -> np.ndarray:
    arr = np.array(sorted({int(s) for s in seeds}), dtype=np.int64)
    for s in arr.tolist():
        if not g.is_alive(s):
            raise ValueError(f"seed {s} is not an alive node")
    return arr


def propagate(g: Graph, phi: Realization, seeds: Iterable[int]) -> NodeSet:
    """Alive nodes reachable from ``seeds`` over live edges among alive nodes."""
    if phi.edge_count != g.m:
        raise ValueError("realization does not belong to this graph")
    arr = _seed_array(g, seeds)
    if len(arr) == 0:
        return frozenset()
    reached = kernels.forward_reach(
        g.out_ptr, g.out_dst, g.out_prob, g.alive, arr,
        np.uint64(phi.key), phi._kernel_bits(),
    )
    return frozenset(reached.tolist())


def observe_feedback(g: Graph, phi: Realization, seeds: Iterable[int]) -> Feedback:
    activated = propagate(g, phi, seeds)
    revealed = []
    for u in sorted(activated):
        for e in range(int(g.out_ptr[u]), int(g.out_ptr[u + 1])):
            revealed.append((e, phi.is_live(e)))
    return Feedback(activated, revealed)


def _sim_keys(seed: int, lo: int, hi: int) -> np.ndarray:
    masters = _rng.derive_keys(seed, _rng.SIMULATION, last=np.arange(lo, hi, dtype=np.uint64))
    tag = np.uint64(_rng.mix64(_rng.REALIZATION + _rng.GOLDEN))
    with np.errstate(over="ignore"):
        return _rng.mix64_array(_rng.mix64_array(masters + np.uint64(_rng.GOLDEN)) ^ tag)


def monte_carlo_spread(g: Graph, seeds: Iterable[int], sims: int, seed: int = 0,
                       workers: int = 1) -> float:
    """Mean spread of ``seeds`` over ``sims`` realizations.

    Simulation ``i`` uses the realization with master seed
    ``derive_key(seed, SIMULATION, i)``, so the result does not depend on
    how the range is split across ``workers``.
    """
    if sims < 1:
        raise ValueError("sims must be >= 1")
    arr = _seed_array(g, seeds)
    if len(arr) == 0:
        return 0.0

    def chunk(bounds):
        lo, hi = bounds
        counts = kernels.spread_counts(g.out_ptr, g.out_dst, g.out_prob, g.alive,
                                       arr, _sim_keys(seed, lo, hi))
        return int(counts.sum())

    step = -(-sims // max(1, workers))
    bounds = [(lo, min(lo + step, sims)) for lo in range(0, sims, step)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            total = sum(ex.map(chunk, bounds))
    else:
        total = sum(map(chunk, bounds))
    return total / sims
