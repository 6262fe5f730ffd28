"""AdaptGreedy: select seeds in batches, observe each cascade, drop activated nodes."""
from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import epic
from .diffusion import Realization, observe_feedback
from .epic import SelectionDiagnostics, rho  # noqa: F401  (re-export)
from .graph import Graph, residual_subgraph

MODES = ("expected", "worst_case", "naive", "fixed")
TRACE_HEADER = ["run_id", "batch", "n_i", "r1_final", "seeds", "activated_count",
                "cumulative_spread", "wall_time_ms"]

Selector = Callable[[Graph, int, float, int], tuple]


class ConfigurationError(ValueError):
    pass


def worst_case_calibrate(eps: Sequence[float], r: int, delta: float) -> list[float]:
    """Shift every batch error down by ``sqrt(ln(1/delta) / (2r))``.

    The shifted values stay positive only when ``r > ln(1/delta) / (2 eps_i^2)``
    for every batch; otherwise no worst-case instantiation exists.
    """
    if not 0.0 < delta <= 1.0:
        raise ConfigurationError(f"delta must lie in (0, 1], got {delta}")
    if r < 1:
        raise ConfigurationError("r must be >= 1")
    log_term = math.log(1.0 / delta)
    for e in eps:
        if not r > log_term / (2.0 * e * e):
            raise ConfigurationError(
                f"eps={e} needs more batches: r={r} must exceed ln(1/delta)/(2 eps^2)"
                f" = {log_term / (2.0 * e * e):.6g}")
    shift = math.sqrt(log_term / (2.0 * r))
    out = [e - shift for e in eps]
    if any(v <= 0.0 for v in out):  # rounding at the boundary
        raise ConfigurationError("calibrated eps is not positive")
    return out


@dataclass(frozen=True)
class PolicyConfig:
    k: int
    r: int
    eps: tuple[float, ...] | float = 0.5
    mode: str = "expected"
    delta: float | None = None
    pool_size: int = epic.DEFAULT_POOL_SIZE
    master_seed: int = 0

    def __post_init__(self):
        if self.k < 1 or self.r < 1 or self.k % self.r:
            raise ConfigurationError(f"r={self.r} must divide k={self.k}")
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown mode {self.mode!r}")
        eps = self.eps
        eps = (float(eps),) * self.r if isinstance(eps, (int, float)) else tuple(map(float, eps))
        if len(eps) != self.r:
            raise ConfigurationError(f"need {self.r} eps values, got {len(eps)}")
        if any(not 0.0 < e < 1.0 for e in eps):
            raise ConfigurationError("every eps must lie in (0, 1)")
        object.__setattr__(self, "eps", eps)
        if self.mode == "worst_case":
            if self.delta is None:
                raise ConfigurationError("worst_case mode needs delta")
            worst_case_calibrate(eps, self.r, self.delta)
        if self.mode == "fixed" and self.pool_size < 1:
            raise ConfigurationError("pool_size must be >= 1")

    @property
    def b(self) -> int:
        return self.k // self.r

    def batch_eps(self) -> list[float]:
        if self.mode == "worst_case":
            return worst_case_calibrate(self.eps, self.r, self.delta)
        return list(self.eps)


@dataclass(frozen=True)
class BatchRecord:
    batch: int
    seeds: frozenset
    activated: frozenset
    n_alive: int
    diagnostics: SelectionDiagnostics | None
    wall_time_ms: float


@dataclass
class AdaptiveTrace:
    batches: list[BatchRecord] = field(default_factory=list)

    @property
    def seeds(self) -> list[frozenset]:
        return [rec.seeds for rec in self.batches]

    @property
    def activated(self) -> frozenset:
        out: set = set()
        for rec in self.batches:
            out |= rec.activated
        return frozenset(out)

    @property
    def spread(self) -> int:
        return sum(len(rec.activated) for rec in self.batches)

    @property
    def total_rr_samples(self) -> int:
        return sum(rec.diagnostics.total_samples for rec in self.batches if rec.diagnostics)

    def rows(self, run_id="0"):
        cumulative = 0
        for rec in self.batches:
            cumulative += len(rec.activated)
            yield [run_id, rec.batch, rec.n_alive,
                   rec.diagnostics.samples if rec.diagnostics else 0,
                   ";".join(map(str, sorted(rec.seeds))), len(rec.activated),
                   cumulative, f"{rec.wall_time_ms:.3f}"]

    def write_csv(self, path, run_id="0") -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRACE_HEADER)
            w.writerows(self.rows(run_id))


def _selector_for(cfg: PolicyConfig) -> Selector:
    if cfg.mode in ("expected", "worst_case"):
        return epic.epic_select
    if cfg.mode == "naive":
        return lambda g, b, e, key: epic.naive_select(g, b, e, None, key)
    return lambda g, b, e, key: epic.fixed_select(g, b, cfg.pool_size, key)


def adapt_greedy(g: Graph, phi: Realization, cfg: PolicyConfig,
                 selector: Selector | None = None) -> AdaptiveTrace:
    """Run ``cfg.r`` batches of ``cfg.b`` seeds against the hidden world ``phi``.

    ``selector(graph, b, eps, key) -> (seeds, diagnostics)`` overrides the
    mode's selector.  When fewer than ``b`` nodes remain alive, the batch
    takes all of them and later batches are empty.
    """
    select = selector or _selector_for(cfg)
    eps = cfg.batch_eps()
    trace = AdaptiveTrace()
    current = g
    for i in range(cfg.r):
        t0 = time.perf_counter()
        n_i = current.n_alive
        if n_i <= cfg.b:
            seeds, diag = frozenset(current.alive_nodes.tolist()), None
        else:
            seeds, diag = select(current, cfg.b, eps[i], epic.batch_key(cfg.master_seed, i))
            seeds = frozenset(seeds)
        fb = observe_feedback(current, phi, seeds)
        elapsed = (time.perf_counter() - t0) * 1000.0
        trace.batches.append(BatchRecord(i + 1, seeds, fb.activated, n_i, diag, elapsed))
        current = residual_subgraph(current, fb.activated)
    return trace
