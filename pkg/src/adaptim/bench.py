"""Experiment sweeps over (algorithm, k, b) points and realizations, written as CSV."""
from __future__ import annotations

import csv
import logging
import os
import resource
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from . import _rng
from .adaptive import ConfigurationError, PolicyConfig, adapt_greedy
from .diffusion import sample_realization
from .graph import Graph, assign_wc_probabilities, load_edge_list

log = logging.getLogger(__name__)

CSV_HEADER = ["algorithm", "k", "r", "b", "realization_seed", "spread", "wall_time_ms",
              "peak_rss_kb", "total_rr_samples"]
ALGORITHMS = ("expected", "worst_case", "naive", "fixed", "nonadaptive")
B_SETTING = {"k": [500], "b": [1, 2, 4, 5, 10, 500]}
K_SETTING = {"r": [50], "k": [50, 100, 200, 300, 400, 500]}


class SpecError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    dataset: str = ""
    directed: bool = True
    sweep: str = "b"                # "b": fixed k, vary b | "k": fixed r, vary k
    k: list[int] = field(default_factory=list)
    b: list[int] = field(default_factory=list)
    r: list[int] = field(default_factory=list)
    eps: float = 0.5
    delta: float | None = None      # None -> 1/n
    algorithms: list[str] = field(default_factory=lambda: ["expected"])
    realizations: int = 20
    pool_size: int = 10_000
    probabilities: str = "wc"       # "wc" or "file"
    seed: int = 0
    out: str = "results.csv"
    workers: int = 1

    def with_defaults(self) -> "ExperimentSpec":
        spec = replace(self)
        if spec.sweep == "b":
            spec.k = spec.k or list(B_SETTING["k"])
            spec.b = spec.b or list(B_SETTING["b"])
        elif spec.sweep == "k":
            spec.r = spec.r or list(K_SETTING["r"])
            spec.k = spec.k or list(K_SETTING["k"])
        return spec

    def validate(self) -> None:
        if not self.dataset:
            raise SpecError("dataset is required")
        if self.sweep not in ("b", "k"):
            raise SpecError(f"sweep must be 'b' or 'k', got {self.sweep!r}")
        lists = ("k", "b") if self.sweep == "b" else ("k", "r")
        for name in lists:
            vals = getattr(self, name)
            if not vals or any(v < 1 for v in vals):
                raise SpecError(f"{name} must be a non-empty list of positive integers")
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise SpecError(f"unknown algorithm {alg!r}; choose from {', '.join(ALGORITHMS)}")
        if not self.algorithms:
            raise SpecError("no algorithms given")
        if not 0.0 < self.eps < 1.0:
            raise SpecError("eps must lie in (0, 1)")
        if self.delta is not None and not 0.0 < self.delta < 1.0:
            raise SpecError("delta must lie in (0, 1)")
        if self.realizations < 1 or self.pool_size < 1 or self.workers < 1:
            raise SpecError("realizations, pool_size and workers must be positive")
        if self.probabilities not in ("wc", "file"):
            raise SpecError("probabilities must be 'wc' or 'file'")
        if self.sweep == "b":
            bad = [(k, b) for k in self.k for b in self.b if k % b]
        else:
            bad = [(k, k / r) for k in self.k for r in self.r if k % r]
        if bad:
            k, b = bad[0]
            raise SpecError(f"batch size b={b:g} does not divide k={k}")

    def points(self) -> list[tuple[int, int]]:
        if self.sweep == "b":
            return [(k, b) for k in self.k for b in self.b]
        return [(k, k // r) for r in self.r for k in self.k]


_INT_LISTS = {"k", "b", "r"}


def _coerce(name: str, raw: str):
    kinds = {f.name: f.type for f in fields(ExperimentSpec)}
    if name not in kinds:
        raise SpecError(f"unknown spec key {name!r}")
    raw = raw.strip()
    if name in _INT_LISTS:
        return [int(x) for x in raw.replace(";", ",").split(",") if x.strip()]
    if name == "algorithms":
        return [x.strip() for x in raw.replace(";", ",").split(",") if x.strip()]
    if name == "directed":
        return raw.lower() in ("1", "true", "yes", "on")
    if name == "delta":
        return None if raw.lower() in ("", "none", "auto") else float(raw)
    if name == "eps":
        return float(raw)
    if name in ("realizations", "pool_size", "seed", "workers"):
        return int(raw)
    return raw


def parse_spec_text(text: str) -> dict:
    """Flat ``key = value`` (or ``key: value``) lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":" if ":" in line else None
        if sep is None:
            raise SpecError(f"spec line {lineno}: expected key=value")
        key, value = line.split(sep, 1)
        key = key.strip().replace("-", "_")
        key = {"mode": "algorithms", "dataset_path": "dataset"}.get(key, key)
        try:
            out[key] = _coerce(key, value)
        except ValueError as exc:
            raise SpecError(f"spec line {lineno}: {exc}") from None
    return out


def load_graph(spec: ExperimentSpec) -> Graph:
    g = load_edge_list(spec.dataset, directed=spec.directed)
    return assign_wc_probabilities(g) if spec.probabilities == "wc" else g


def _peak_rss_kb() -> int:
    try:
        return int(resource.getrusage(resource.RUSAGE_SELF).ru_maxrss)
    except (OSError, ValueError):
        return 0


def _realization_seed(seed: int, j: int) -> int:
    return _rng.derive_key(seed, _rng.RUN, j)


def _policy(spec: ExperimentSpec, n: int, alg: str, k: int, b: int, master: int) -> PolicyConfig:
    delta = spec.delta if spec.delta is not None else 1.0 / n
    if alg == "nonadaptive":
        return PolicyConfig(k, 1, spec.eps, "expected", master_seed=master)
    return PolicyConfig(k, k // b, spec.eps, alg, delta=delta, pool_size=spec.pool_size,
                        master_seed=master)


_GRAPH: Graph | None = None


def _init_worker(graph: Graph) -> None:
    global _GRAPH
    _GRAPH = graph


def _run_one(task):
    spec, alg, k, b, j = task
    g = _GRAPH
    rseed = _realization_seed(spec.seed, j)
    cfg = _policy(spec, g.n, alg, k, b, _rng.derive_key(rseed, _rng.BATCH))
    t0 = time.perf_counter()
    trace = adapt_greedy(g, sample_realization(g, rseed), cfg)
    wall = (time.perf_counter() - t0) * 1000.0
    return [alg, k, cfg.r, cfg.b, rseed, trace.spread, f"{wall:.3f}", _peak_rss_kb(),
            trace.total_rr_samples]


def build_tasks(spec: ExperimentSpec, n: int) -> list[tuple]:
    tasks, seen = [], set()
    for alg in spec.algorithms:
        for k, b in spec.points():
            if alg == "nonadaptive":
                b = k
            if (alg, k, b) in seen:
                continue
            seen.add((alg, k, b))
            try:
                _policy(spec, n, alg, k, b, 0)
            except ConfigurationError as exc:
                log.warning("skipping %s k=%d b=%d: %s", alg, k, b, exc)
                continue
            tasks.extend((spec, alg, k, b, j) for j in range(spec.realizations))
    return tasks


def run_experiment(spec: ExperimentSpec) -> Path:
    """Run every task and write one CSV row per (algorithm, k, b, realization).

    The file is written to a temporary sibling and renamed at the end, so a
    failed run leaves no partial output.
    """
    spec = spec.with_defaults()
    spec.validate()
    try:
        g = load_graph(spec)
    except (OSError, ValueError) as exc:
        raise SpecError(f"cannot load dataset {spec.dataset!r}: {exc}") from None
    tasks = build_tasks(spec, g.n)
    if not tasks:
        raise SpecError("no runnable (algorithm, k, b) points")
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers, initializer=_init_worker, initargs=(g,)) as ex:
            rows = list(ex.map(_run_one, tasks, chunksize=4))
    else:
        _init_worker(g)
        rows = [_run_one(t) for t in tasks]
    rows.sort(key=lambda row: (row[0], row[1], row[3], row[4]))

    out = Path(spec.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=out.parent, prefix=f".{out.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            w.writerows(rows)
        os.replace(tmp, out)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return out


def dataset_stats(g: Graph) -> dict:
    return {"n": g.n, "m": g.m, "avg_degree": g.m / g.n if g.n else 0.0}
