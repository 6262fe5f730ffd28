"""Time the hot kernels on both backends.

    python3 benchmarks/bench_kernels.py [--n 5000] [--samples 20000] [--repeat 3]

Prints one line per (kernel, backend) with the best wall time and the
speedup of the compiled extension over the pure-Python fallback.
"""
from __future__ import annotations

import argparse
import importlib
import time

import numpy as np

from adaptim import _pykernels
from adaptim.fixtures import synthetic_wc
from adaptim.rrset import new_collection


def _backends():
    out = {"python": _pykernels}
    try:
        out["cython"] = importlib.import_module("adaptim._kernels")
    except ImportError:
        print("compiled extension not available; timing the fallback only")
    return out


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--samples", type=int, default=20_000)
    ap.add_argument("--sims", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    g = synthetic_wc(args.n, 3, seed=1)
    cand = np.flatnonzero(g.alive).astype(np.int64)
    seeds = np.arange(10, dtype=np.int64)
    keys = np.arange(args.sims, dtype=np.uint64) * np.uint64(7919)
    pool = new_collection(g, 11, args.samples)
    node_ptr, node_sets = pool.index
    gains0 = pool.node_coverage().astype(np.int64)
    top = np.argsort(-gains0, kind="stable")[:50]

    def cover(k):
        covered = np.zeros(pool.total, dtype=np.uint8)
        gains = gains0.copy()
        for u in top.tolist():
            k.cover_pick(pool.offsets, pool.nodes, node_ptr, node_sets, covered, gains, u)

    cases = {
        "sample_rr": lambda k: k.sample_rr(g.in_ptr, g.in_src, g.in_eid, g.in_prob, g.alive,
                                           cand, np.uint64(3), 0, args.samples),
        "spread_counts": lambda k: k.spread_counts(g.out_ptr, g.out_dst, g.out_prob, g.alive,
                                                   seeds, keys),
        "edge_bits": lambda k: k.edge_bits(g.out_prob, np.uint64(5)),
        "cover_pick": cover,
    }
    print(f"graph: n={g.n} m={g.m}; rr samples={args.samples}; simulations={args.sims}")
    backends = _backends()
    for name, fn in cases.items():
        times = {b: _best(lambda: fn(k), args.repeat) for b, k in backends.items()}
        speed = (f"  speedup x{times['python'] / times['cython']:.1f}"
                 if "cython" in times else "")
        cols = "  ".join(f"{b}={t * 1000:9.1f} ms" for b, t in times.items())
        print(f"{name:14s} {cols}{speed}")


if __name__ == "__main__":
    main()
