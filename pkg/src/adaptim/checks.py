"""Property and statistical checks against brute-force references.

Each ``check_*`` function returns a :class:`CheckResult`; ``run_all``
drives them for ``adaptim verify`` and the acceptance tests.  ``quick``
shrinks sample counts for a fast smoke pass; the full suite uses the exit
sizes and runtime budgets.
"""
from __future__ import annotations

import contextlib
import io
import math
import tempfile
import time
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from . import _rng, epic
from .adaptive import ConfigurationError, PolicyConfig, adapt_greedy, worst_case_calibrate
from .diffusion import propagate, sample_realization
from .epic import derive_params, lower_bound, rho, theta_max
from .fixtures import oracle_graph, synthetic_wc, write_edge_list
from .graph import random_graph
from .maxcover import greedy_reference, max_cover
from .oracle import exact_opt, exact_spread
from .rrset import RRCollection, coverage_fraction, new_collection


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: str
    required: str
    seconds: float = 0.0
    budget: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f" / {self.budget:.0f}s" if self.budget else ""
        return f"[{status}] {self.name}: {self.measured} (required {self.required}) " \
               f"[{self.seconds:.1f}s{budget}]"


def _timed(name, budget, fn):
    t0 = time.perf_counter()
    passed, measured, required = fn()
    dt = time.perf_counter() - t0
    within = budget is None or dt <= budget
    if not within:
        measured += f"; runtime {dt:.1f}s over budget"
    return CheckResult(name, bool(passed and within), measured, required, dt, budget)


# 1 -------------------------------------------------------------------------
def check_rr_unbiased(seed: int = 0, quick: bool = False) -> CheckResult:
    fixtures = 2 if quick else 5
    samples = 20_000 if quick else 200_000

    def run():
        rng = np.random.default_rng(seed)
        worst, count = 0.0, 0
        for f in range(fixtures):
            g = random_graph(8, 12, seed=int(rng.integers(1 << 31)))
            pool = new_collection(g, _rng.derive_key(seed, _rng.RR_POOL, f), samples)
            sets = [(u,) for u in range(g.n)]
            for _ in range(10):
                size = int(rng.integers(2, g.n))
                sets.append(tuple(sorted(rng.choice(g.n, size=size, replace=False).tolist())))
            for S in sets:
                truth = exact_spread(g, S)
                _, F = coverage_fraction(pool, S)
                p = truth / g.n
                se = g.n * math.sqrt(max(p * (1 - p), 0.0) / samples)
                z = abs(g.n * F - truth) / se if se > 0 else (0.0 if g.n * F == truth else math.inf)
                worst = max(worst, z)
                count += 1
        return worst <= 3.0, f"max |z| = {worst:.3f} over {count} seed sets", "|z| <= 3"

    return _timed("rr_unbiasedness", None if quick else 60.0, run)


# 2 -------------------------------------------------------------------------
def _random_collection(rng, b):
    n = int(rng.integers(max(b, 2), 17))
    sets = []
    for _ in range(int(rng.integers(1, 65))):
        size = int(rng.integers(1, min(5, n) + 1))
        sets.append(rng.choice(n, size=size, replace=False).tolist())
    return RRCollection.from_sets(sets, n=n)


def _best_coverage(c: RRCollection, b: int) -> int:
    masks = [0] * c.n
    for j, s in enumerate(c.sets):
        for u in s:
            masks[u] |= 1 << j
    best = 0
    for sub in combinations(range(c.n), b):
        m = 0
        for u in sub:
            m |= masks[u]
        best = max(best, bin(m).count("1"))
    return best


def check_maxcover_sandwich(seed: int = 0, quick: bool = False) -> CheckResult:
    trials = 50 if quick else 200

    def run():
        rng = np.random.default_rng(seed + 2)
        violations = 0
        for t in range(trials):
            b = 1 + t % 4
            c = _random_collection(rng, b)
            res = max_cover(c, b)
            opt = _best_coverage(c, b)
            num, den = b**b - (b - 1) ** b, b**b   # rho_b as an exact fraction
            if res.coverage * den < num * res.upper or res.upper < opt:
                violations += 1
            if res.seeds != greedy_reference(c, b):
                violations += 1
        return violations == 0, f"{violations} violations in {trials} collections", "0"

    return _timed("maxcover_sandwich", None if quick else 10.0, run)


# 3 -------------------------------------------------------------------------
def check_epic_expected(seed: int = 0, quick: bool = False) -> CheckResult:
    runs = 100 if quick else 500
    b, eps = 2, 0.3

    def run():
        g = oracle_graph()
        _, opt = exact_opt(g, b)
        cache: dict = {}
        values = []
        for i in range(runs):
            S, _ = epic.epic_select(g, b, eps, _rng.derive_key(seed, _rng.RUN, i))
            if S not in cache:
                cache[S] = exact_spread(g, S)
            values.append(cache[S])
        values = np.array(values)
        mean, sd = values.mean(), values.std(ddof=1)
        bound = rho(b) * (1 - eps) * opt - 3 * sd / math.sqrt(runs)
        return mean >= bound, f"mean spread {mean:.4f} (OPT_2 = {opt:.4f})", f">= {bound:.4f}"

    return _timed("epic_expected_approximation", None if quick else 120.0, run)


# 4 -------------------------------------------------------------------------
def check_lower_bound(seed: int = 0, quick: bool = False) -> CheckResult:
    def run():
        bad = 0
        grid_f = np.linspace(0.0, 1.0, 50)
        grid_a = np.linspace(0.1, 40.0, 50)
        grid_t = [1, 10, 100, 1000, 100_000]
        for f2 in grid_f.tolist():
            for t in grid_t:
                if lower_bound(f2, 0.0, t) != f2:
                    bad += 1
                for a in grid_a.tolist():
                    fl = lower_bound(f2, a, t)
                    if f2 == 0.0:
                        bad += fl != 0.0
                    else:
                        bad += not fl < f2
        return bad == 0, f"{bad} violations on 50x50x5 grid", "0"

    return _timed("lower_bound_properties", None, run)


# 5 -------------------------------------------------------------------------
def check_feedback_consistency(seed: int = 0, quick: bool = False) -> CheckResult:
    trials = 30 if quick else 100

    def run():
        rng = np.random.default_rng(seed + 5)
        bad = 0
        for t in range(trials):
            n = int(rng.integers(6, 31))
            g = random_graph(n, int(rng.integers(n, 3 * n)), seed=int(rng.integers(1 << 31)))
            phi = sample_realization(g, int(rng.integers(1 << 62)))
            r = int(rng.integers(1, 5))
            k = r * int(rng.integers(1, max(2, n // (2 * r)) + 1))
            mode = ["expected", "naive", "fixed", "worst_case"][t % 4]
            if mode == "worst_case":
                r = max(r, 2)
                k = r * max(1, k // r)
            cfg = PolicyConfig(k, r, 0.5, mode, delta=0.5, pool_size=200,
                               master_seed=int(rng.integers(1 << 62)))
            trace = adapt_greedy(g, phi, cfg)
            union = frozenset().union(*trace.seeds)
            if trace.activated != propagate(g, phi, union):
                bad += 1
            if sum(len(a.activated) for a in trace.batches) != len(trace.activated):
                bad += 1
        return bad == 0, f"{bad} mismatches in {trials} runs", "0"

    return _timed("feedback_consistency", None, run)


# 6 -------------------------------------------------------------------------
def check_adaptivity_gain(seed: int = 0, quick: bool = False) -> CheckResult:
    realizations = 30 if quick else 200
    k = 32

    def run():
        g = synthetic_wc(1000, 3, seed=1)
        diffs, ad, na = [], [], []
        for j in range(realizations):
            rseed = _rng.derive_key(seed, _rng.RUN, j)
            phi = sample_realization(g, rseed)
            master = _rng.derive_key(rseed, _rng.BATCH)
            a = adapt_greedy(g, phi, PolicyConfig(k, k, 0.5, "expected", master_seed=master)).spread
            s = adapt_greedy(g, phi, PolicyConfig(k, 1, 0.5, "expected", master_seed=master)).spread
            ad.append(a)
            na.append(s)
            diffs.append(a - s)
        diffs = np.array(diffs, dtype=float)
        mean, se = diffs.mean(), diffs.std(ddof=1) / math.sqrt(len(diffs))
        gain = 100.0 * mean / np.mean(na)
        return mean >= -se, (f"adaptive {np.mean(ad):.1f} vs non-adaptive {np.mean(na):.1f}; "
                             f"paired diff {mean:.2f} (SE {se:.2f}), gain {gain:.1f}%"), \
            f"diff >= {-se:.2f}"

    return _timed("adaptivity_gain", None if quick else 600.0, run)


# 7 -------------------------------------------------------------------------
def _rel(x, y) -> float:
    import mpmath as mp
    if y == 0:
        return float(abs(mp.mpf(x)))
    return float(abs((mp.mpf(x) - y) / y))


def _hp_params(n, b, eps):
    import mpmath as mp
    eps = mp.mpf(eps)
    delta = mp.mpf("0.01") * eps * b / n
    eps_p = (b * eps - delta * n) / (b - delta * n)
    eps_a = eps_p / (1 - eps_p)
    # the loop runs at least once even when the log2 argument is below 1
    i_max = max(1, int(mp.ceil(mp.log((2 + 2 * eps_a / 3) * n / eps_a**2, 2))) + 1)
    a = mp.log(2 * i_max / delta)
    lnc = mp.log(mp.binomial(n, b))
    theta0 = (mp.log(2 / delta) + lnc) / b
    return delta, eps_p, eps_a, i_max, a, theta0, lnc


def check_calibration(seed: int = 0, quick: bool = False) -> CheckResult:
    trials = 200 if quick else 1000

    def run():
        import mpmath as mp
        mp.mp.dps = 50
        rng = np.random.default_rng(seed + 7)
        worst, bad = 0.0, 0
        for _ in range(trials):
            n = int(10 ** rng.uniform(0.5, 6))
            b = int(rng.integers(1, n + 1)) if rng.random() < 0.3 else \
                int(min(n, 10 ** rng.uniform(0, min(3, math.log10(n)))))
            eps = float(rng.uniform(0.01, 0.99))
            p = derive_params(n, b, eps)
            delta, eps_p, eps_a, i_max, a, theta0, lnc = _hp_params(n, b, eps)
            if p.i_max != i_max:
                bad += 1
            for x, y in ((p.delta_i, delta), (p.eps_prime, eps_p), (p.eps_a, eps_a),
                         (p.a_i, a), (p.theta_0, theta0)):
                worst = max(worst, _rel(x, y))
            da = float(rng.uniform(0.001, 1.0))
            ea = float(rng.uniform(0.01, 5.0))
            hp_tm = (2 + 2 * mp.mpf(ea) / 3) * n / (mp.mpf(ea) ** 2 * b) * (mp.log(1 / mp.mpf(da)) + lnc)
            worst = max(worst, _rel(theta_max(n, b, ea, da), hp_tm))

            r = int(rng.integers(1, 400))
            d = float(10 ** rng.uniform(-6, -0.01))
            eps_list = rng.uniform(0.01, 0.99, size=int(rng.integers(1, 4))).tolist()
            valid = all(r > mp.log(1 / mp.mpf(d)) / (2 * mp.mpf(e) ** 2) for e in eps_list)
            try:
                got = worst_case_calibrate(eps_list, r, d)
            except ConfigurationError:
                got = None
            if (got is not None) != valid:
                bad += 1
            elif got is not None:
                shift = mp.sqrt(mp.log(1 / mp.mpf(d)) / (2 * r))
                for x, e in zip(got, eps_list):
                    worst = max(worst, _rel(x, mp.mpf(e) - shift))
        return worst <= 1e-9 and bad == 0, \
            f"max rel err {worst:.2e}, {bad} mismatches over {trials} inputs", "<= 1e-9, 0"

    return _timed("calibration_formulas", None, run)


# 8 -------------------------------------------------------------------------
def check_rho(seed: int = 0, quick: bool = False) -> CheckResult:
    def run():
        exact = abs(rho(1) - 1.0) <= 1e-12 and abs(rho(2) - 0.75) <= 1e-12 \
            and abs(rho(5) - 0.67232) <= 1e-12
        limit = 1 - 1 / math.e
        top = 10**5 if quick else 10**6
        prev, ok = rho(1), True
        for b in range(2, top + 1):
            cur = rho(b)
            if cur > prev or cur <= limit:
                ok = False
                break
            prev = cur
        close = 0 < prev - limit < 1.0 / top  # gap is about 1/(2e b)
        return exact and ok and close, \
            f"rho(1,2,5) exact={exact}, monotone to {top}={ok}, rho({top})-(1-1/e)={prev - limit:.2e}", \
            "exact to 1e-12, non-increasing, > 1-1/e"

    return _timed("rho_exactness", None, run)


# 9 -------------------------------------------------------------------------
def check_determinism(seed: int = 0, quick: bool = False) -> CheckResult:
    def run():
        import csv

        from .cli import main
        with tempfile.TemporaryDirectory() as tmp:
            data = Path(tmp, "fixture.txt")
            write_edge_list(oracle_graph(), data)
            cols = []
            for i in range(2):
                out = Path(tmp, f"run{i}.csv")
                with contextlib.redirect_stdout(io.StringIO()):
                    code = main(["run", "--dataset", str(data), "--probabilities", "file",
                                 "--k", "4", "--b", "1,2", "--algorithms",
                                 "expected,naive,fixed,nonadaptive", "--realizations", "3",
                                 "--pool-size", "500", "--seed", str(seed), "--out", str(out)])
                if code != 0:
                    return False, f"run exited {code}", "exit 0"
                with open(out) as fh:
                    rows = list(csv.DictReader(fh))
                cols.append([(r["algorithm"], r["k"], r["b"], r["realization_seed"],
                              r["spread"], r["total_rr_samples"]) for r in rows])
        same = cols[0] == cols[1] and len(cols[0]) > 0
        return same, f"{len(cols[0])} rows, identical={same}", "identical spread/total_rr_samples"

    return _timed("run_determinism", None, run)


ALL_CHECKS = [check_rr_unbiased, check_maxcover_sandwich, check_epic_expected, check_lower_bound,
              check_feedback_consistency, check_adaptivity_gain, check_calibration, check_rho,
              check_determinism]


def run_all(seed: int = 0, quick: bool = False, echo=print) -> list[CheckResult]:
    results = []
    for fn in ALL_CHECKS:
        res = fn(seed=seed, quick=quick)
        echo(res.line())
        results.append(res)
    return results
