import csv
import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptim.adaptive import (TRACE_HEADER, ConfigurationError, PolicyConfig, adapt_greedy,
                              rho, worst_case_calibrate)
from adaptim.diffusion import propagate, sample_realization
from adaptim.fixtures import synthetic_wc, walkthrough_graph, walkthrough_realization
from adaptim.oracle import exact_opt


def exact_greedy(g, b, eps, key):
    return exact_opt(g, b)[0], None


def test_rho_limit():
    assert rho(1) == 1.0
    assert rho(10**6) == pytest.approx(1 - 1 / math.e, abs=1e-6)


def test_calibrate_examples():
    assert worst_case_calibrate([0.3, 0.4], 2, 1.0) == [0.3, 0.4]
    got = worst_case_calibrate([0.5] * 50, 50, 0.5)
    with mp.workdps(50):
        want = mp.mpf("0.5") - mp.sqrt(mp.log(2) / 100)
    assert all(abs(v - want) <= 1e-12 * want for v in got)
    with pytest.raises(ConfigurationError, match="number of batches|more batches"):
        worst_case_calibrate([0.1], 1, 0.01)
    with pytest.raises(ConfigurationError):
        worst_case_calibrate([0.5], 2, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 0.99), st.integers(1, 400), st.floats(1e-6, 1.0))
def test_calibrate_boundary(e, r, d):
    need = math.log(1 / d) / (2 * e * e)
    if r > need:
        (v,) = worst_case_calibrate([e], r, d)
        assert 0 < v <= e
    else:
        with pytest.raises(ConfigurationError):
            worst_case_calibrate([e], r, d)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        PolicyConfig(k=5, r=2)
    with pytest.raises(ConfigurationError):
        PolicyConfig(k=4, r=2, mode="bogus")
    with pytest.raises(ConfigurationError):
        PolicyConfig(k=4, r=2, eps=[0.5])
    with pytest.raises(ConfigurationError):
        PolicyConfig(k=4, r=2, mode="worst_case")
    cfg = PolicyConfig(k=6, r=3, eps=[0.2, 0.3, 0.4])
    assert cfg.b == 2 and cfg.batch_eps() == [0.2, 0.3, 0.4]


def test_walkthrough_trace():
    g = walkthrough_graph()
    phi = walkthrough_realization(g)
    tr = adapt_greedy(g, phi, PolicyConfig(k=2, r=2), selector=exact_greedy)
    assert tr.seeds == [{0}, {2}]
    assert [len(b.activated) for b in tr.batches] == [4, 2]
    assert tr.spread == 6 and tr.activated == frozenset(range(6))


def test_single_batch_is_nonadaptive():
    g = synthetic_wc(200, 3, seed=3)
    phi = sample_realization(g, 11)
    tr = adapt_greedy(g, phi, PolicyConfig(k=5, r=1, master_seed=4))
    assert len(tr.batches) == 1 and len(tr.seeds[0]) == 5
    assert tr.activated == propagate(g, phi, tr.seeds[0])


@pytest.mark.parametrize("mode", ["expected", "naive", "fixed", "worst_case"])
def test_trace_invariants(mode):
    g = synthetic_wc(300, 3, seed=5)
    kw = {"delta": 0.5, "eps": 0.6} if mode == "worst_case" else {}
    cfg = PolicyConfig(k=20, r=20, mode=mode, pool_size=500, master_seed=2, **kw)
    phi = sample_realization(g, 3)
    tr = adapt_greedy(g, phi, cfg)
    seen = set()
    for rec in tr.batches:
        assert len(rec.seeds) == 1
        assert not rec.seeds & seen            # seeds were still alive
        assert rec.seeds <= rec.activated
        assert not rec.activated & seen        # batches activate disjoint sets
        seen |= rec.activated
    union = frozenset().union(*tr.seeds)
    assert tr.activated == propagate(g, phi, union)
    assert tr.spread == len(tr.activated)
    assert tr.total_rr_samples > 0


def test_exhaustion_selects_remaining():
    g = walkthrough_graph(p=1.0)
    phi = sample_realization(g, 0)
    tr = adapt_greedy(g, phi, PolicyConfig(k=3, r=3), selector=exact_greedy)
    # the first seed reaches everything, so the remaining batches are empty
    assert tr.spread == 6 and tr.seeds[0] == {0}
    assert [rec.n_alive for rec in tr.batches] == [6, 0, 0]
    assert tr.seeds[1:] == [frozenset(), frozenset()]

    tr = adapt_greedy(g, phi.from_bits([0] * g.m), PolicyConfig(k=4, r=2), selector=exact_greedy)
    assert [rec.n_alive for rec in tr.batches] == [6, 4]
    assert len(tr.seeds[1]) == 2


def test_determinism():
    g = synthetic_wc(300, 3, seed=5)
    phi = sample_realization(g, 9)
    cfg = PolicyConfig(k=6, r=3, master_seed=77)
    a, b = adapt_greedy(g, phi, cfg), adapt_greedy(g, phi, cfg)
    assert a.seeds == b.seeds and a.spread == b.spread
    assert [r.diagnostics for r in a.batches] == [r.diagnostics for r in b.batches]


def test_worst_case_uses_smaller_eps():
    exp = PolicyConfig(k=50, r=50, eps=0.5)
    wc = PolicyConfig(k=50, r=50, eps=0.5, mode="worst_case", delta=0.5)
    assert all(w < e for w, e in zip(wc.batch_eps(), exp.batch_eps()))


def test_trace_csv(tmp_path):
    g = walkthrough_graph()
    tr = adapt_greedy(g, walkthrough_realization(g), PolicyConfig(k=2, r=2), selector=exact_greedy)
    path = tmp_path / "trace.csv"
    tr.write_csv(path, run_id="w")
    rows = list(csv.reader(open(path)))
    assert rows[0] == TRACE_HEADER
    assert rows[1][:7] == ["w", "1", "6", "0", "0", "4", "4"]
    assert rows[2][:7] == ["w", "2", "2", "0", "2", "2", "6"]
