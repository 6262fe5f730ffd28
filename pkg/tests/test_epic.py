import math

import mpmath as mp
import pytest

from adaptim import _rng
from adaptim.epic import (DEFAULT_POOL_SIZE, derive_params, epic_select, fixed_select,
                          inflated_upper, log_binom, lower_bound, naive_params, naive_select,
                          rho, theta_max)
from adaptim.fixtures import synthetic_wc
from adaptim.graph import residual_subgraph

mp.mp.dps = 50


def test_params_small_example():
    p = derive_params(100, 1, 0.5)
    # delta_i * n_i = 0.005, so eps' = (0.5 - 0.005) / (1 - 0.005)
    assert p.delta_i == pytest.approx(5e-5, rel=1e-15)
    assert p.delta_i * p.n_i == pytest.approx(0.005, rel=1e-13)
    assert p.eps_prime == pytest.approx(0.495 / 0.995, rel=1e-13)


def test_params_full_batch():
    p = derive_params(40, 40, 0.5)
    assert p.delta_i == pytest.approx(0.005, rel=1e-15)
    assert p.theta_0 == pytest.approx(math.log(2 / 0.005) / 40, rel=1e-12)


def test_params_against_high_precision():
    n, b, eps = 1000, 10, mp.mpf("0.3")
    p = derive_params(n, b, 0.3)
    delta = mp.mpf("0.01") * eps * b / n
    eps_p = (b * eps - delta * n) / (b - delta * n)
    eps_a = eps_p / (1 - eps_p)
    i_max = int(mp.ceil(mp.log((2 + 2 * eps_a / 3) * n / eps_a**2, 2))) + 1
    a = mp.log(2 * i_max / delta)
    theta0 = (mp.log(2 / delta) + mp.log(mp.binomial(n, b))) / b
    assert p.i_max == i_max
    for got, want in [(p.delta_i, delta), (p.eps_prime, eps_p), (p.eps_a, eps_a),
                      (p.a_i, a), (p.theta_0, theta0)]:
        assert abs(got - want) <= 1e-9 * abs(want)
    assert 0 < p.delta_i < p.eps_i and 0 < p.eps_prime < p.eps_i and p.theta_0 > 0


def test_params_reject_bad_input():
    with pytest.raises(ValueError):
        derive_params(10, 1, 1.0)
    with pytest.raises(ValueError):
        derive_params(10, 11, 0.5)


def test_log_binom_branches():
    assert log_binom(10, 0) == 0.0
    assert log_binom(50, 3) == pytest.approx(math.log(19600), rel=1e-14)
    assert log_binom(10_000, 5000) == pytest.approx(float(mp.log(mp.binomial(10_000, 5000))), rel=1e-12)


def test_lower_bound_cases():
    for a in (0.5, 4.0, 30.0):
        for t in (1, 50, 10_000):
            assert lower_bound(0.0, a, t) == 0.0
    assert lower_bound(0.37, 0.0, 12) == 0.37
    got = lower_bound(0.5, 4.0, 1000)
    f2, a, t = mp.mpf("0.5"), mp.mpf(4), mp.mpf(1000)
    want = (mp.sqrt(f2 + 2 * a / (9 * t)) - mp.sqrt(a / (2 * t))) ** 2 - a / (18 * t)
    assert got < 0.5
    assert abs(got - want) <= 1e-12 * want


def test_lower_bound_clamps_negative():
    # tiny f2 with a big penalty goes negative before clamping
    assert lower_bound(1e-6, 40.0, 10) == 0.0


def test_theta_max_cases():
    assert theta_max(20, 3, 0.5, 1.0) == pytest.approx((2 + 1 / 3) * 20 / (0.25 * 3) * log_binom(20, 3))
    assert theta_max(20, 20, 0.5, 0.1) == pytest.approx((2 + 1 / 3) / 0.25 * math.log(10))
    n, b, ea, da = 5000, 7, mp.mpf("0.8"), mp.mpf("0.02")
    want = (2 + 2 * ea / 3) * n / (ea**2 * b) * (mp.log(1 / da) + mp.log(mp.binomial(n, b)))
    assert abs(theta_max(n, b, 0.8, 0.02) - want) <= 1e-9 * want


def test_rho_values():
    assert rho(1) == 1.0 and rho(2) == 0.75
    assert abs(rho(5) - 0.67232) < 1e-12


def test_dominating_node_always_chosen(star):
    for i in range(20):
        S, _ = epic_select(star, 1, 0.5, _rng.derive_key(1, i))
        assert S == {0}
        S, _ = naive_select(star, 1, 0.5, None, _rng.derive_key(1, i))
        assert S == {0}
    assert 0 in fixed_select(star, 1, 1000, key=3)[0]


def test_full_batch_selects_everything(g8):
    S, d = epic_select(g8, g8.n, 0.5, 9)
    assert S == frozenset(range(g8.n))
    assert d.f2 == 1.0 and d.f_upper == 1.0
    # the lower bound penalty at tiny pools can postpone the stop, never change S
    p = derive_params(g8.n, g8.n, 0.5)
    stop = rho(g8.n) * (1 - p.eps_prime)
    first = next(i for i in range(1, p.i_max + 1)
                 if lower_bound(1.0, p.a_i, p.pool_size * 2 ** (i - 1)) >= stop)
    assert d.iterations == min(first, p.i_max)


def test_pool_sizes_follow_doubling():
    g = synthetic_wc(300, 3, seed=2)
    p = derive_params(g.n_alive, 2, 0.5)
    for i in range(10):
        _, d = epic_select(g, 2, 0.5, _rng.derive_key(4, i))
        assert d.samples == p.pool_size * 2 ** (d.iterations - 1)
        assert d.total_samples == 2 * d.samples
        assert d.iterations <= p.i_max
        assert d.f_lower <= d.f2


def test_inflation_zero_and_monotone():
    assert inflated_upper(0.3, 0.0, 100) == 0.3
    assert inflated_upper(0.3, 5.0, 100) > 0.3
    assert inflated_upper(0.99, 50.0, 10) == 1.0


def test_naive_params_mapping():
    p = naive_params(500, 5, 0.5, 0.001)
    assert p.eps_prime == pytest.approx((0.5 - 0.001) / (1 - 0.001), rel=1e-15)
    with pytest.raises(ValueError):
        naive_params(500, 5, 0.5, 0.6)


def test_naive_needs_at_least_as_many_samples():
    g = synthetic_wc(300, 3, seed=2)
    for i in range(100):
        key = _rng.derive_key(21, i)
        _, de = epic_select(g, 2, 0.5, key)
        _, dn = naive_select(g, 2, 0.5, None, key)
        assert dn.samples >= de.samples


def test_fixed_select(g8, star):
    assert DEFAULT_POOL_SIZE == 10_000
    S, d = fixed_select(g8, 3, pool_size=1, key=2)
    assert len(S) == 3 and d.samples == 1
    with pytest.raises(ValueError):
        fixed_select(g8, 1, pool_size=0)


def test_selectors_reject_oversized_batch(g8):
    r = residual_subgraph(g8, range(6))
    for call in (lambda: epic_select(r, 3, 0.5, 0),
                 lambda: naive_select(r, 3, 0.5, None, 0),
                 lambda: fixed_select(r, 3, 10, 0)):
        with pytest.raises(ValueError):
            call()


def test_selection_is_deterministic(g8):
    assert epic_select(g8, 2, 0.3, 5) == epic_select(g8, 2, 0.3, 5)
