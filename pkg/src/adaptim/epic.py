"""Non-adaptive seed selection on one residual graph.

``epic_select`` returns a size-``b`` set whose expected spread, averaged
over the selector's own randomness, is at least ``rho_b * (1 - eps)`` times
the optimum.  ``naive_select`` is the same doubling loop with a
high-probability upper bound (worst-case guarantee), and ``fixed_select``
is the single-pool heuristic with no guarantee.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from . import _rng
from .graph import Graph
from .maxcover import CoverResult, max_cover
from .rrset import coverage_fraction, new_collection, pool_key

DEFAULT_POOL_SIZE = 10_000


def rho(b: int) -> float:
    """Greedy max-coverage ratio ``1 - (1 - 1/b)^b``."""
    if b < 1:
        raise ValueError("b must be >= 1")
    if b == 1:
        return 1.0
    return -math.expm1(b * math.log1p(-1.0 / b))


def log_binom(n: int, k: int) -> float:
    """``ln C(n, k)``; exact summation for small ``k``, log-gamma otherwise."""
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    k = min(k, n - k)
    if k <= 2000:
        return math.fsum(math.log((n - j) / (j + 1)) for j in range(k))
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


@dataclass(frozen=True)
class EpicParams:
    eps_i: float
    b: int
    n_i: int
    delta_i: float
    eps_prime: float
    eps_a: float
    i_max: int
    a_i: float
    theta_0: float

    @property
    def pool_size(self) -> int:
        return math.ceil(self.theta_0)


def _loop_constants(n_i, b, eps_prime, delta):
    eps_a = eps_prime / (1.0 - eps_prime)
    i_max = math.ceil(math.log2((2.0 + 2.0 * eps_a / 3.0) * n_i / eps_a**2)) + 1
    i_max = max(i_max, 1)
    a_i = math.log(2.0 * i_max / delta)
    theta_0 = (math.log(2.0 / delta) + log_binom(n_i, b)) / b
    return eps_a, i_max, a_i, theta_0


def _check_inputs(n_i, b, eps_i):
    if not 0.0 < eps_i < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps_i}")
    if not 1 <= b <= n_i:
        raise ValueError(f"need 1 <= b <= n_i, got b={b}, n_i={n_i}")


def derive_params(n_i: int, b: int, eps_i: float) -> EpicParams:
    _check_inputs(n_i, b, eps_i)
    delta = 0.01 * eps_i * b / n_i
    eps_prime = (b * eps_i - delta * n_i) / (b - delta * n_i)
    assert 0.0 < eps_prime < eps_i, "eps_prime out of range"
    eps_a, i_max, a_i, theta_0 = _loop_constants(n_i, b, eps_prime, delta)
    return EpicParams(eps_i, b, n_i, delta, eps_prime, eps_a, i_max, a_i, theta_0)


def naive_params(n_i: int, b: int, eps_i: float, delta_i: float | None = None) -> EpicParams:
    """Parameters for running a worst-case selector at ``(eps', delta)``.

    ``eps' = (eps - delta) / (1 - delta)`` makes the expected error at most
    ``eps``.  ``delta`` defaults to the EPIC choice ``0.01 * eps * b / n``.
    """
    _check_inputs(n_i, b, eps_i)
    delta = 0.01 * eps_i * b / n_i if delta_i is None else delta_i
    if not 0.0 < delta < eps_i:
        raise ValueError("need 0 < delta < eps")
    eps_prime = (eps_i - delta) / (1.0 - delta)
    eps_a, i_max, a_i, theta_0 = _loop_constants(n_i, b, eps_prime, delta)
    return EpicParams(eps_i, b, n_i, delta, eps_prime, eps_a, i_max, a_i, theta_0)


def lower_bound(f2: float, a: float, theta2: int) -> float:
    """Martingale lower confidence bound on a coverage fraction, clamped at 0."""
    if theta2 < 1 or a < 0:
        raise ValueError("need theta2 >= 1 and a >= 0")
    if a == 0:
        return f2
    value = (math.sqrt(f2 + 2.0 * a / (9.0 * theta2)) - math.sqrt(a / (2.0 * theta2))) ** 2 \
        - a / (18.0 * theta2)
    # f2 = 0 is algebraically 0; rounding may leave a tiny residue either way
    if f2 == 0.0:
        return 0.0
    return max(0.0, value)


def inflated_upper(f_upper: float, a: float, theta1: int) -> float:
    """High-probability bound on the expected coverage fraction of the optimum."""
    if a == 0:
        return f_upper
    slack = a / (2.0 * theta1)
    return min(1.0, (math.sqrt(f_upper + slack) + math.sqrt(slack)) ** 2)


def theta_max(n_i: int, b: int, eps_a: float, delta_a: float) -> float:
    """Pool size beyond which greedy is ``rho_b / (1 + eps_a)``-accurate w.h.p."""
    if eps_a <= 0 or not 0 < delta_a <= 1:
        raise ValueError("need eps_a > 0 and 0 < delta_a <= 1")
    return (2.0 + 2.0 * eps_a / 3.0) * n_i / (eps_a**2 * b) * (math.log(1.0 / delta_a)
                                                             + log_binom(n_i, b))


@dataclass(frozen=True)
class SelectionDiagnostics:
    iterations: int
    samples: int        # final |R1|
    total_samples: int  # RR-sets generated across both pools
    f_lower: float
    f_upper: float
    f2: float

    def as_record(self) -> dict:
        return asdict(self)


def _doubling_loop(g: Graph, b: int, params: EpicParams, key: int, inflate: bool):
    alpha = rho(b) * (1.0 - params.eps_prime)
    theta = params.pool_size
    r1 = new_collection(g, pool_key(key, 1), theta)
    r2 = new_collection(g, pool_key(key, 2), theta)
    for it in range(1, params.i_max + 1):
        cover: CoverResult = max_cover(r1, b)
        _, f2 = coverage_fraction(r2, cover.seeds)
        f_lower = lower_bound(f2, params.a_i, r2.total)
        f_upper = cover.f_upper
        if inflate:
            f_upper = inflated_upper(f_upper, params.a_i, r1.total)
        if f_lower >= alpha * f_upper or it == params.i_max:
            diag = SelectionDiagnostics(it, r1.total, r1.total + r2.total,
                                        f_lower, f_upper, f2)
            return frozenset(cover.seeds), diag
        r1.extend(g, r1.total)
        r2.extend(g, r2.total)
    raise AssertionError("unreachable")


def _all_alive(g: Graph, b: int):
    if b > g.n_alive:
        raise ValueError(f"b={b} exceeds the {g.n_alive} alive nodes")


def epic_select(g: Graph, b: int, eps_i: float, key: int):
    """Run the doubling loop with the plain greedy upper bound.

    Returns ``(seeds, SelectionDiagnostics)``.  R1 and R2 draw from disjoint
    sub-streams of ``key``.
    """
    _all_alive(g, b)
    return _doubling_loop(g, b, derive_params(g.n_alive, b, eps_i), key, inflate=False)


def naive_select(g: Graph, b: int, eps_i: float, delta_i: float | None, key: int):
    _all_alive(g, b)
    return _doubling_loop(g, b, naive_params(g.n_alive, b, eps_i, delta_i), key, inflate=True)


def fixed_select(g: Graph, b: int, pool_size: int = DEFAULT_POOL_SIZE, key: int = 0):
    if pool_size < 1:
        raise ValueError("pool_size must be >= 1")
    _all_alive(g, b)
    pool = new_collection(g, pool_key(key, 1), pool_size)
    cover = max_cover(pool, b)
    return frozenset(cover.seeds), SelectionDiagnostics(1, pool.total, pool.total,
                                                        float("nan"), cover.f_upper, cover.f)


def batch_key(master_seed: int, batch: int) -> int:
    return _rng.derive_key(master_seed, _rng.BATCH, batch)
