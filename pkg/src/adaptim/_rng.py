"""Counter-based random streams.

Every random draw in the package is a pure function of a 64-bit key and a
counter, so results never depend on call order or worker count.  The
construction is SplitMix64: the ``c``-th output for key ``k`` is
``mix64(k + (c + 1) * GOLDEN)``.  The compiled kernels implement the same
arithmetic and must agree bit for bit.
"""

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
INV_2_53 = 1.0 / (1 << 53)

# seed domains
REALIZATION = 1
RR_POOL = 2
BATCH = 3
SIMULATION = 4
RUN = 5


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_key(seed: int, *parts: int) -> int:
    """Hash a seed and a path of integer labels into a new 64-bit key."""
    h = mix64((seed & MASK64) + GOLDEN)
    for p in parts:
        h = mix64(h ^ mix64((p & MASK64) + GOLDEN))
    return h


def uniform(key: int, counter: int) -> float:
    """Uniform double in [0, 1) for position ``counter`` of stream ``key``."""
    return (mix64(key + (counter + 1) * GOLDEN) >> 11) * INV_2_53


def mix64_array(z):
    """Vectorized :func:`mix64` over a uint64 numpy array (wrapping arithmetic)."""
    import numpy as np

    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def derive_keys(seed: int, *parts: int, last):
    """``derive_key(seed, *parts, x)`` for every ``x`` in the array ``last``."""
    import numpy as np

    h = np.uint64(derive_key(seed, *parts))
    with np.errstate(over="ignore"):
        tail = mix64_array(np.asarray(last, dtype=np.uint64) + np.uint64(GOLDEN))
    return mix64_array(h ^ tail)
