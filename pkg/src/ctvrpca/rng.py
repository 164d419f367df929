"""Portable seeded random stream.

The generator is xoshiro256** with its 256-bit state filled from the seed by
splitmix64.  Uniform reals take the top 53 bits of each output word; Gaussians
come from Box-Muller on consecutive uniform pairs.  A request for an odd number
of Gaussians throws away the unused half of the last pair, so a pair is never
split across calls and the stream depends only on the sequence of requests.
"""

import numpy as np

from . import _kernels

_MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(x):
    """One splitmix64 step; returns ``(new_state, output)`` as Python ints."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x, z ^ (z >> 31)


def mix_seeds(*parts):
    """Hash a tuple of integers into one 64-bit seed (order sensitive)."""
    acc = 0x243F6A8885A308D3
    for part in parts:
        acc, out = splitmix64((acc ^ (int(part) & _MASK64)) & _MASK64)
        acc = out
    return acc


class PRNGStream:
    """Deterministic scalar stream; same seed gives the same values everywhere."""

    def __init__(self, seed=0):
        self.seed = int(seed) & _MASK64
        x = self.seed
        words = []
        for _ in range(4):
            x, z = splitmix64(x)
            words.append(z)
        self.state = np.array(words, dtype=np.uint64)

    def uniform(self, n=None):
        """Uniform reals on [0, 1); scalar when ``n`` is None."""
        if n is None:
            return float(_kernels.fill_uniform(self.state, 1)[0])
        return _kernels.fill_uniform(self.state, int(n))

    def normal(self, n=None):
        if n is None:
            return float(_kernels.fill_normal(self.state, 1)[0])
        return _kernels.fill_normal(self.state, int(n))

    def choice_without_replacement(self, n, m):
        """``m`` distinct indices from ``range(n)`` by a partial Fisher-Yates pass."""
        if not 0 <= m <= n:
            raise ValueError(f"cannot draw {m} distinct items from {n}")
        return _kernels.partial_shuffle(self.state, int(n), int(m))

    def signs(self, n):
        """Independent +/-1 values with probability 1/2 each."""
        return np.where(self.uniform(n) < 0.5, 1.0, -1.0)


def prng_stream(seed):
    return PRNGStream(seed)
