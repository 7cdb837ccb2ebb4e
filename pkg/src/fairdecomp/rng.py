"""Counter-based random streams keyed by SplitMix64.

Every random quantity in a decomposition is addressed by a path of integers,
e.g. ``(master_seed, trial, phase, component_min_vertex)``. The path is folded
through the SplitMix64 finalizer, so a draw depends only on its address and not
on the order in which components or trials are visited. That is what lets a
campaign split across worker processes reproduce a serial run bit for bit.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 step (Steele, Lea & Flood 2014): add the golden gamma, then finalize."""
    z = (x + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive(*path: int) -> int:
    """Fold an integer path into a single 64-bit key."""
    h = 0
    for p in path:
        h = splitmix64(h ^ (p & MASK64))
    return h


class Stream:
    """Deterministic stream of draws under a fixed key.

    The i-th draw is ``splitmix64(key ^ derive(i))``; children get keys derived
    from the parent key and the child path.
    """

    __slots__ = ("key", "_counter")

    def __init__(self, seed: int, *path: int):
        self.key = derive(seed, *path)
        self._counter = 0

    def child(self, *path: int) -> "Stream":
        return Stream(self.key, *path)

    def next64(self) -> int:
        self._counter += 1
        return splitmix64(self.key ^ splitmix64(self._counter))

    def random(self) -> float:
        """Uniform on (0, 1]; never returns 0."""
        return ((self.next64() >> 11) + 1) * (1.0 / (1 << 53))

    def randbelow(self, n: int) -> int:
        """Uniform on {0, ..., n-1} by rejection (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next64()
            if x < limit:
                return x % n

    def bit(self) -> int:
        return self.next64() >> 63

    def normal(self) -> float:
        """Standard normal via Box-Muller (cosine branch only)."""
        u1 = self.random()
        u2 = self.random()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def numpy_seed(self) -> int:
        """A seed for :func:`numpy.random.default_rng`, derived from this stream's key."""
        return splitmix64(self.key ^ 0x5EED)


def as_stream(rng) -> Stream:
    if isinstance(rng, Stream):
        return rng
    if rng is None:
        return Stream(0)
    return Stream(int(rng))
