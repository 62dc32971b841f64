"""Seedable deterministic random number generator.

Every piece of randomness in this package (parameter initialization,
dataset shuffling, template sampling, digit runs) flows through this
generator so that a run is reproducible bit-for-bit from its seed, on
any platform and interpreter.  The implementation is pure 64-bit integer
arithmetic: xoshiro256** (Blackman & Vigna) seeded via splitmix64.

Documented constants:

* splitmix64: increment ``0x9E3779B97F4A7C15``; mixing multipliers
  ``0xBF58476D1CE4E5B9`` and ``0x94D049BB133111EB``; shifts 30, 27, 31.
* xoshiro256**: output ``rotl64(s1 * 5, 7) * 9``; state update uses
  ``t = s1 << 17``, xors between lanes, and ``s3 = rotl64(s3, 45)``.

Floats in [0, 1) take the top 53 bits of one 64-bit output.
"""

from __future__ import annotations

from bisect import bisect_right

_MASK64 = (1 << 64) - 1

_SM64_INC = 0x9E3779B97F4A7C15
_SM64_MUL1 = 0xBF58476D1CE4E5B9
_SM64_MUL2 = 0x94D049BB133111EB


def _rotl64(x, k):
    return ((x << k) | (x >> (64 - k))) & _MASK64


def splitmix64_stream(seed, n):
    """Return the first `n` outputs of splitmix64 for `seed`."""
    out = []
    state = seed & _MASK64
    for _ in range(n):
        state = (state + _SM64_INC) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * _SM64_MUL1) & _MASK64
        z = ((z ^ (z >> 27)) * _SM64_MUL2) & _MASK64
        out.append(z ^ (z >> 31))
    return out


class Rng:
    """xoshiro256** generator with convenience sampling helpers."""

    def __init__(self, seed):
        self._s = splitmix64_stream(int(seed), 4)

    def next_u64(self):
        """Next raw 64-bit unsigned output."""
        s0, s1, s2, s3 = self._s
        result = (_rotl64((s1 * 5) & _MASK64, 7) * 9) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl64(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def random(self):
        """Float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, low, high):
        """Float in [low, high)."""
        return low + (high - low) * self.random()

    def randint(self, n):
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("randint bound must be positive")
        limit = ((1 << 64) // n) * n
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def shuffle(self, items):
        """In-place Fisher-Yates shuffle; returns the same list."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def sample_indices(self, n, k):
        """k distinct indices drawn without replacement from range(n)."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        pool = list(range(n))
        for i in range(k):
            j = i + self.randint(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def weighted_index(self, cumulative):
        """Index drawn proportionally to weights given as cumulative sums."""
        if not cumulative:
            raise ValueError("cumulative weights must be non-empty")
        total = cumulative[-1]
        if total <= 0:
            raise ValueError("weights must sum to a positive value")
        r = self.random() * total
        i = bisect_right(cumulative, r)
        return min(i, len(cumulative) - 1)
