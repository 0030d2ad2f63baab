"""Deterministic random primitives shared across the toolkit.

All seeded behavior (embedding init, negative sampling, batch shuffling,
hashed baseline rows) draws from splitmix64 so results are bit-exact across
runs and platforms. Token-keyed streams are seeded with FNV-1a-64.
"""

_MASK64 = (1 << 64) - 1

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(text: str) -> int:
    """FNV-1a 64-bit hash of the UTF-8 encoding of ``text``."""
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


class SplitMix64:
    """splitmix64 generator (Steele et al.); 64-bit state, 64-bit output."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_unit(self) -> float:
        """Uniform float in [0, 1)."""
        return self.next_u64() / 2.0**64

    def next_below(self, bound: int) -> int:
        """Uniform integer in [0, bound)."""
        return self.next_u64() % bound


def fisher_yates(n: int, rng: SplitMix64) -> list[int]:
    """Deterministic permutation of range(n) driven by ``rng``."""
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.next_below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm
