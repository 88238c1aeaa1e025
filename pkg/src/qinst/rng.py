"""Counter-based 64-bit RNG with splittable streams.

Streams are keyed by (seed, *parts); draws are pure functions of the stream
key and a call counter, so parallel harness runs stay deterministic without
shared state.  Strings are folded with blake2b, never the builtin hash.
"""
from __future__ import annotations

import hashlib

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= _M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return (z ^ (z >> 31)) & _M64


def _fold(part) -> int:
    if isinstance(part, int):
        return part & _M64
    if isinstance(part, str):
        return int.from_bytes(
            hashlib.blake2b(part.encode(), digest_size=8).digest(), "big")
    raise TypeError(f"cannot fold {type(part).__name__} into a stream key")


class CounterRng:
    def __init__(self, seed: int, *parts):
        key = mix64(seed * _GOLDEN + 1)
        for p in parts:
            key = mix64(key ^ _fold(p))
        self.key = key
        self.calls = 0

    def next_u64(self) -> int:
        self.calls += 1
        return mix64((self.key + self.calls * _GOLDEN) & _M64)

    def uniform(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def randint(self, n: int) -> int:
        """Uniform in [0, n); small modulo bias is acceptable at this scale."""
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), in ascending order."""
        pool = list(range(n))
        self.shuffle(pool)
        return sorted(pool[:k])
