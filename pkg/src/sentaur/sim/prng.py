"""Deterministic stimulus PRNG.

xorshift64* with 64-bit state: three xorshifts (>>12, <<25, >>27)
followed by multiplication with 0x2545F4914F6CDD1D; the high 32 bits of
the product are the output word. Seeds reproduce exactly across
implementations and platforms. Seed 0 maps to 1 (the all-zero state is
a fixed point of xorshift).
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D


class Xorshift64Star:
    def __init__(self, seed: int):
        self.state = (seed & _MASK64) or 1

    def next_u32(self) -> int:
        x = self.state
        x ^= (x >> 12)
        x = (x ^ (x << 25)) & _MASK64
        x ^= (x >> 27)
        self.state = x
        return ((x * _MULT) & _MASK64) >> 32

    def next_u64(self) -> int:
        return (self.next_u32() << 32) | self.next_u32()

    def next_in_range(self, lo: int, hi: int) -> int:
        """Uniform-ish draw in [lo, hi] via 64-bit modulo reduction."""
        if hi < lo:
            raise ValueError("empty range")
        span = hi - lo + 1
        return lo + (self.next_u64() % span)

    def next_bits(self, width: int) -> int:
        """width random bits (any width >= 1)."""
        value = 0
        produced = 0
        while produced < width:
            value = (value << 32) | self.next_u32()
            produced += 32
        return value & ((1 << width) - 1)
