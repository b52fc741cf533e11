"""Seed derivation and the splitmix64 stream used by the compiled kernels.

All randomness in the package flows from a single 64-bit base seed.
Work units (trials, resamples, Monte Carlo samples) get independent seeds
via ``derive_seed(base, index)``: XOR the index into the base and apply one
step of splitmix64 (Steele, Lea & Flood 2014).  Because the derivation
depends only on (base, index), work units are order-insensitive and safe to
schedule in parallel.

Data sampling uses numpy's PCG64 seeded with a derived seed; tight loops in
the kernels use splitmix64 itself as the stream generator (its state
advances by a fixed golden-ratio increment, so the pure-python backend can
reproduce the exact same outputs with vectorized uint64 arithmetic).
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
SM_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 output function (finalizer) on a 64-bit state."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base: int, index: int) -> int:
    """Derive the seed for work unit ``index`` from ``base``.

    One splitmix64 step starting from state ``base XOR index``.
    """
    return mix64(((base ^ index) + SM_GAMMA) & _MASK64)


class Splitmix64:
    """Scalar splitmix64 stream; reference implementation for the kernels."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + SM_GAMMA) & _MASK64
        return mix64(self.state)

    def next_double(self) -> float:
        # 53 random bits into [0, 1)
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def next_below(self, bound: int) -> int:
        """Unbiased integer in [0, bound) by rejection on the top residue."""
        threshold = ((1 << 64) - bound) % bound
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % bound


def spawn_generator(base: int, index: int = 0) -> np.random.Generator:
    """numpy Generator (PCG64) seeded for work unit ``index``."""
    return np.random.Generator(np.random.PCG64(derive_seed(base, index)))


def fresh_seed() -> int:
    """Entropy-sourced 64-bit seed for runs where the user gave none."""
    import secrets

    return secrets.randbits(64)
