"""Seedable, portable random number generation.

Everything random in this toolkit flows through SplitMix64 (Steele, Lea &
Flood's 64-bit mixer). The generator is counter-based: output i is a pure
function of (seed, i), so scalar streams and vectorized block generation
produce identical values and results are reproducible across platforms and
process counts.

    state_i = seed + (i + 1) * 0x9E3779B97F4A7C15   (mod 2^64)
    out_i   = mix(state_i)

Normal variates use the inverse-CDF transform (scipy's ndtri) applied to
open-interval uniforms; Pareto variates use the closed-form inverse CDF.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMix64:
    """Stateful scalar view of the SplitMix64 stream for a given seed."""

    def __init__(self, seed: int):
        self.seed = seed & _MASK
        self._state = self.seed

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return _mix(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def randbelow(self, n: int) -> int:
        """Exactly uniform integer in [0, n), by rejection sampling."""
        if n <= 0:
            raise ValueError("randbelow requires n >= 1")
        threshold = ((1 << 64) // n) * n
        while True:
            u = self.next_u64()
            if u < threshold:
                return u % n


def u64_block(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Vectorized outputs i = offset .. offset+count-1 of the seed's stream.

    Matches SplitMix64(seed).next_u64() call-for-call when offset=0.
    """
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    z = (np.uint64(seed & _MASK) + idx * np.uint64(_GOLDEN))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def open_unit_block(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Uniform floats in the open interval (0, 1)."""
    u = u64_block(seed, count, offset)
    return ((u >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def normal_block(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Standard normal variates via the inverse-CDF transform."""
    return ndtri(open_unit_block(seed, count, offset))


def pareto_block(mu: float, x_min: float, seed: int, count: int,
                 offset: int = 0) -> np.ndarray:
    """Pareto variates with density ∝ x^-(mu+1) for x >= x_min.

    Inverse CDF: x = x_min * u^(-1/mu), u uniform in (0, 1).
    """
    u = open_unit_block(seed, count, offset)
    return x_min * u ** (-1.0 / mu)
