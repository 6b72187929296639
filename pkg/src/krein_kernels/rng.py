"""Portable 64-bit PRNG used for every seeded draw in the package.

SplitMix64 (Steele, Lea, Flood). One step::

    state = (state + 0x9E3779B97F4A7C15) mod 2**64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    return z ^ (z >> 31)

Uniform doubles take the top 53 bits: ``(next() >> 11) * 2**-53``.
Normals use Box-Muller on two consecutive uniforms (cosine branch only, so
each normal consumes exactly two draws). Any language implementing these
three rules reproduces the same streams.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MUL1) & _MASK
        z = ((z ^ (z >> 27)) * _MUL2) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)
        return lo + (hi - lo) * u

    def normal(self) -> float:
        u1 = self.uniform()
        u2 = self.uniform()
        # u1 in [0,1); shift away from 0 for the log
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)

    def normals(self, shape) -> np.ndarray:
        n = int(np.prod(shape))
        return np.array([self.normal() for _ in range(n)]).reshape(shape)

    def complex_normals(self, shape) -> np.ndarray:
        re = self.normals(shape)
        im = self.normals(shape)
        return (re + 1j * im) / math.sqrt(2.0)

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        return lo + int(self.uniform() * (hi - lo + 1))

    def spawn(self) -> "SplitMix64":
        """Independent child stream seeded from this one."""
        return SplitMix64(self.next_u64())

    # domain samplers used by tests and the CLI
    def disk_point(self, rmax: float = 0.9) -> complex:
        r = rmax * math.sqrt(self.uniform())
        t = 2.0 * math.pi * self.uniform()
        return complex(r * math.cos(t), r * math.sin(t))

    def halfplane_point(self, re_lo: float = 0.1, re_hi: float = 3.0, im_max: float = 3.0) -> complex:
        return complex(self.uniform(re_lo, re_hi), self.uniform(-im_max, im_max))
