"""Counter-keyed random streams.

Every particle step draws from its own stream derived from
``(run seed, particle index, step index)``, so a run is bit-reproducible no
matter how particles are scheduled across workers.  The draw index is the
position within that per-step stream.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Stream tags for machinery that draws outside any particle.
RESAMPLE_STREAM = 0x5E5A  # resampling barrier
INPUT_STREAM = 0x1297  # benchmark input/truth generation


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix_key(*parts: int) -> int:
    """Fold integer key parts into one 64-bit stream key."""
    h = 0x243F6A8885A308D3
    for p in parts:
        h = _splitmix64((h ^ (int(p) & _MASK)) & _MASK)
    return h


class StreamRng:
    """A small deterministic generator over a splitmix64 stream.

    Uniform/normal draws are implemented directly; draws from richer families
    go through a lazily created numpy Generator seeded from the stream, which
    keeps them deterministic without paying the Generator setup cost on the
    hot path.
    """

    __slots__ = ("_state", "_spare_normal")

    def __init__(self, *key_parts: int):
        self._state = mix_key(*key_parts)
        self._spare_normal = None

    def u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        # 53-bit mantissa in [0, 1)
        return (self.u64() >> 11) * (1.0 / 9007199254740992.0)

    def normal(self) -> float:
        spare = self._spare_normal
        if spare is not None:
            self._spare_normal = None
            return spare
        # Box-Muller; u1 bounded away from 0 so log stays finite
        u1 = (self.u64() >> 11) * (1.0 / 9007199254740992.0)
        u2 = (self.u64() >> 11) * (1.0 / 9007199254740992.0)
        r = math.sqrt(-2.0 * math.log(1.0 - u1))
        theta = 2.0 * math.pi * u2
        self._spare_normal = r * math.sin(theta)
        return r * math.cos(theta)

    def gauss(self, mean: float, variance: float) -> float:
        return mean + math.sqrt(variance) * self.normal()

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p

    def np_gen(self) -> np.random.Generator:
        """Fresh numpy Generator advancing this stream by one draw."""
        return np.random.Generator(np.random.PCG64(self.u64()))
