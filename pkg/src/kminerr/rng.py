"""Counter-based SplitMix64 stream.

Output ``i`` (1-based) of a stream seeded with ``s`` is ``mix(s + i * G)``
modulo 2**64 with ``G = 0x9E3779B97F4A7C15``; this equals the classic
sequential SplitMix64 generator. Uniforms use the top 53 bits,
``(z >> 11) + 0.5`` scaled by ``2**-53``, so they lie strictly in (0, 1).
Normals use Box-Muller on two consecutive uniforms, keeping the cosine
branch only.
"""
import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed, start, count):
    """Raw outputs ``start+1 .. start+count`` as uint64."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed % 2 ** 64) + idx * GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    def __init__(self, seed):
        self.seed = int(seed) % 2 ** 64
        self.position = 0

    def raw(self, count):
        out = splitmix64(self.seed, self.position, count)
        self.position += count
        return out

    def uniform(self, count):
        z = self.raw(count)
        return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53

    def normal(self, count):
        u = self.uniform(2 * count)
        u1, u2 = u[0::2], u[1::2]
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
