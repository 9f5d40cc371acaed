"""Deterministic 64-bit pseudorandom stream (SplitMix64).

The generator is fully defined by three constants, so any implementation in
any language produces the same words for the same seed. That matters here:
the receiver regenerates the scrambling sequences from the password alone.

Scalar accessors (:meth:`PrnStream.next_raw` and friends) use Python integers;
the vector accessors compute the same words with wrapping ``uint64`` numpy
arithmetic and advance the stream by exactly the number of words consumed.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

_TWO_NEG64 = 2.0**-64
# largest double below 1.0; word-to-float rounding can otherwise reach 1.0
_BELOW_ONE = 1.0 - 2.0**-53


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


class PrnStream:
    """Single-owner SplitMix64 stream.

    Parameters
    ----------
    key : int
        Nonnegative seed; reduced modulo 2**64.

    Notes
    -----
    Not thread safe. Give each thread its own stream.
    """

    __slots__ = ("state", "draws")

    def __init__(self, key: int = 0):
        if key < 0:
            raise ValueError("seed must be nonnegative")
        self.state = int(key) & MASK64
        self.draws = 0

    def __repr__(self) -> str:
        return f"PrnStream(state=0x{self.state:016x}, draws={self.draws})"

    def next_raw(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        self.draws += 1
        return mix64(self.state)

    def next_unit(self) -> float:
        return min(self.next_raw() * _TWO_NEG64, _BELOW_ONE)

    def next_symmetric(self) -> float:
        """Uniform value in [-1, 1): ``2 * raw / 2**64 - 1``."""
        return 2.0 * self.next_unit() - 1.0

    def raw_vector(self, n: int) -> np.ndarray:
        """The next ``n`` raw words as a ``uint64`` array."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        steps = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(self.state) + steps * np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
        z ^= z >> np.uint64(31)
        self.state = (self.state + n * GOLDEN_GAMMA) & MASK64
        self.draws += n
        return z

    def unit_vector(self, n: int) -> np.ndarray:
        """``n`` unit-uniform values in [0, 1)."""
        u = self.raw_vector(n).astype(np.float64) * _TWO_NEG64
        return np.minimum(u, _BELOW_ONE)

    def symmetric_vector(self, n: int) -> np.ndarray:
        return 2.0 * self.unit_vector(n) - 1.0

    def noise_vector(self, n: int, amplitude: float = 1.0) -> np.ndarray:
        """``amplitude * next_symmetric()`` for ``n`` consecutive draws."""
        if amplitude < 0:
            raise ValueError("amplitude must be nonnegative")
        return amplitude * self.symmetric_vector(n)

    def gaussian_vector(self, n: int) -> np.ndarray:
        """Standard normal samples by Box-Muller on consecutive uniform pairs.

        Both outputs of every pair are used, in the order ``r cos, r sin``.
        ``2 * ceil(n / 2)`` words are consumed; an odd trailing value is dropped.
        """
        pairs = (n + 1) // 2
        u = self.unit_vector(2 * pairs).reshape(pairs, 2)
        radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        angle = 2.0 * np.pi * u[:, 1]
        out = np.empty((pairs, 2))
        out[:, 0] = radius * np.cos(angle)
        out[:, 1] = radius * np.sin(angle)
        return out.reshape(-1)[:n]


def seed(key: int) -> PrnStream:
    return PrnStream(key)


def noise_vector(stream: PrnStream, n: int, amplitude: float = 1.0) -> np.ndarray:
    return stream.noise_vector(n, amplitude)
