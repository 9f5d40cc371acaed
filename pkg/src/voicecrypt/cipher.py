"""Three-level voice template cipher.

Encryption::

    x = samples + PRN(key1)         level 1, time-domain scramble
    y = DCT(x)                      level 2, orthonormal DCT-II
    z = y + PRN(key2)               level 3, transform-domain scramble
    coefficients = gain * z         amplification before transmission

Decryption undoes the levels in reverse order after dividing out the gain.
Each PRN sequence is the symmetric uniform stream of :mod:`voicecrypt.prng`
seeded with the key, at unit amplitude.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np
from scipy import fft as sp_fft

from .audio import WORKING_RATE, Signal
from .errors import BadMagic, EmptyInput, LengthMismatch, NonFinite, TruncatedData
from .keys import KeyPair
from .prng import PrnStream

SCRAMBLE_AMPLITUDE = 1.0
MAGIC = b"VCRY"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQd")  # magic, version, source_length, gain: 24 bytes


@dataclass
class CipherText:
    coefficients: np.ndarray
    gain: float = 1.0
    source_length: int | None = None
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64).reshape(-1)
        if self.source_length is None:
            self.source_length = self.coefficients.size
        if not self.gain > 0:
            raise ValueError("gain must be positive")

    def to_bytes(self) -> bytes:
        head = _HEADER.pack(MAGIC, self.format_version, self.source_length, float(self.gain))
        return head + self.coefficients.astype("<f8").tobytes()

    @classmethod
    def from_bytes(cls, blob: bytes) -> "CipherText":
        if len(blob) < _HEADER.size:
            raise TruncatedData("ciphertext shorter than its 24-byte header")
        magic, version, length, gain = _HEADER.unpack_from(blob)
        if magic != MAGIC:
            raise BadMagic("not a VCRY ciphertext")
        body = blob[_HEADER.size :]
        if len(body) != 8 * length:
            raise TruncatedData(f"header declares {length} coefficients, body holds {len(body) / 8:g}")
        coeffs = np.frombuffer(body, dtype="<f8").astype(np.float64)
        return cls(coeffs, gain=gain, source_length=length, format_version=version)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "CipherText":
        with open(os.fspath(path), "rb") as fh:
            return cls.from_bytes(fh.read())


def _as_array(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise EmptyInput("expected a non-empty 1-D array")
    return x


def dct_forward(x) -> np.ndarray:
    """Orthonormal DCT-II over the whole array."""
    return sp_fft.dct(_as_array(x), type=2, norm="ortho")


def dct_inverse(X) -> np.ndarray:
    """Orthonormal DCT-III, the exact inverse of :func:`dct_forward`."""
    return sp_fft.idct(_as_array(X), type=2, norm="ortho")


def key_streams(keys: KeyPair, n: int) -> tuple[np.ndarray, np.ndarray]:
    """The level-1 and level-3 scrambling sequences for ``n`` samples."""
    n1 = PrnStream(keys.key1).noise_vector(n, SCRAMBLE_AMPLITUDE)
    n2 = PrnStream(keys.key2).noise_vector(n, SCRAMBLE_AMPLITUDE)
    return n1, n2


def encrypt(signal: Signal, keys: KeyPair, gain: float = 1.0) -> CipherText:
    samples = np.asarray(signal.samples, dtype=np.float64)
    if samples.size == 0:
        raise EmptyInput("cannot encrypt an empty signal")
    if not np.all(np.isfinite(samples)):
        raise NonFinite("signal contains NaN or infinite samples")
    if not gain > 0:
        raise ValueError("gain must be positive")
    n1, n2 = key_streams(keys, samples.size)
    z = dct_forward(samples + n1) + n2
    return CipherText(gain * z, gain=gain, source_length=samples.size)


def decrypt(cipher: CipherText, keys: KeyPair, sample_rate: int = WORKING_RATE) -> Signal:
    coeffs = cipher.coefficients
    if coeffs.size == 0:
        raise EmptyInput("cannot decrypt an empty ciphertext")
    if coeffs.size != cipher.source_length:
        raise LengthMismatch(
            f"ciphertext holds {coeffs.size} coefficients but declares {cipher.source_length}"
        )
    n1, n2 = key_streams(keys, coeffs.size)
    y = dct_inverse(coeffs / cipher.gain - n2)
    return Signal(y - n1, sample_rate)


def mse(a, b) -> float:
    """Mean squared difference of two equal-length arrays."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.size != b.size:
        raise LengthMismatch(f"length {a.size} vs {b.size}")
    if a.size == 0:
        raise EmptyInput("mse of empty arrays")
    d = a - b
    return float(np.dot(d, d) / d.size)
