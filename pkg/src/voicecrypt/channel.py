"""Transmission impairments and the MSE-versus-SNR sweep.

Channel noise is drawn from its own seed, never from the password keys.
An ``snr_db`` of ``math.inf`` is the noiseless setting and bypasses noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .audio import Signal, resample
from .cipher import CipherText, decrypt, encrypt, mse
from .errors import EmptyInput, InvalidConfig, NoiseTooShort, ZeroPower
from .keys import KeyPair
from .prng import PrnStream

NOISELESS = math.inf
DEFAULT_TRIALS = 20


@dataclass
class ChannelConfig:
    snr_db: float = NOISELESS
    seed: int = 0
    gain: float = 1.0

    def __post_init__(self):
        if not self.gain > 0:
            raise InvalidConfig("gain must be positive")
        if self.seed < 0:
            raise InvalidConfig("seed must be nonnegative")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise InvalidConfig("snr_db must be finite or +inf (noiseless)")


def _power(x: np.ndarray) -> float:
    return float(np.dot(x, x) / x.size)


def awgn(x, snr_db: float, seed: int) -> np.ndarray:
    """Add white Gaussian noise at ``snr_db`` relative to the mean power of ``x``.

    The noise comes from Box-Muller pairs on a SplitMix64 stream seeded with
    ``seed``, so the result is a pure function of its arguments.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise EmptyInput("cannot add noise to an empty array")
    if snr_db == NOISELESS:
        return x.copy()
    power = _power(x)
    if power == 0:
        raise ZeroPower("signal power is zero; SNR is undefined")
    sigma = math.sqrt(power / 10.0 ** (snr_db / 10.0))
    return x + sigma * PrnStream(seed).gaussian_vector(x.size)


def transmit(cipher: CipherText, snr_db: float, seed: int) -> CipherText:
    """Pass a ciphertext through the AWGN channel, keeping its header."""
    noisy = awgn(cipher.coefficients, snr_db, seed)
    return CipherText(noisy, gain=cipher.gain, source_length=cipher.source_length,
                      format_version=cipher.format_version)


def mix_noise_file(x: Signal, noise: Signal, snr_db: float) -> Signal:
    """Add a recorded noise (babble, car, street, ...) at a target SNR.

    The noise is resampled to the rate of ``x``, truncated to its length and
    scaled by ``sqrt(P_x / (P_n * 10**(snr_db / 10)))``.
    """
    if snr_db == NOISELESS:
        return Signal(x.samples.copy(), x.sample_rate)
    if len(x) == 0:
        raise EmptyInput("empty signal")
    n = resample(noise, x.sample_rate).samples
    if n.size < len(x):
        raise NoiseTooShort(f"noise has {n.size} samples after resampling, need {len(x)}")
    n = n[: len(x)]
    px, pn = _power(x.samples), _power(n)
    if px == 0 or pn == 0:
        raise ZeroPower("signal and noise must both have nonzero power")
    return Signal(x.samples + noise_scale(px, pn, snr_db) * n, x.sample_rate)


def noise_scale(signal_power: float, noise_power: float, snr_db: float) -> float:
    return math.sqrt(signal_power / (noise_power * 10.0 ** (snr_db / 10.0)))


def run_mse_sweep(
    signal: Signal,
    keys: KeyPair,
    snr_list,
    trials: int = DEFAULT_TRIALS,
    seed0: int = 0,
    gain: float = 1.0,
) -> list[tuple[float, float]]:
    """Mean decryption MSE per SNR over independently seeded channel draws.

    Trial ``t`` uses channel seed ``seed0 + t``. Rows come back sorted by SNR.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    cipher = encrypt(signal, keys, gain=gain)
    rows = []
    for snr in sorted(float(s) for s in snr_list):
        errors = [
            mse(decrypt(transmit(cipher, snr, seed0 + t), keys, signal.sample_rate).samples,
                signal.samples)
            for t in range(trials)
        ]
        rows.append((snr, float(np.mean(errors))))
    return rows
