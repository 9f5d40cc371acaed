"""Synthetic test signals: periodic tones and a toy multi-speaker voice corpus."""

from __future__ import annotations

import numpy as np
from scipy import signal as sps

from .audio import WORKING_RATE, Signal


def sawtooth(f0: float, duration: float = 1.0, fs: int = WORKING_RATE,
             bandwidth: float | None = None, phase: float = 0.0) -> Signal:
    """Band-limited rising sawtooth (harmonic ``k`` at amplitude ``1/k``), peak 1.

    Harmonics stop below ``bandwidth`` (default 0.9 * Nyquist).
    """
    bandwidth = 0.45 * fs if bandwidth is None else bandwidth
    t = np.arange(int(round(duration * fs))) / fs
    x = np.zeros_like(t)
    for k in range(1, int(bandwidth // f0) + 1):
        x += np.sin(2 * np.pi * k * (f0 * t + phase)) / k
    return Signal(x / np.max(np.abs(x)), fs)


def naive_sawtooth(period: int, n: int, fs: int = WORKING_RATE) -> Signal:
    """Exactly periodic (integer ``period``) sawtooth ramp in [-1, 1)."""
    idx = np.arange(n) % period
    return Signal(2.0 * idx / period - 1.0, fs)


def pulse_train(f0: float, duration: float = 1.0, fs: int = WORKING_RATE,
                bandwidth: float = 3000.0) -> Signal:
    """Band-limited pulse train with a raised-cosine harmonic roll-off, peak 1."""
    t = np.arange(int(round(duration * fs))) / fs
    x = np.zeros_like(t)
    for k in range(1, int(bandwidth // f0) + 1):
        x += 0.5 * (1 + np.cos(np.pi * k * f0 / bandwidth)) * np.cos(2 * np.pi * k * f0 * t)
    return Signal(x / np.max(np.abs(x)), fs)


def random_periodic(period: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """A random cycle of ``period`` samples repeated to length ``n``."""
    return rng.uniform(-1.0, 1.0, period)[np.arange(n) % period]


def _resonator(x: np.ndarray, freq: float, bw: float, fs: int) -> np.ndarray:
    r = np.exp(-np.pi * bw / fs)
    theta = 2 * np.pi * freq / fs
    a = [1.0, -2 * r * np.cos(theta), r * r]
    return sps.lfilter([1.0 - r], a, x)


def synthetic_voice(
    f0: float,
    duration: float = 1.0,
    fs: int = WORKING_RATE,
    formants=(500.0, 1500.0, 2500.0),
    jitter: float = 0.02,
    vibrato_hz: float = 5.0,
    noise_level: float = 0.0,
    seed: int = 0,
) -> Signal:
    """A vowel-like utterance: glottal sawtooth source through formant resonators.

    The f0 contour is ``f0 * (1 + jitter * c(t))`` where ``c`` mixes a vibrato
    of random phase with a slow random drift, both in [-1, 1].
    """
    rng = np.random.default_rng(seed)
    n = int(round(duration * fs))
    t = np.arange(n) / fs
    drift = np.interp(t, np.linspace(0, duration, 6), rng.uniform(-1, 1, 6))
    contour = 0.5 * np.sin(2 * np.pi * vibrato_hz * t + rng.uniform(0, 2 * np.pi)) + 0.5 * drift
    inst_f0 = f0 * (1.0 + jitter * contour)
    phase = 2 * np.pi * np.cumsum(inst_f0) / fs
    source = np.zeros(n)
    for k in range(1, int(0.45 * fs // inst_f0.max()) + 1):
        source += np.sin(k * phase) / k
    x = source
    for fc in formants:
        x = _resonator(x, fc, 80.0 + 0.05 * fc, fs) + 0.3 * x
    if noise_level > 0:
        x = x / np.max(np.abs(x)) + noise_level * rng.standard_normal(n)
    return Signal(x / np.max(np.abs(x)), fs)


# f0 (Hz) and formant sets of the five toy speakers
SPEAKERS = {
    "spk_a": (100.0, (450.0, 1300.0, 2400.0)),
    "spk_b": (130.0, (550.0, 1500.0, 2600.0)),
    "spk_c": (160.0, (500.0, 1700.0, 2500.0)),
    "spk_d": (190.0, (650.0, 1400.0, 2700.0)),
    "spk_e": (220.0, (600.0, 1800.0, 2900.0)),
}


def speaker_corpus(n_enroll: int = 3, n_test: int = 3, duration: float = 1.0,
                   fs: int = WORKING_RATE, seed: int = 0):
    """``{speaker: (enroll_signals, test_signals)}`` for the five toy speakers.

    Every utterance gets its own jitter, vibrato phase and drift, so no test
    signal repeats an enrollment signal.
    """
    corpus = {}
    for s_idx, (name, (f0, formants)) in enumerate(SPEAKERS.items()):
        utts = []
        for u in range(n_enroll + n_test):
            useed = seed * 1000 + s_idx * 100 + u
            rng = np.random.default_rng(useed)
            utts.append(synthetic_voice(
                f0 * (1 + rng.uniform(-0.02, 0.02)), duration, fs, formants,
                jitter=rng.uniform(0.01, 0.03), noise_level=0.01, seed=useed,
            ))
        corpus[name] = (utts[:n_enroll], utts[n_enroll:])
    return corpus
