"""Fixed-length utterance features: the pitch method plus four baselines.

=========  ======  ===================================================
method     length  contents
=========  ======  ===================================================
pitch      5       mean/std/median voiced f0, voiced fraction, mean confidence
stats      6       mean, variance, std, skewness, excess kurtosis, mean |x|
lpc        12      frame-averaged order-12 predictor coefficients
zcr        2       mean and std of per-frame zero-crossing rate
fft        64      log mean magnitude spectrum pooled into 64 bands
=========  ======  ===================================================
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sp_fft

from .audio import Signal, resample
from .errors import DegenerateFrame, EmptyInput, EmptyTrack, InvalidConfig
from .pitch import FrameConfig, PitchTrack, autocorr, extract_pitch

METHODS = ("pitch", "stats", "lpc", "zcr", "fft")
DIMENSIONS = {"pitch": 5, "stats": 6, "lpc": 12, "zcr": 2, "fft": 64}
LPC_ORDER = 12
FFT_BINS = 64
FEATURE_NAMES = {
    "pitch": ("f0_mean", "f0_std", "f0_median", "voiced_fraction", "confidence_mean"),
    "stats": ("mean", "variance", "std", "skewness", "excess_kurtosis", "mean_abs"),
    "lpc": tuple(f"a{i}" for i in range(1, LPC_ORDER + 1)),
    "zcr": ("zcr_mean", "zcr_std"),
    "fft": tuple(f"band{i:02d}" for i in range(FFT_BINS)),
}


@dataclass
class FeatureVector:
    method: str
    values: np.ndarray
    n_samples: int = 0
    sample_rate: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if self.method not in METHODS:
            raise InvalidConfig(f"unknown feature method {self.method!r}")

    def __len__(self) -> int:
        return self.values.size


def _prepare(signal: Signal, cfg: FrameConfig) -> np.ndarray:
    if len(signal) == 0:
        raise EmptyInput("empty signal")
    if signal.sample_rate != cfg.sample_rate:
        signal = resample(signal, cfg.sample_rate)
    return signal.samples


def _frames(x: np.ndarray, cfg: FrameConfig) -> np.ndarray:
    """Analysis frames; a signal shorter than one frame becomes one zero-padded frame."""
    if x.size < cfg.frame_len:
        return np.pad(x, (0, cfg.frame_len - x.size))[None, :]
    return np.lib.stride_tricks.sliding_window_view(x, cfg.frame_len)[:: cfg.hop]


def pitch_features(track: PitchTrack) -> FeatureVector:
    if len(track) == 0:
        raise EmptyTrack("pitch track has no frames")
    voiced = track.voiced
    if not voiced.any():
        return FeatureVector("pitch", np.zeros(5), sample_rate=track.sample_rate)
    f0 = track.f0[voiced]
    values = [f0.mean(), f0.std(), np.median(f0), voiced.mean(), track.confidence[voiced].mean()]
    return FeatureVector("pitch", values, sample_rate=track.sample_rate)


def stat_features(signal: Signal) -> FeatureVector:
    x = np.asarray(signal.samples, dtype=np.float64)
    if x.size == 0:
        raise EmptyInput("empty signal")
    mean = x.mean()
    centered = x - mean
    var = float(np.mean(centered**2))
    std = np.sqrt(var)
    if var > 0:
        skew = np.mean(centered**3) / var**1.5
        kurt = np.mean(centered**4) / var**2 - 3.0
    else:
        skew = kurt = 0.0
    values = [mean, var, std, skew, kurt, np.mean(np.abs(x))]
    return FeatureVector("stats", values, x.size, signal.sample_rate)


def levinson_durbin(r, order: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Solve the normal equations for an order-``order`` linear predictor.

    Parameters
    ----------
    r : array_like
        Autocorrelation ``r[0..order]`` with ``r[0] > 0``.
    order : int
        Predictor order.

    Returns
    -------
    a : ndarray
        Predictor coefficients, ``x[n] ~ sum_i a[i] x[n-1-i]``.
    k : ndarray
        Reflection coefficients, ``|k| <= 1`` for a valid autocorrelation.
    err : float
        Final prediction error power.
    """
    r = np.asarray(r, dtype=np.float64)
    if r[0] <= 0:
        raise DegenerateFrame("zero-energy frame")
    a = np.zeros(order)
    k = np.zeros(order)
    err = r[0]
    for i in range(order):
        acc = r[i + 1] - np.dot(a[:i], r[i:0:-1])
        ki = acc / err if err > 0 else 0.0
        k[i] = ki
        a[:i] = a[:i] - ki * a[:i][::-1]
        a[i] = ki
        err *= 1.0 - ki * ki
    return a, k, float(err)


def lpc_features(signal: Signal, order: int = LPC_ORDER, cfg: FrameConfig | None = None) -> FeatureVector:
    """Order-``order`` LPC averaged over frames above the energy floor."""
    cfg = cfg or FrameConfig()
    x = _prepare(signal, cfg)
    window = np.hamming(cfg.frame_len)
    coeffs = []
    for frame in _frames(x, cfg):
        if np.mean(frame**2) <= cfg.energy_floor:
            continue
        r = autocorr(frame * window, order)
        if r[0] <= 0:
            continue
        a, _, _ = levinson_durbin(r, order)
        coeffs.append(a)
    if not coeffs:
        raise DegenerateFrame("every frame is below the energy floor")
    return FeatureVector("lpc", np.mean(coeffs, axis=0), x.size, cfg.sample_rate)


def zero_crossing_rate(frame) -> float:
    s = np.asarray(frame) >= 0
    return float(np.count_nonzero(s[1:] != s[:-1])) / (s.size - 1)


def zcr_features(signal: Signal, cfg: FrameConfig | None = None) -> FeatureVector:
    cfg = cfg or FrameConfig()
    x = _prepare(signal, cfg)
    rates = np.array([zero_crossing_rate(f) for f in _frames(x, cfg)])
    return FeatureVector("zcr", [rates.mean(), rates.std()], x.size, cfg.sample_rate)


def fft_features(signal: Signal, bins: int = FFT_BINS, cfg: FrameConfig | None = None) -> FeatureVector:
    """Log of the frame-averaged magnitude spectrum, mean-pooled into ``bins`` bands."""
    cfg = cfg or FrameConfig()
    x = _prepare(signal, cfg)
    nfft = 1 << (cfg.frame_len - 1).bit_length()
    frames = _frames(x, cfg) * np.hamming(cfg.frame_len)
    mag = np.abs(sp_fft.rfft(frames, nfft, axis=1)).mean(axis=0)
    logmag = np.log1p(mag)
    freqs = np.arange(mag.size) * cfg.sample_rate / nfft
    band = np.minimum((freqs / (cfg.sample_rate / 2) * bins).astype(int), bins - 1)
    sums = np.bincount(band, weights=logmag, minlength=bins)
    counts = np.bincount(band, minlength=bins)
    values = np.divide(sums, counts, out=np.zeros(bins), where=counts > 0)
    return FeatureVector("fft", values, x.size, cfg.sample_rate)


def extract(signal: Signal, method: str, cfg: FrameConfig | None = None) -> FeatureVector:
    """Feature vector of ``signal`` for one of :data:`METHODS`."""
    cfg = cfg or FrameConfig()
    if method == "pitch":
        x = _prepare(signal, cfg)
        padded = Signal(np.pad(x, (0, max(0, cfg.frame_len - x.size))), cfg.sample_rate)
        vec = pitch_features(extract_pitch(padded, cfg))
        vec.n_samples = x.size
        return vec
    if method == "stats":
        return stat_features(signal)
    if method == "lpc":
        return lpc_features(signal, cfg=cfg)
    if method == "zcr":
        return zcr_features(signal, cfg)
    if method == "fft":
        return fft_features(signal, cfg=cfg)
    raise InvalidConfig(f"unknown feature method {method!r}; expected one of {METHODS}")
