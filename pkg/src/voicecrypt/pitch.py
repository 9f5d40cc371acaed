"""Noise-robust frame-wise pitch extraction.

Per analysis frame:

1. center-clip the raw frame (clip level = ``clip_ratio * max|frame|``)
2. apply the analysis window
3. short-time autocorrelation ``R`` (lag-shortened sum, ``1/N`` scaling)
   and AMDF ``D`` (normalized by the number of valid terms)
4. weighted score ``W = R / (D + epsilon)``; coarse lag = argmax of ``W`` over
   the lags of the ``[f_min, f_max]`` band, smallest lag on ties
5. step uphill on ``R`` to the autocorrelation peak holding the coarse lag,
   then 3-point Lagrange (parabolic) interpolation on ``R`` around it
6. voicing: frame energy above ``energy_floor`` and normalized
   cross-correlation at the chosen lag above ``voicing_ratio_threshold``

Setting ``score="acf"`` in :class:`FrameConfig` skips the AMDF weighting and
searches ``R`` directly; this is the plain autocorrelation baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import fft as sp_fft

from .audio import WORKING_RATE, Signal, resample
from .errors import InvalidConfig, LagTooLarge, LengthMismatch, PeakAtBoundary, TooShort

WINDOWS = ("hamming", "rectangular")
SCORES = ("weighted", "acf")


@dataclass(frozen=True)
class FrameConfig:
    """Analysis parameters. Sample counts refer to ``sample_rate``."""

    sample_rate: int = WORKING_RATE
    frame_len: int = 300
    max_lag: int = 200
    hop: int = 100
    window: str = "hamming"
    clip_ratio: float = 0.3
    f_min: float = 50.0
    f_max: float = 400.0
    epsilon: float = 1e-6
    voicing_ratio_threshold: float = 0.3
    energy_floor: float = 1e-6
    score: str = "weighted"

    def __post_init__(self):
        if self.window not in WINDOWS:
            raise InvalidConfig(f"window must be one of {WINDOWS}")
        if self.score not in SCORES:
            raise InvalidConfig(f"score must be one of {SCORES}")
        if not 0 <= self.clip_ratio < 1:
            raise InvalidConfig("clip_ratio must lie in [0, 1)")
        if not 0 < self.f_min < self.f_max:
            raise InvalidConfig("need 0 < f_min < f_max")
        if self.epsilon <= 0:
            raise InvalidConfig("epsilon must be positive")
        if not 0 < self.voicing_ratio_threshold < 1:
            raise InvalidConfig("voicing_ratio_threshold must lie in (0, 1)")
        if self.energy_floor < 0:
            raise InvalidConfig("energy_floor must be nonnegative")
        if self.hop < 1 or self.frame_len < 2:
            raise InvalidConfig("hop must be >= 1 and frame_len >= 2")
        lo, hi = self.lag_band
        if lo < 1:
            raise InvalidConfig("f_max is too high for the sample rate")
        if not hi <= self.max_lag <= self.frame_len - 1:
            raise InvalidConfig(
                f"need floor(fs/f_min)={hi} <= max_lag={self.max_lag} <= frame_len-1={self.frame_len - 1}"
            )
        if lo > hi:
            raise InvalidConfig("empty lag band")

    @property
    def lag_band(self) -> tuple[int, int]:
        return (math.ceil(self.sample_rate / self.f_max), math.floor(self.sample_rate / self.f_min))

    def window_array(self) -> np.ndarray:
        if self.window == "hamming":
            return np.hamming(self.frame_len)
        return np.ones(self.frame_len)

    def with_overrides(self, **kw) -> "FrameConfig":
        return replace(self, **kw)


@dataclass(frozen=True)
class PitchFrame:
    start_sample: int
    voiced: bool
    f0: float | None
    confidence: float
    lag: float


@dataclass
class PitchTrack:
    frames: list[PitchFrame] = field(default_factory=list)
    sample_rate: int = WORKING_RATE

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    @property
    def voiced(self) -> np.ndarray:
        return np.array([f.voiced for f in self.frames], dtype=bool)

    @property
    def f0(self) -> np.ndarray:
        """Per-frame f0 in Hz, NaN where unvoiced."""
        return np.array([np.nan if f.f0 is None else f.f0 for f in self.frames])

    @property
    def confidence(self) -> np.ndarray:
        return np.array([f.confidence for f in self.frames])

    @property
    def lags(self) -> np.ndarray:
        return np.array([f.lag for f in self.frames])


def frame_signal(signal: Signal, cfg: FrameConfig) -> np.ndarray:
    """Frames of ``frame_len`` samples starting every ``hop``; partial tail dropped.

    Returns a ``(n_frames, frame_len)`` view. Frame ``i`` starts at ``i * hop``.
    """
    x = np.asarray(signal.samples, dtype=np.float64)
    if x.size < cfg.frame_len:
        raise TooShort(f"signal has {x.size} samples, frame_len is {cfg.frame_len}")
    windows = np.lib.stride_tricks.sliding_window_view(x, cfg.frame_len)
    return windows[:: cfg.hop]


def center_clip(frame, clip_ratio: float) -> np.ndarray:
    """Zero samples inside ``[-C, C]`` and pull the rest toward zero by ``C``."""
    if not 0 <= clip_ratio < 1:
        raise ValueError("clip_ratio must lie in [0, 1)")
    x = np.asarray(frame, dtype=np.float64)
    if x.size == 0:
        return x.copy()
    c = clip_ratio * np.max(np.abs(x))
    return np.sign(x) * np.maximum(np.abs(x) - c, 0.0)


def autocorr(frame, max_lag: int) -> np.ndarray:
    """``R[t] = (1/N) * sum_{n=0}^{N-1-t} x[n] x[n+t]`` for ``t = 0..max_lag``.

    Computed through a zero-padded real FFT.
    """
    x = np.asarray(frame, dtype=np.float64)
    n = x.size
    if max_lag > n - 1 or max_lag < 0:
        raise LagTooLarge(f"max_lag={max_lag} needs a frame of at least {max_lag + 1} samples")
    nfft = sp_fft.next_fast_len(n + max_lag, real=True)
    fx = sp_fft.rfft(x, nfft)
    r = sp_fft.irfft(fx.real**2 + fx.imag**2, nfft)
    return r[: max_lag + 1] / n


def amdf(frame, max_lag: int) -> np.ndarray:
    """``D[t]``: mean of ``|x[n] - x[n-t]|`` over the ``N - t`` valid indices."""
    x = np.asarray(frame, dtype=np.float64)
    n = x.size
    if max_lag > n - 1 or max_lag < 0:
        raise LagTooLarge(f"max_lag={max_lag} needs a frame of at least {max_lag + 1} samples")
    lags = np.arange(max_lag + 1)[:, None]
    delayed = np.arange(n)[None, :] - lags
    valid = delayed >= 0
    diff = np.abs(x[None, :] - x[np.where(valid, delayed, 0)])
    return np.where(valid, diff, 0.0).sum(axis=1) / (n - lags[:, 0])


def weighted_score(R, D, epsilon: float) -> np.ndarray:
    R = np.asarray(R, dtype=np.float64)
    D = np.asarray(D, dtype=np.float64)
    if R.shape != D.shape:
        raise LengthMismatch(f"R has {R.size} lags, D has {D.size}")
    return R / (D + epsilon)


def refine_peak(W, tau_star: int) -> float:
    """Sub-sample peak position from the parabola through three neighbours.

    The offset is clamped to half a sample; a flat triple returns ``tau_star``.
    """
    W = np.asarray(W, dtype=np.float64)
    if not 1 <= tau_star <= W.size - 2:
        raise PeakAtBoundary(f"lag {tau_star} has no neighbour on both sides")
    left, mid, right = W[tau_star - 1], W[tau_star], W[tau_star + 1]
    denom = left - 2.0 * mid + right
    if denom == 0:
        return float(tau_star)
    delta = 0.5 * (left - right) / denom
    return tau_star + min(max(delta, -0.5), 0.5)


def nccf(frame, lag: int) -> float:
    """Normalized cross-correlation of a frame with itself shifted by ``lag``."""
    x = np.asarray(frame, dtype=np.float64)
    a, b = x[: x.size - lag], x[lag:]
    denom = math.sqrt(float(np.dot(a, a)) * float(np.dot(b, b)))
    return float(np.dot(a, b)) / denom if denom > 0 else 0.0


def _climb(R: np.ndarray, tau: int, lo: int, hi: int) -> int:
    while tau < hi and R[tau + 1] > R[tau]:
        tau += 1
    while tau > lo and R[tau - 1] > R[tau]:
        tau -= 1
    return tau


@dataclass(frozen=True)
class FrameAnalysis:
    """Intermediate results for one frame, exposed for inspection and tests."""

    R: np.ndarray
    D: np.ndarray
    W: np.ndarray
    coarse_lag: int
    peak_lag: int
    lag: float
    confidence: float
    periodicity: float
    energy: float


def analyze_frame(frame, cfg: FrameConfig, window: np.ndarray | None = None) -> FrameAnalysis:
    frame = np.asarray(frame, dtype=np.float64)
    if window is None:
        window = cfg.window_array()
    x = center_clip(frame, cfg.clip_ratio) * window
    R = autocorr(x, cfg.max_lag)
    if cfg.score == "weighted":
        D = amdf(x, cfg.max_lag)
        W = weighted_score(R, D, cfg.epsilon)
    else:
        D = np.zeros_like(R)
        W = R
    lo, hi = cfg.lag_band
    coarse = lo + int(np.argmax(W[lo : hi + 1]))
    peak = _climb(R, coarse, lo, hi)
    try:
        lag = refine_peak(R, peak)
    except PeakAtBoundary:
        lag = float(peak)
    confidence = float(np.clip(R[peak] / R[0], 0.0, 1.0)) if R[0] > 0 else 0.0
    return FrameAnalysis(
        R=R, D=D, W=W, coarse_lag=coarse, peak_lag=peak, lag=lag,
        confidence=confidence, periodicity=nccf(x, peak),
        energy=float(np.mean(frame**2)),
    )


def extract_pitch(signal: Signal, cfg: FrameConfig | None = None) -> PitchTrack:
    """Frame-wise f0 track of ``signal`` (resampled to ``cfg.sample_rate`` first)."""
    cfg = cfg or FrameConfig()
    if signal.sample_rate != cfg.sample_rate:
        signal = resample(signal, cfg.sample_rate)
    frames = frame_signal(signal, cfg)
    window = cfg.window_array()
    out = []
    for i, frame in enumerate(frames):
        a = analyze_frame(frame, cfg, window)
        voiced = a.energy > cfg.energy_floor and a.periodicity > cfg.voicing_ratio_threshold
        out.append(PitchFrame(
            start_sample=i * cfg.hop,
            voiced=bool(voiced),
            f0=float(np.clip(cfg.sample_rate / a.lag, cfg.f_min, cfg.f_max)) if voiced else None,
            confidence=a.confidence,
            lag=a.lag,
        ))
    return PitchTrack(out, cfg.sample_rate)
