"""Mono PCM WAV input/output, peak normalization and resampling."""

from __future__ import annotations

import os
import wave
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadMagic,
    EmptyInput,
    NonFinite,
    TruncatedData,
    UnsupportedCodec,
    UnsupportedDepth,
)

WORKING_RATE = 10_000


@dataclass
class Signal:
    """Mono samples (nominally in [-1, 1]) with their sample rate in Hz."""

    samples: np.ndarray
    sample_rate: int = WORKING_RATE

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        self.sample_rate = int(self.sample_rate)
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def check_finite(self) -> "Signal":
        if not np.all(np.isfinite(self.samples)):
            raise NonFinite("signal contains NaN or infinite samples")
        return self


@dataclass(frozen=True)
class WavHeader:
    channels: int
    sample_rate: int
    bits_per_sample: int
    data_length: int


def _check_riff(path) -> None:
    with open(path, "rb") as fh:
        head = fh.read(12)
    if len(head) < 12 or head[:4] != b"RIFF" or head[8:12] != b"WAVE":
        raise BadMagic(f"{os.fspath(path)}: not a RIFF/WAVE file")


def read_header(path) -> WavHeader:
    _check_riff(path)
    try:
        with wave.open(os.fspath(path), "rb") as wf:
            return WavHeader(
                channels=wf.getnchannels(),
                sample_rate=wf.getframerate(),
                bits_per_sample=8 * wf.getsampwidth(),
                data_length=wf.getnframes() * wf.getnchannels() * wf.getsampwidth(),
            )
    except wave.Error as exc:
        raise _map_wave_error(path, exc) from exc
    except EOFError as exc:
        raise TruncatedData(f"{os.fspath(path)}: header truncated") from exc


def _map_wave_error(path, exc: wave.Error) -> Exception:
    msg = str(exc)
    if "unknown format" in msg:
        return UnsupportedCodec(f"{os.fspath(path)}: only PCM (format code 1) is supported")
    if "bad sample width" in msg:
        return UnsupportedDepth(f"{os.fspath(path)}: {msg}")
    if "data chunk" in msg or "fmt chunk" in msg:
        return TruncatedData(f"{os.fspath(path)}: {msg}")
    return BadMagic(f"{os.fspath(path)}: {msg}")


def read_wav(path) -> Signal:
    """Read an 8- or 16-bit PCM WAV file as a mono :class:`Signal`.

    16-bit samples map to ``s / 32768`` and unsigned 8-bit samples to
    ``(s - 128) / 128``. Multichannel audio is averaged to mono. Chunks other
    than ``fmt `` and ``data`` are skipped.
    """
    _check_riff(path)
    try:
        with wave.open(os.fspath(path), "rb") as wf:
            channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            nframes = wf.getnframes()
            raw = wf.readframes(nframes)
    except wave.Error as exc:
        raise _map_wave_error(path, exc) from exc
    except EOFError as exc:
        raise TruncatedData(f"{os.fspath(path)}: header truncated") from exc

    if width == 2:
        data = np.frombuffer(raw[: len(raw) // 2 * 2], dtype="<i2").astype(np.float64) / 32768.0
    elif width == 1:
        data = (np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    else:
        raise UnsupportedDepth(f"{os.fspath(path)}: {8 * width}-bit samples are not supported")
    if len(raw) < nframes * channels * width:
        raise TruncatedData(
            f"{os.fspath(path)}: data chunk declares {nframes * channels * width} bytes, found {len(raw)}"
        )
    if channels > 1:
        data = data.reshape(-1, channels).mean(axis=1)
    return Signal(data, rate)


def write_wav(signal: Signal, path) -> None:
    """Write 16-bit mono PCM. Samples are clamped to [-1, 1) before scaling."""
    samples = np.asarray(signal.samples, dtype=np.float64)
    if not np.all(np.isfinite(samples)):
        raise NonFinite("cannot write NaN or infinite samples")
    q = np.clip(np.rint(np.clip(samples, -1.0, 1.0) * 32768.0), -32768, 32767).astype("<i2")
    with wave.open(os.fspath(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(int(signal.sample_rate))
        wf.writeframes(q.tobytes())


def resample(signal: Signal, target_rate: int) -> Signal:
    """Linear-interpolation resampler.

    Output sample ``i`` sits at source position ``i * src_rate / target_rate``;
    positions past the last source sample are not produced.
    """
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == signal.sample_rate:
        return Signal(signal.samples.copy(), signal.sample_rate)
    n = signal.samples.size
    if n == 0:
        return Signal(np.zeros(0), target_rate)
    step = signal.sample_rate / target_rate
    count = int(np.floor((n - 1) / step + 1e-9)) + 1
    positions = np.arange(count) * step
    out = np.interp(positions, np.arange(n), signal.samples)
    return Signal(out, target_rate)


def normalize_peak(signal: Signal) -> Signal:
    """Scale so that ``max|x| == 1``; an all-zero signal is returned unchanged."""
    if signal.samples.size == 0:
        raise EmptyInput("cannot normalize an empty signal")
    peak = np.max(np.abs(signal.samples))
    if peak == 0:
        return Signal(signal.samples.copy(), signal.sample_rate)
    return Signal(signal.samples / peak, signal.sample_rate)


def load(path, rate: int = WORKING_RATE, normalize: bool = True) -> Signal:
    """Read, optionally peak-normalize, and resample to the working rate."""
    sig = read_wav(path)
    if normalize and sig.samples.size:
        sig = normalize_peak(sig)
    return resample(sig, rate)

