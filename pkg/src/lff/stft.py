"""Framing, windowing and the short-time Fourier transform.

Two routes compute the same one-sided spectrum: ``compute_spectrum`` goes
through ``numpy.fft.rfft`` on windowed, zero-padded frames, while
``compute_spectrum_conv`` correlates the raw signal with a bank of fixed
complex kernels ``window * exp(-2j*pi*k*t/n_fft)`` at stride ``hop``, i.e. the
STFT written as a strided convolution layer.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import formats
from .errors import ConfigError, FormatError, TooShortError
from .signal_io import AudioBuffer

WINDOW_KINDS = ("hann", "hamming", "rectangular")
SPECTRUM_KINDS = ("magnitude", "power")


@dataclass(frozen=True)
class StftConfig:
    window_len_samples: int = 400
    hop_samples: int = 160
    n_fft: int = 1024
    window_kind: str = "hann"
    spectrum_kind: str = "power"

    def __post_init__(self):
        if self.window_len_samples < 1:
            raise ConfigError("window_len_samples must be positive")
        if self.hop_samples < 1:
            raise ConfigError("hop_samples must be >= 1")
        if self.n_fft < 2 or self.n_fft & (self.n_fft - 1):
            raise ConfigError(f"n_fft must be a power of two, got {self.n_fft}")
        if self.window_len_samples > self.n_fft:
            raise ConfigError("window_len_samples must not exceed n_fft")
        if self.window_kind not in WINDOW_KINDS:
            raise ConfigError(f"window_kind must be one of {WINDOW_KINDS}")
        if self.spectrum_kind not in SPECTRUM_KINDS:
            raise ConfigError(f"spectrum_kind must be one of {SPECTRUM_KINDS}")

    @property
    def n_bins(self) -> int:
        """Retained one-sided bins 0..n_fft/2 - 1 (Nyquist dropped)."""
        return self.n_fft // 2

    def n_frames(self, n_samples: int) -> int:
        if n_samples < self.window_len_samples:
            return 0
        return (n_samples - self.window_len_samples) // self.hop_samples + 1

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "StftConfig":
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


@dataclass(frozen=True)
class SpectrumMatrix:
    values: np.ndarray
    config: StftConfig

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]

    @property
    def n_bins(self) -> int:
        return self.values.shape[1]

    def to_bytes(self) -> bytes:
        kind = formats.KIND_POWER if self.config.spectrum_kind == "power" else formats.KIND_MAGNITUDE
        c = self.config
        return formats.matrix_to_bytes(self.values, kind, c.window_len_samples, c.hop_samples, c.n_fft)

    @classmethod
    def from_bytes(cls, blob: bytes, window_kind: str = "hann") -> "SpectrumMatrix":
        values, head = formats.matrix_from_bytes(blob)
        if head.kind == formats.KIND_DB_FEATURES:
            raise FormatError("file holds dB features, not a spectrum")
        cfg = StftConfig(head.window_len, head.hop, head.n_fft, window_kind, formats.KIND_NAMES[head.kind])
        return cls(values, cfg)


def make_window(kind: str, length: int) -> np.ndarray:
    """Periodic (DFT-even) window of ``length`` samples."""
    n = np.arange(length)
    if kind == "hann":
        return 0.5 - 0.5 * np.cos(2 * np.pi * n / length)
    if kind == "hamming":
        return 0.54 - 0.46 * np.cos(2 * np.pi * n / length)
    if kind == "rectangular":
        return np.ones(length)
    raise ConfigError(f"unknown window kind {kind!r}")


def _samples(audio) -> np.ndarray:
    if isinstance(audio, AudioBuffer):
        return audio.samples
    return np.asarray(audio, dtype=np.float64)


def frame_signal(audio, config: StftConfig) -> np.ndarray:
    """Return a (T, w) read-only view; frame j starts at sample j*hop."""
    x = _samples(audio)
    w = config.window_len_samples
    if x.shape[-1] < w:
        raise TooShortError(f"signal of {x.shape[-1]} samples is shorter than one {w}-sample window")
    return sliding_window_view(x, w, axis=-1)[..., :: config.hop_samples, :]


def stft_complex(audio, config: StftConfig, full: bool = False) -> np.ndarray:
    """Complex STFT coefficients, (T, n_fft/2) or (T, n_fft) if ``full``."""
    frames = frame_signal(audio, config) * make_window(config.window_kind, config.window_len_samples)
    if full:
        return np.fft.fft(frames, n=config.n_fft, axis=-1)
    return np.fft.rfft(frames, n=config.n_fft, axis=-1)[..., : config.n_bins]


def _finish(coeffs: np.ndarray, config: StftConfig) -> np.ndarray:
    if config.spectrum_kind == "power":
        return coeffs.real**2 + coeffs.imag**2
    return np.abs(coeffs)


def spectrum_values(audio, config: StftConfig) -> np.ndarray:
    """Like ``compute_spectrum`` but returns the bare array; accepts batched (B, L) input."""
    return _finish(stft_complex(audio, config), config)


def compute_spectrum(audio, config: StftConfig = StftConfig()) -> SpectrumMatrix:
    return SpectrumMatrix(spectrum_values(audio, config), config)


def stft_kernels(config: StftConfig) -> np.ndarray:
    """Complex kernel bank of shape (w, n_bins): column k is window * exp(-2j*pi*k*t/n_fft)."""
    t = np.arange(config.window_len_samples)[:, None]
    k = np.arange(config.n_bins)[None, :]
    window = make_window(config.window_kind, config.window_len_samples)[:, None]
    return window * np.exp(-2j * np.pi * k * t / config.n_fft)


def compute_spectrum_conv(audio, config: StftConfig = StftConfig()) -> SpectrumMatrix:
    """STFT via strided correlation with the complex kernel bank (slow, for checking)."""
    x = _samples(audio)
    if x.shape[0] < config.window_len_samples:
        raise TooShortError(f"signal of {x.shape[0]} samples is shorter than one window")
    kernels = stft_kernels(config)
    n_frames = config.n_frames(x.shape[0])
    out = np.empty((n_frames, config.n_bins), dtype=np.complex128)
    for k in range(config.n_bins):
        # correlation == convolution with the time-reversed kernel
        re = np.convolve(x, kernels[::-1, k].real, mode="valid")[:: config.hop_samples]
        im = np.convolve(x, kernels[::-1, k].imag, mode="valid")[:: config.hop_samples]
        out[:, k] = re + 1j * im
    return SpectrumMatrix(_finish(out, config), config)
