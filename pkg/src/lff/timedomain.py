"""Sinc and Gabor convolution front-ends on raw waveforms.

These are fixed (non-trainable) reference front-ends with Mel-spaced bands,
used for stride/cost comparisons against the spectrum-domain filterbank.
Pipeline: normalize waveform -> strided correlation with every kernel ->
|.| (sinc) or squared quadrature modulus (gabor) -> max-pool -> dB.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ConfigError, DomainError, TooShortError
from .filterbank import EPSILON, FeatureMatrix, hz_to_mel, mel_to_hz
from .signal_io import AudioBuffer

KINDS = ("sinc", "gabor")
DEFAULT_KERNEL_LEN = 401
SINC_MIN_LOW_HZ = 30.0
_CHUNK_FRAMES = 4096


@dataclass
class TimeKernelParams:
    """Per-filter band description for one time-domain front-end.

    For ``kind="sinc"`` ``freq_hz`` holds low cutoffs and ``width`` the band
    widths in Hz; for ``kind="gabor"`` they are center frequencies and the
    Gaussian envelope sigma in seconds.
    """

    kind: str
    freq_hz: np.ndarray
    width: np.ndarray
    sample_rate: int = 16000
    kernel_len: int = DEFAULT_KERNEL_LEN
    stride: int = 160
    pool: int = 1

    def __post_init__(self):
        self.freq_hz = np.array(self.freq_hz, dtype=np.float64)
        self.width = np.array(self.width, dtype=np.float64)
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.freq_hz.ndim != 1 or self.freq_hz.shape != self.width.shape or self.freq_hz.size == 0:
            raise ConfigError("freq_hz and width must be non-empty 1-D arrays of equal length")
        if self.kernel_len < 1 or self.kernel_len % 2 == 0:
            raise ConfigError("kernel_len must be a positive odd integer")
        if self.stride < 1 or self.pool < 1:
            raise ConfigError("stride and pool must be positive")
        nyq = self.sample_rate / 2
        if self.kind == "sinc":
            high = self.freq_hz + self.width
            if np.any(self.freq_hz <= 0) or np.any(self.width <= 0) or np.any(high >= nyq):
                raise DomainError("sinc bands need 0 < low < high < Nyquist")
        else:
            if np.any(self.freq_hz <= 0) or np.any(self.freq_hz >= nyq):
                raise DomainError("gabor centers need 0 < center < Nyquist")
            if np.any(self.width <= 0):
                raise DomainError("gabor sigma must be positive")

    @property
    def n_filters(self) -> int:
        return self.freq_hz.shape[0]

    def to_dict(self) -> dict:
        names = ("low_hz", "band_hz") if self.kind == "sinc" else ("center_hz", "sigma_s")
        return {
            "kind": self.kind,
            "sample_rate": self.sample_rate,
            "kernel_len": self.kernel_len,
            "stride": self.stride,
            "pool": self.pool,
            "n_filters": self.n_filters,
            names[0]: [float(v) for v in self.freq_hz],
            names[1]: [float(v) for v in self.width],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TimeKernelParams":
        kind = d.get("kind")
        names = ("low_hz", "band_hz") if kind == "sinc" else ("center_hz", "sigma_s")
        try:
            return cls(kind, d[names[0]], d[names[1]], int(d.get("sample_rate", 16000)),
                       int(d.get("kernel_len", DEFAULT_KERNEL_LEN)), int(d.get("stride", 160)),
                       int(d.get("pool", 1)))
        except KeyError as exc:
            raise ConfigError(f"missing field {exc}") from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TimeKernelParams":
        return cls.from_dict(json.loads(text))


def _taps(kernel_len: int) -> np.ndarray:
    return np.arange(kernel_len, dtype=np.float64) - kernel_len // 2


def make_sinc_kernel(low_hz: float, high_hz: float, kernel_len: int = DEFAULT_KERNEL_LEN,
                     sample_rate: int = 16000) -> np.ndarray:
    """Hamming-windowed band-pass: difference of two ideal low-pass sincs.

    Uses normalized frequencies, so the center tap equals ``2*(high-low)/sample_rate``.
    """
    if not 0 < low_hz < high_hz < sample_rate / 2:
        raise DomainError(f"need 0 < low ({low_hz}) < high ({high_hz}) < Nyquist ({sample_rate / 2})")
    if kernel_len < 1 or kernel_len % 2 == 0:
        raise ConfigError("kernel_len must be a positive odd integer")
    t = _taps(kernel_len)
    f1, f2 = 2.0 * low_hz / sample_rate, 2.0 * high_hz / sample_rate
    band = f2 * np.sinc(f2 * t) - f1 * np.sinc(f1 * t)
    return band * np.hamming(kernel_len)


def make_gabor_kernel(center_hz: float, sigma_s: float, kernel_len: int = DEFAULT_KERNEL_LEN,
                      sample_rate: int = 16000, quadrature: bool = False) -> np.ndarray:
    """Gaussian-enveloped cosine (or sine, if ``quadrature``), unit envelope peak."""
    if not 0 < center_hz < sample_rate / 2:
        raise DomainError(f"center {center_hz} Hz outside (0, Nyquist)")
    if not sigma_s > 0:
        raise DomainError("sigma must be positive")
    if kernel_len < 1 or kernel_len % 2 == 0:
        raise ConfigError("kernel_len must be a positive odd integer")
    t = _taps(kernel_len) / sample_rate
    envelope = np.exp(-(t**2) / (2.0 * sigma_s**2))
    carrier = np.sin if quadrature else np.cos
    return envelope * carrier(2.0 * np.pi * center_hz * t)


def mel_band_edges(n_filters: int, sample_rate: int, low_hz: float = SINC_MIN_LOW_HZ,
                   high_fraction: float = 0.98) -> np.ndarray:
    """``n_filters + 1`` contiguous band edges equally spaced on the Mel scale."""
    mels = np.linspace(hz_to_mel(low_hz), hz_to_mel(high_fraction * sample_rate / 2), n_filters + 1)
    return mel_to_hz(mels)


def init_sinc(n_filters: int = 64, sample_rate: int = 16000, kernel_len: int = DEFAULT_KERNEL_LEN,
              stride: int = 160, pool: int = 1) -> TimeKernelParams:
    edges = mel_band_edges(n_filters, sample_rate)
    return TimeKernelParams("sinc", edges[:-1], np.diff(edges), sample_rate, kernel_len, stride, pool)


def init_gabor(n_filters: int = 64, sample_rate: int = 16000, kernel_len: int = DEFAULT_KERNEL_LEN,
               stride: int = 160, pool: int = 1) -> TimeKernelParams:
    """Mel-spaced Gabor bank; the Gaussian's half-power width matches each Mel band."""
    edges = mel_band_edges(n_filters, sample_rate)
    centers = mel_to_hz(0.5 * (hz_to_mel(edges[:-1]) + hz_to_mel(edges[1:])))
    sigma_f = np.diff(edges) / (2.0 * np.sqrt(2.0 * np.log(2.0)))
    sigma_s = 1.0 / (2.0 * np.pi * sigma_f)
    return TimeKernelParams("gabor", centers, sigma_s, sample_rate, kernel_len, stride, pool)


def kernel_bank(params: TimeKernelParams) -> np.ndarray:
    """(kernel_len, M) real kernels; gabor banks are (kernel_len, 2M), cosines first."""
    k, sr = params.kernel_len, params.sample_rate
    if params.kind == "sinc":
        cols = [make_sinc_kernel(lo, lo + bw, k, sr) for lo, bw in zip(params.freq_hz, params.width)]
    else:
        cols = [make_gabor_kernel(c, s, k, sr) for c, s in zip(params.freq_hz, params.width)]
        cols += [make_gabor_kernel(c, s, k, sr, quadrature=True) for c, s in zip(params.freq_hz, params.width)]
    return np.stack(cols, axis=1)


def normalize_waveform(x: np.ndarray) -> np.ndarray:
    """Zero mean, unit variance; silent (constant) input is only mean-centered."""
    x = np.asarray(x, dtype=np.float64)
    centered = x - x.mean()
    std = centered.std()
    return centered / std if std > 0 else centered


def output_length(n_samples: int, kernel_len: int, stride: int, pool: int) -> int:
    if n_samples < kernel_len:
        return 0
    return ((n_samples - kernel_len) // stride + 1) // pool


def strided_correlation(x: np.ndarray, kernels: np.ndarray, stride: int) -> np.ndarray:
    """``out[j, i] = sum_k x[j*stride + k] * kernels[k, i]``, computed in frame chunks."""
    frames = sliding_window_view(x, kernels.shape[0])[::stride]
    out = np.empty((frames.shape[0], kernels.shape[1]))
    for start in range(0, frames.shape[0], _CHUNK_FRAMES):
        stop = start + _CHUNK_FRAMES
        out[start:stop] = frames[start:stop] @ kernels
    return out


def frontend_values(samples: np.ndarray, params: TimeKernelParams, epsilon: float = EPSILON,
                    kernels=None) -> np.ndarray:
    x = np.asarray(samples, dtype=np.float64)
    t_out = output_length(x.shape[0], params.kernel_len, params.stride, params.pool)
    if t_out < 1:
        raise TooShortError(
            f"{x.shape[0]} samples give no output frame (kernel {params.kernel_len}, pool {params.pool})"
        )
    if kernels is None:
        kernels = kernel_bank(params)
    resp = strided_correlation(normalize_waveform(x), kernels, params.stride)
    if params.kind == "sinc":
        act = np.abs(resp)
    else:
        m = params.n_filters
        act = resp[:, :m] ** 2 + resp[:, m:] ** 2
    pooled = act[: t_out * params.pool].reshape(t_out, params.pool, -1).max(axis=1)
    return 10.0 * np.log10(pooled + epsilon)


def frontend_forward(audio: AudioBuffer, params: TimeKernelParams, epsilon: float = EPSILON) -> FeatureMatrix:
    if audio.sample_rate != params.sample_rate:
        raise ConfigError(f"audio at {audio.sample_rate} Hz, kernels built for {params.sample_rate} Hz")
    return FeatureMatrix(frontend_values(audio.samples, params, epsilon))


def central_energy_fraction(kernel: np.ndarray) -> float:
    """Share of L2 energy in the middle quarter (2*(K//8)+1 taps) of a kernel."""
    kernel = np.asarray(kernel, dtype=np.float64)
    c, q = kernel.shape[0] // 2, kernel.shape[0] // 8
    energy = kernel**2
    return float(energy[c - q : c + q + 1].sum() / energy.sum())


def demonstrate_scaling_tradeoff(band_hz: float, kernel_len: int = DEFAULT_KERNEL_LEN,
                                 sample_rate: int = 16000) -> dict:
    """Energy concentration of a sinc band-pass of width ``band_hz`` centered at Nyquist/2.

    Wide bands give short, spiky kernels: almost all energy sits in the central
    quarter, so a large stride skips most input samples at low gain.
    """
    nyq = sample_rate / 2
    if not 0 < band_hz < nyq:
        raise DomainError("band must lie in (0, Nyquist)")
    low = (nyq - band_hz) / 2
    kernel = make_sinc_kernel(low, low + band_hz, kernel_len, sample_rate)
    return {"fraction_of_energy_in_central_quarter": central_energy_fraction(kernel)}


def conv_macs(n_samples: int, kernel_len: int, stride: int, n_filters: int, kind: str = "sinc") -> int:
    """Exact multiply-accumulate count of the strided correlation stage."""
    placements = (n_samples - kernel_len) // stride + 1 if n_samples >= kernel_len else 0
    per_filter = 2 if kind == "gabor" else 1
    return per_filter * n_filters * kernel_len * placements
