"""Learnable frequency-domain filterbank.

Each of the ``M`` filters is a unit-peak window over the ``N`` spectrum bins,
fully described by a center ``alpha`` and a width ``beta`` (both in bins):

* triangle: ``max(0, 1 - 2|n - alpha| / beta)``, support ``[alpha - beta/2, alpha + beta/2]``
* bell:     ``exp(-(n - alpha)**2 / (2 beta**2))``

The bank is the ``N x M`` matrix of stacked responses.  Features are
``10*log10(S @ W + eps)`` for a ``T x N`` spectrum ``S``.  ``backward`` gives the
exact gradient of a downstream loss with respect to every ``alpha`` and
``beta``; ``W`` itself is never stored, only rebuilt from the parameters.

Frequency axis convention: the ``N`` retained bins span ``[0, Nyquist]``
linearly, bin ``b`` sitting at ``b * (sr / 2) / (N - 1)`` Hz.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field

import numpy as np

from . import formats
from .errors import ConfigError, ShapeError
from .stft import SpectrumMatrix, StftConfig

BETA_MIN = 0.5
EPSILON = 1e-10
DB_FLOOR = 10.0 * np.log10(EPSILON)
_DB_PER_NEPER = 10.0 / np.log(10.0)


class FilterShape(str, enum.Enum):
    TRIANGLE = "triangle"
    BELL = "bell"


@dataclass
class FilterBankParams:
    alphas: np.ndarray
    betas: np.ndarray
    shape: FilterShape
    n_bins: int

    def __post_init__(self):
        self.alphas = np.array(self.alphas, dtype=np.float64)
        self.betas = np.array(self.betas, dtype=np.float64)
        self.shape = FilterShape(self.shape)
        self.n_bins = int(self.n_bins)
        if self.alphas.ndim != 1 or self.alphas.shape != self.betas.shape:
            raise ShapeError("alphas and betas must be 1-D arrays of equal length")
        if self.alphas.size < 1:
            raise ConfigError("need at least one filter")
        if self.n_bins < 2:
            raise ConfigError("need at least two frequency bins")

    @property
    def n_filters(self) -> int:
        return self.alphas.shape[0]

    def copy(self) -> "FilterBankParams":
        return FilterBankParams(self.alphas.copy(), self.betas.copy(), self.shape, self.n_bins)

    def to_dict(self) -> dict:
        return {
            "shape": self.shape.value,
            "n_bins": self.n_bins,
            "n_filters": self.n_filters,
            "alphas": [float(a) for a in self.alphas],
            "betas": [float(b) for b in self.betas],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FilterBankParams":
        try:
            params = cls(d["alphas"], d["betas"], d["shape"], d["n_bins"])
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"invalid filterbank params: {exc}") from None
        if "n_filters" in d and int(d["n_filters"]) != params.n_filters:
            raise ConfigError("n_filters does not match the parameter arrays")
        return params

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "FilterBankParams":
        return cls.from_dict(json.loads(text))


@dataclass
class ParamGradients:
    d_alpha: np.ndarray
    d_beta: np.ndarray


@dataclass
class FeatureMatrix:
    values: np.ndarray
    params_snapshot: FilterBankParams = None
    stft: StftConfig = field(default=None)

    def to_bytes(self) -> bytes:
        c = self.stft
        w, hop, n_fft = (c.window_len_samples, c.hop_samples, c.n_fft) if c else (0, 0, 0)
        return formats.matrix_to_bytes(self.values, formats.KIND_DB_FEATURES, w, hop, n_fft)


def filter_response(shape, alpha, beta, n):
    """Gain of one filter at bin ``n``; broadcasts over array arguments."""
    shape = FilterShape(shape)
    d = np.asarray(n, dtype=np.float64) - alpha
    if shape is FilterShape.TRIANGLE:
        return np.maximum(0.0, 1.0 - 2.0 * np.abs(d) / beta)
    return np.exp(-(d**2) / (2.0 * np.asarray(beta, dtype=np.float64) ** 2))


def _offsets(params: FilterBankParams) -> np.ndarray:
    return np.arange(params.n_bins, dtype=np.float64)[:, None] - params.alphas[None, :]


def build_weight_matrix(params: FilterBankParams) -> np.ndarray:
    return filter_response(params.shape, params.alphas[None, :], params.betas[None, :],
                           np.arange(params.n_bins)[:, None])


def weight_partials(params: FilterBankParams) -> tuple:
    """Return ``(W, dW/dalpha, dW/dbeta)``, each N x M.

    Triangle kinks (``n == alpha`` and the support edges) get subgradient 0.
    """
    d = _offsets(params)
    beta = params.betas[None, :]
    if params.shape is FilterShape.TRIANGLE:
        r = np.abs(d)
        w = np.maximum(0.0, 1.0 - 2.0 * r / beta)
        inside = (r > 0) & (r < beta / 2)
        d_alpha = np.where(inside, 2.0 * np.sign(d) / beta, 0.0)
        d_beta = np.where(inside, 2.0 * r / beta**2, 0.0)
    else:
        w = np.exp(-(d**2) / (2.0 * beta**2))
        d_alpha = w * d / beta**2
        d_beta = w * d**2 / beta**3
    return w, d_alpha, d_beta


def _spectrum_array(spectrum) -> np.ndarray:
    if isinstance(spectrum, SpectrumMatrix):
        return spectrum.values
    return np.asarray(spectrum, dtype=np.float64)


def apply_filters(spectrum, params: FilterBankParams, epsilon: float = EPSILON) -> tuple:
    """Array-level forward pass.  Returns ``(features, linear_energies)``.

    ``spectrum`` may carry leading batch axes: shape (..., T, N).
    """
    s = _spectrum_array(spectrum)
    if s.shape[-1] != params.n_bins:
        raise ShapeError(f"spectrum has {s.shape[-1]} bins, filterbank expects {params.n_bins}")
    energies = s @ build_weight_matrix(params)
    return 10.0 * np.log10(energies + epsilon), energies


def forward(spectrum, params: FilterBankParams, epsilon: float = EPSILON) -> FeatureMatrix:
    values, _ = apply_filters(spectrum, params, epsilon)
    stft_cfg = spectrum.config if isinstance(spectrum, SpectrumMatrix) else None
    return FeatureMatrix(values, params.copy(), stft_cfg)


def backward(spectrum, params: FilterBankParams, upstream_grad, epsilon: float = EPSILON,
             energies=None) -> ParamGradients:
    """Gradient of ``sum(upstream_grad * forward(spectrum))`` w.r.t. alphas and betas.

    ``energies`` (the pre-log filter outputs) may be passed to skip recomputing them.
    """
    s = _spectrum_array(spectrum)
    g = np.asarray(upstream_grad, dtype=np.float64)
    if s.shape[-1] != params.n_bins:
        raise ShapeError(f"spectrum has {s.shape[-1]} bins, filterbank expects {params.n_bins}")
    if g.shape != s.shape[:-1] + (params.n_filters,):
        raise ShapeError(f"upstream gradient shape {g.shape} does not match forward output")
    w, dw_da, dw_db = weight_partials(params)
    if energies is None:
        energies = s @ w
    g_energy = g * _DB_PER_NEPER / (energies + epsilon)
    grad_w = s.reshape(-1, params.n_bins).T @ g_energy.reshape(-1, params.n_filters)
    return ParamGradients(
        d_alpha=np.sum(grad_w * dw_da, axis=0),
        d_beta=np.sum(grad_w * dw_db, axis=0),
    )


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def hz_per_bin(n_bins: int, sample_rate: int) -> float:
    return (sample_rate / 2.0) / (n_bins - 1)


def mel_init(n_filters: int, n_bins: int, sample_rate: int, shape=FilterShape.TRIANGLE,
             beta_min: float = BETA_MIN) -> FilterBankParams:
    """Place filters as a Mel-scale bank between 0 Hz and Nyquist.

    Triangle widths are the Mel base width (right edge minus left edge);
    bell widths are a quarter of it, so +-2 sigma spans the same support.
    """
    shape = FilterShape(shape)
    if n_filters < 1:
        raise ConfigError("n_filters must be >= 1")
    if n_bins < 2:
        raise ConfigError("n_bins must be >= 2")
    mels = np.linspace(0.0, hz_to_mel(sample_rate / 2.0), n_filters + 2)
    edges = mel_to_hz(mels) / hz_per_bin(n_bins, sample_rate)
    alphas = edges[1:-1]
    base = edges[2:] - edges[:-2]
    betas = base if shape is FilterShape.TRIANGLE else base / 4.0
    if np.any(betas < beta_min):
        raise ConfigError(
            f"{n_filters} filters over {n_bins} bins gives width {betas.min():.3g} < beta_min={beta_min}"
        )
    return FilterBankParams(alphas, betas, shape, n_bins)


def project_params(params: FilterBankParams, beta_min: float = BETA_MIN) -> FilterBankParams:
    """Clamp betas to >= beta_min and alphas to [0, N-1]."""
    return FilterBankParams(
        np.clip(params.alphas, 0.0, params.n_bins - 1),
        np.maximum(params.betas, beta_min),
        params.shape,
        params.n_bins,
    )
