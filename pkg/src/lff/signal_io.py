"""WAV ingestion and deterministic synthetic test signals."""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, EmptyInputError, FormatError, UnsupportedFormatError

PCM_SCALE = 32768.0
PEAK_LEVEL = 0.9
MAX_JITTER = 0.05

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True)
class AudioBuffer:
    """Mono float samples plus their sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {samples.shape}")
        if int(self.sample_rate) <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration(self) -> float:
        return len(self) / self.sample_rate


@dataclass(frozen=True)
class SyntheticSpeakerProfile:
    """Harmonic source standing in for one speaker's voice."""

    fundamental_hz: float
    harmonic_amplitudes: tuple = field(default=(1.0,))
    spectral_tilt_db_per_octave: float = 0.0
    jitter_fraction: float = 0.0

    def __post_init__(self):
        amps = tuple(float(a) for a in self.harmonic_amplitudes)
        object.__setattr__(self, "harmonic_amplitudes", amps)
        if not self.fundamental_hz > 0:
            raise DomainError("fundamental_hz must be positive")
        if not amps or any(a < 0 for a in amps) or not any(a > 0 for a in amps):
            raise DomainError("harmonic amplitudes must be non-negative with at least one positive")
        if not 0.0 <= self.jitter_fraction <= MAX_JITTER:
            raise DomainError(f"jitter_fraction must lie in [0, {MAX_JITTER}]")

    def highest_harmonic_hz(self) -> float:
        top = max(i for i, a in enumerate(self.harmonic_amplitudes) if a > 0) + 1
        return self.fundamental_hz * top

    def to_dict(self) -> dict:
        d = asdict(self)
        d["harmonic_amplitudes"] = list(self.harmonic_amplitudes)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SyntheticSpeakerProfile":
        known = {"fundamental_hz", "harmonic_amplitudes", "spectral_tilt_db_per_octave", "jitter_fraction"}
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown profile keys: {sorted(unknown)}")
        return cls(**d)


def load_profile(path) -> SyntheticSpeakerProfile:
    with open(path, "r", encoding="utf-8") as fh:
        return SyntheticSpeakerProfile.from_dict(json.load(fh))


def save_profile(profile: SyntheticSpeakerProfile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(profile.to_dict(), fh, indent=2, sort_keys=True)


def _iter_chunks(data: bytes, start: int):
    pos = start
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size and cid != b"data":
            raise FormatError(f"chunk {cid!r} truncated")
        yield cid, body
        pos += 8 + size + (size & 1)


def load_wav(path) -> AudioBuffer:
    """Read a 16-bit PCM RIFF/WAVE file and downmix it to mono.

    Channels are averaged; samples are scaled by 1/32768.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise FormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    pcm = None
    for cid, body in _iter_chunks(data, 12):
        if cid == b"fmt ":
            if len(body) < 16:
                raise FormatError(f"{path}: fmt chunk too short")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            if fmt[0] == _WAVE_FORMAT_EXTENSIBLE and len(body) >= 26:
                subformat = struct.unpack_from("<H", body, 24)[0]
                fmt = (subformat,) + fmt[1:]
        elif cid == b"data":
            pcm = body
            break
    if fmt is None or pcm is None:
        raise FormatError(f"{path}: missing fmt or data chunk")

    tag, channels, rate, _, block_align, bits = fmt
    if tag != _WAVE_FORMAT_PCM:
        raise UnsupportedFormatError(f"{path}: format tag {tag:#x} is not PCM")
    if bits != 16:
        raise UnsupportedFormatError(f"{path}: {bits}-bit samples, only 16-bit supported")
    if channels < 1 or rate < 1 or block_align != 2 * channels:
        raise FormatError(f"{path}: inconsistent fmt chunk")

    n_frames = len(pcm) // block_align
    if n_frames == 0:
        raise EmptyInputError(f"{path}: empty data chunk")
    ints = np.frombuffer(pcm[: n_frames * block_align], dtype="<i2").reshape(n_frames, channels)
    mono = ints.astype(np.float64).mean(axis=1) / PCM_SCALE
    return AudioBuffer(mono, rate)


def synth_tone(freq_hz: float, duration_s: float, sample_rate: int, amplitude: float = 1.0) -> AudioBuffer:
    if not 0 < freq_hz < sample_rate / 2:
        raise DomainError(f"frequency {freq_hz} Hz outside (0, Nyquist={sample_rate / 2})")
    if not duration_s > 0:
        raise DomainError("duration must be positive")
    if not 0 < amplitude <= 1:
        raise DomainError("amplitude must lie in (0, 1]")
    n = int(round(duration_s * sample_rate))
    t = np.arange(n)
    return AudioBuffer(amplitude * np.sin(2 * np.pi * freq_hz * t / sample_rate), sample_rate)


def _cycle_phase(n: int, f0: float, sample_rate: int, jitter: float, rng: np.random.Generator) -> np.ndarray:
    """Phase in cycles of the fundamental, one jittered period at a time."""
    t = np.arange(n) / sample_rate
    if jitter == 0:
        return f0 * t
    n_periods = int(np.ceil(n * f0 / sample_rate)) + 2
    factors = 1.0 + jitter * rng.uniform(-1.0, 1.0, size=n_periods)
    bounds = np.concatenate(([0.0], np.cumsum(1.0 / (f0 * factors))))
    return np.interp(t, bounds, np.arange(n_periods + 1, dtype=np.float64))


def synth_speaker_utterance(
    profile: SyntheticSpeakerProfile, duration_s: float, sample_rate: int, seed: int
) -> AudioBuffer:
    """Render a jittered harmonic complex for ``profile``, peak-normalized to 0.9.

    Jitter is a per-period multiplicative perturbation of the fundamental period,
    drawn from numpy's PCG64 generator seeded with ``seed``.
    """
    if profile.highest_harmonic_hz() >= sample_rate / 2:
        raise DomainError(
            f"harmonic at {profile.highest_harmonic_hz()} Hz is not below Nyquist ({sample_rate / 2})"
        )
    if not duration_s > 0:
        raise DomainError("duration must be positive")
    n = int(round(duration_s * sample_rate))
    rng = np.random.Generator(np.random.PCG64(seed))
    phase = _cycle_phase(n, profile.fundamental_hz, sample_rate, profile.jitter_fraction, rng)

    out = np.zeros(n)
    for h, amp in enumerate(profile.harmonic_amplitudes, start=1):
        if amp == 0:
            continue
        gain = amp * 10.0 ** (profile.spectral_tilt_db_per_octave * np.log2(h) / 20.0)
        out += gain * np.sin(2 * np.pi * h * phase)
    peak = np.max(np.abs(out))
    if peak == 0:
        raise DomainError("profile renders to silence")
    return AudioBuffer(out * (PEAK_LEVEL / peak), sample_rate)


def make_speaker_profiles(n_speakers: int, seed: int, sample_rate: int = 16000,
                          n_harmonics: int = 16) -> list:
    """Draw a reproducible set of distinct synthetic speakers.

    Fundamentals are log-spaced over 90-260 Hz with a small random offset;
    harmonic envelopes, tilt and jitter are random per speaker.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    f0s = np.geomspace(90.0, 260.0, n_speakers) * rng.uniform(0.98, 1.02, n_speakers)
    profiles = []
    for f0 in f0s:
        n_h = int(min(n_harmonics, np.floor((sample_rate / 2 - 1) / f0)))
        amps = rng.uniform(0.1, 1.0, n_h)
        profiles.append(
            SyntheticSpeakerProfile(
                fundamental_hz=float(f0),
                harmonic_amplitudes=tuple(float(a) for a in amps),
                spectral_tilt_db_per_octave=float(rng.uniform(-6.0, -1.0)),
                jitter_fraction=float(rng.uniform(0.005, 0.03)),
            )
        )
    return profiles
