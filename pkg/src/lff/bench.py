"""Front-end cost accounting: analytic multiply-accumulate counts plus wall-clock.

MAC conventions
---------------
* STFT front-ends (``lff-t``, ``lff-b``, ``mel``): ``T * (n_fft/2) * log2(n_fft)``
  complex butterfly operations for the transform plus ``T * N * M`` for the
  dense filterbank product.  These run at the STFT hop of their own config, so
  the conv stride/pool pair of a sweep cell does not change them.
* Conv front-ends: ``M * kernel_len * floor((L - kernel_len) / stride + 1)``;
  gabor counts twice that (cosine and sine kernels).  Pooling and the log are
  not counted.
"""

from __future__ import annotations

import math
import statistics
import time

from . import filterbank as fb
from . import timedomain as td
from .errors import ConfigError
from .formats import config_hash
from .signal_io import SyntheticSpeakerProfile, synth_speaker_utterance
from .stft import StftConfig, spectrum_values
from .trainer import FRONTENDS, canonical_frontend

DEFAULT_PAIRS = ((160, 1), (80, 2), (40, 4))
BENCH_PROFILE = SyntheticSpeakerProfile(
    fundamental_hz=130.0,
    harmonic_amplitudes=(1.0, 0.8, 0.6, 0.5, 0.4, 0.3, 0.25, 0.2),
    spectral_tilt_db_per_octave=-3.0,
    jitter_fraction=0.02,
)

ROW_FIELDS = (
    "frontend", "stride", "pool", "n_samples", "frames", "transform_macs",
    "filter_macs", "total_macs", "median_seconds", "repeats", "config_hash",
)


def stft_macs(n_samples: int, stft: StftConfig, n_filters: int) -> dict:
    frames = stft.n_frames(n_samples)
    transform = frames * (stft.n_fft // 2) * int(math.log2(stft.n_fft))
    filters = frames * stft.n_bins * n_filters
    return {"frames": frames, "transform_macs": transform, "filter_macs": filters,
            "total_macs": transform + filters}


def frontend_macs(name: str, n_samples: int, stride: int, pool: int, n_filters: int = 64,
                  stft: StftConfig = StftConfig(), kernel_len: int = td.DEFAULT_KERNEL_LEN) -> dict:
    name = canonical_frontend(name)
    if name in ("lff-t", "lff-b", "mel"):
        return stft_macs(n_samples, stft, n_filters)
    conv = td.conv_macs(n_samples, kernel_len, stride, n_filters, name)
    return {"frames": td.output_length(n_samples, kernel_len, stride, pool), "transform_macs": conv,
            "filter_macs": 0, "total_macs": conv}


def _runner(name, n_filters, stft, kernel_len, sample_rate, stride, pool):
    if name in ("sinc", "gabor"):
        init = td.init_sinc if name == "sinc" else td.init_gabor
        params = init(n_filters, sample_rate, kernel_len, stride, pool)
        kernels = td.kernel_bank(params)
        return lambda x: td.frontend_values(x, params, kernels=kernels)
    shape = fb.FilterShape.BELL if name == "lff-b" else fb.FilterShape.TRIANGLE
    params = fb.mel_init(n_filters, stft.n_bins, sample_rate, shape)
    return lambda x: fb.apply_filters(spectrum_values(x, stft), params)[0]


def run_bench(sweep: dict, seed: int = 0) -> list:
    """Evaluate every (front-end, stride, pool) cell of ``sweep``.

    Recognized keys: ``frontends``, ``pairs`` (list of [stride, pool]),
    ``repeats`` (0 skips timing), ``duration_s``, ``sample_rate``,
    ``n_filters``, ``kernel_len``, ``stft`` (StftConfig fields).
    """
    known = {"frontends", "pairs", "repeats", "duration_s", "sample_rate", "n_filters", "kernel_len", "stft"}
    unknown = set(sweep) - known
    if unknown:
        raise ConfigError(f"unknown sweep keys: {sorted(unknown)}")
    names = [canonical_frontend(n) for n in sweep.get("frontends", FRONTENDS)]
    pairs = [tuple(int(v) for v in p) for p in sweep.get("pairs", DEFAULT_PAIRS)]
    if any(len(p) != 2 or min(p) < 1 for p in pairs):
        raise ConfigError("pairs must be [stride, pool] with positive entries")
    repeats = int(sweep.get("repeats", 3))
    sample_rate = int(sweep.get("sample_rate", 16000))
    n_filters = int(sweep.get("n_filters", 64))
    kernel_len = int(sweep.get("kernel_len", td.DEFAULT_KERNEL_LEN))
    stft = StftConfig.from_dict(sweep.get("stft", {}))
    duration = float(sweep.get("duration_s", 60.0))
    digest = config_hash({"sweep": sweep, "seed": seed})

    x = synth_speaker_utterance(BENCH_PROFILE, duration, sample_rate, seed).samples if repeats else None
    rows = []
    n_samples = int(round(duration * sample_rate))
    for name in names:
        for stride, pool in pairs:
            row = {"frontend": name, "stride": stride, "pool": pool, "n_samples": n_samples}
            row.update(frontend_macs(name, n_samples, stride, pool, n_filters, stft, kernel_len))
            seconds = []
            if repeats:
                run = _runner(name, n_filters, stft, kernel_len, sample_rate, stride, pool)
                for _ in range(repeats):
                    t0 = time.perf_counter()
                    run(x)
                    seconds.append(time.perf_counter() - t0)
            row["median_seconds"] = statistics.median(seconds) if seconds else float("nan")
            row["repeats"] = repeats
            row["config_hash"] = digest
            rows.append(row)
    return rows


def write_rows_csv(path, rows) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=ROW_FIELDS)
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
