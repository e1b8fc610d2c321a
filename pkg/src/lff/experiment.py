"""Synthetic-speaker experiments and filter-parameter export."""

from __future__ import annotations

import csv
import itertools
import json
from pathlib import Path

import numpy as np

from . import filterbank as fb
from .errors import ConfigError, InvariantError
from .evaluation import Trial, compute_eer, score_trials
from .formats import config_hash
from .signal_io import SyntheticSpeakerProfile, make_speaker_profiles, synth_speaker_utterance
from .stft import StftConfig
from .trainer import FrontEnd, TrainConfig, canonical_frontend, train

FILTER_CSV_FIELDS = (
    "filter_index", "alpha_bins", "beta_bins", "alpha_hz", "bandwidth_hz",
    "mel_alpha_bins", "mel_beta_bins", "mel_alpha_hz", "mel_bandwidth_hz", "config_hash",
)

METRIC_KEYS = ("eer", "threshold", "initial_loss", "final_loss", "mean_abs_delta_beta", "epochs")

DEFAULT_SPEC = {
    "seed": 0,
    "sample_rate": 16000,
    "n_speakers": 10,
    "train_utterances": 20,
    "train_duration_s": 3.0,
    "test_utterances": 3,
    "test_duration_s": 5.0,
    "n_filters": 64,
    "frontends": ["mel", "lff-t"],
    "stft": {},
    "train": {"epochs": 15},
}


def _f32(a) -> np.ndarray:
    return np.asarray(a, dtype=np.float32).astype(np.float64)


def filter_rows(params: fb.FilterBankParams, sample_rate: int) -> list:
    """Learned parameters beside a Mel bank of the same M, N and shape.

    Values are reported at float32 precision, the precision model files store,
    so a freshly Mel-initialized model matches its reference exactly.
    ``bandwidth_hz`` is beta converted to Hz (full base width for triangles,
    sigma for bells).
    """
    ref = fb.mel_init(params.n_filters, params.n_bins, sample_rate, params.shape)
    hz = fb.hz_per_bin(params.n_bins, sample_rate)
    a, b, ra, rb = (_f32(v) for v in (params.alphas, params.betas, ref.alphas, ref.betas))
    return [
        {
            "filter_index": i,
            "alpha_bins": a[i], "beta_bins": b[i], "alpha_hz": a[i] * hz, "bandwidth_hz": b[i] * hz,
            "mel_alpha_bins": ra[i], "mel_beta_bins": rb[i], "mel_alpha_hz": ra[i] * hz,
            "mel_bandwidth_hz": rb[i] * hz,
        }
        for i in range(params.n_filters)
    ]


def write_filter_csv(path, params: fb.FilterBankParams, sample_rate: int, digest: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=FILTER_CSV_FIELDS)
        w.writeheader()
        for row in filter_rows(params, sample_rate):
            row = {k: (repr(float(v)) if isinstance(v, float) else v) for k, v in row.items()}
            row["config_hash"] = digest
            w.writerow(row)


def build_datasets(spec: dict, seed: int) -> tuple:
    """Return (train list [(audio, label)], test {id: audio}, trials)."""
    sr = int(spec["sample_rate"])
    if "profiles" in spec:
        profiles = [SyntheticSpeakerProfile.from_dict(p) for p in spec["profiles"]]
    else:
        profiles = make_speaker_profiles(int(spec["n_speakers"]), seed, sr)
    if len(profiles) < 2:
        raise ConfigError("need at least two speakers")
    # disjoint seed ranges keep train and test renderings independent
    train_set = [
        (synth_speaker_utterance(p, spec["train_duration_s"], sr, seed * 10**7 + 1000 * i + u), i)
        for i, p in enumerate(profiles) for u in range(int(spec["train_utterances"]))
    ]
    test = {
        f"spk{i:03d}_utt{u:02d}": synth_speaker_utterance(p, spec["test_duration_s"], sr,
                                                           seed * 10**7 + 5 * 10**6 + 1000 * i + u)
        for i, p in enumerate(profiles) for u in range(int(spec["test_utterances"]))
    }
    ids = sorted(test)
    trials = [Trial(a, b, a.split("_")[0] == b.split("_")[0]) for a, b in itertools.combinations(ids, 2)]
    return train_set, test, trials


def run_toy_experiment(spec: dict = None, seed: int = None, filter_csv_dir=None) -> dict:
    """Train each listed front-end on synthetic speakers and score held-out trials.

    Held-out utterances come from the training speakers but are rendered with
    unseen seeds.  Returns the metrics dict (also what ``lff toy`` writes).
    """
    merged = dict(DEFAULT_SPEC)
    merged.update(spec or {})
    unknown = set(merged) - set(DEFAULT_SPEC) - {"profiles"}
    if unknown:
        raise ConfigError(f"unknown experiment keys: {sorted(unknown)}")
    seed = int(merged["seed"] if seed is None else seed)
    merged["seed"] = seed
    digest = config_hash(merged)
    stft = StftConfig.from_dict(merged["stft"])
    train_dict = dict(merged["train"])
    train_dict["seed"] = seed
    config = TrainConfig.from_dict(train_dict)
    train_set, test, trials = build_datasets(merged, seed)

    results = {}
    for name in merged["frontends"]:
        name = canonical_frontend(name)
        frontend = FrontEnd(name, int(merged["sample_rate"]), int(merged["n_filters"]), stft,
                            lambda_mix=config.lambda_mix, seed=seed + 3)
        initial_betas = frontend.params.betas.copy() if isinstance(frontend.params, fb.FilterBankParams) else None
        model, history = train(train_set, frontend, config)
        eer, thr = compute_eer(score_trials(trials, test, model))
        if not 0.0 <= eer <= 1.0:
            raise InvariantError(f"EER {eer} outside [0, 1]")
        delta = None
        if initial_betas is not None:
            delta = float(np.mean(np.abs(frontend.params.betas - initial_betas)))
        results[name] = {
            "eer": eer,
            "threshold": thr,
            "initial_loss": history.initial_loss,
            "final_loss": history.losses[-1] if history.epochs else history.initial_loss,
            "mean_abs_delta_beta": delta,
            "epochs": config.epochs,
        }
        if filter_csv_dir is not None and frontend.is_lff:
            write_filter_csv(Path(filter_csv_dir) / f"{name}.filters.csv", frontend.params,
                             frontend.sample_rate, digest)
    return {
        "config_hash": digest,
        "seed": seed,
        "n_speakers": len({label for _, label in train_set}),
        "n_trials": len(trials),
        "frontends": results,
    }


def dump_metrics(metrics: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True)
        fh.write("\n")
