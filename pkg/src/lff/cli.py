"""Command-line entry point.

    lff extract --frontend <name> --config <path> --in <wav|dir> --out <dir>
    lff export-filters --model <path> --out <csv>
    lff bench --sweep <path> --out <csv>
    lff toy --spec <path> --out <json>
    lff score --model <path> --trials <path> --out <path>

Exit codes: 0 success, 2 user/config error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import filterbank as fb
from . import formats
from .bench import run_bench, write_rows_csv
from .errors import ConfigError, InvariantError, LffError
from .evaluation import compute_eer, score_trial_list, write_scores
from .experiment import dump_metrics, run_toy_experiment, write_filter_csv
from .signal_io import load_wav
from .stft import StftConfig
from .trainer import FrontEnd, canonical_frontend, load_model

log = logging.getLogger("lff")

EXIT_OK, EXIT_USER, EXIT_INTERNAL = 0, 2, 3


def _read_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected a JSON object")
    return data


def _frontend_from_config(name: str, cfg: dict, sample_rate: int) -> FrontEnd:
    known = {"frontend", "n_filters", "stft", "params", "stride", "pool", "kernel_len", "lambda_mix"}
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown extract config keys: {sorted(unknown)}")
    if "frontend" in cfg and canonical_frontend(cfg["frontend"]) != name:
        raise ConfigError(f"config names front-end {cfg['frontend']!r} but --frontend is {name!r}")
    stft = StftConfig.from_dict(cfg.get("stft", {}))
    params = None
    if "params" in cfg:
        if name not in ("lff-t", "lff-b"):
            raise ConfigError("explicit filter params are only accepted for lff-t/lff-b")
        raw = cfg["params"]
        params = fb.FilterBankParams.from_dict(raw if isinstance(raw, dict) else _read_json(raw))
    return FrontEnd(name, sample_rate, int(cfg.get("n_filters", 64)), stft,
                    lambda_mix=float(cfg.get("lambda_mix", 0.0)), stride=int(cfg.get("stride", 160)),
                    pool=int(cfg.get("pool", 1)), kernel_len=int(cfg.get("kernel_len", 401)), params=params)


def cmd_extract(args) -> int:
    name = canonical_frontend(args.frontend)
    cfg = _read_json(args.config)
    src = Path(args.inp)
    if src.is_dir():
        inputs = sorted(p for p in src.iterdir() if p.suffix.lower() == ".wav")
        if not inputs:
            raise ConfigError(f"{src}: no .wav files")
    elif src.is_file():
        inputs = [src]
    else:
        raise ConfigError(f"{src}: no such file or directory")
    audio = [(p, load_wav(p)) for p in inputs]

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    digest = formats.config_hash({"frontend": name, "config": cfg})
    manifest = [f"# frontend {name} config_hash {digest}", "# file frames channels"]
    for path, buf in audio:
        fe = _frontend_from_config(name, cfg, buf.sample_rate)
        feats = fe.features(buf.samples[None])[0][0]
        if not np.all(np.isfinite(feats)):
            raise InvariantError(f"{path}: non-finite features")
        if fe.name in ("sinc", "gabor"):
            window, hop, n_fft = fe.params.kernel_len, fe.params.stride * fe.params.pool, 0
        else:
            window, hop, n_fft = fe.stft.window_len_samples, fe.stft.hop_samples, fe.stft.n_fft
        target = out / (path.stem + ".feat")
        formats.write_matrix(target, feats, formats.KIND_DB_FEATURES, window, hop, n_fft)
        manifest.append(f"{target.name} {feats.shape[0]} {feats.shape[1]}")
    (out / "manifest.txt").write_text("\n".join(manifest) + "\n", encoding="utf-8")
    log.info("wrote %d feature files to %s", len(audio), out)
    return EXIT_OK


def cmd_export_filters(args) -> int:
    model = load_model(args.model)
    if not isinstance(model.frontend.params, fb.FilterBankParams):
        raise ConfigError(f"model front-end {model.frontend.name!r} has no frequency filters")
    digest = formats.bytes_hash(Path(args.model).read_bytes())
    write_filter_csv(args.out, model.frontend.params, model.sample_rate, digest)
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = run_bench(_read_json(args.sweep), seed=args.seed if args.seed is not None else 0)
    write_rows_csv(args.out, rows)
    return EXIT_OK


def cmd_toy(args) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    filter_dir = out.parent / (out.stem + "_filters")
    filter_dir.mkdir(exist_ok=True)
    metrics = run_toy_experiment(_read_json(args.spec), seed=args.seed, filter_csv_dir=filter_dir)
    dump_metrics(metrics, out)
    return EXIT_OK


def cmd_score(args) -> int:
    pairs = score_trial_list(args.trials, load_model(args.model))
    write_scores(args.out, pairs)
    if any(t for _, t in pairs) and not all(t for _, t in pairs):
        eer, _ = compute_eer(pairs)
        log.info("EER %.4f over %d trials", eer, len(pairs))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lff", description="Learnable frequency-filter front-end tools")
    p.add_argument("--seed", type=int, default=None, help="global seed (toy experiments, bench input)")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("extract", help="write feature files for WAV input")
    s.add_argument("--frontend", required=True, help="lff-t | lff-b | mel | sinc | gabor")
    s.add_argument("--config", required=True, help="JSON front-end config")
    s.add_argument("--in", dest="inp", required=True, help="WAV file or directory of WAVs")
    s.add_argument("--out", required=True, help="output directory")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("export-filters", help="dump learned centers/bandwidths beside the Mel reference")
    s.add_argument("--model", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_export_filters)

    s = sub.add_parser("bench", help="stride sweep: MAC counts and wall-clock")
    s.add_argument("--sweep", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_bench)

    s = sub.add_parser("toy", help="train and evaluate on synthetic speakers")
    s.add_argument("--spec", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_toy)

    s = sub.add_parser("score", help="score a trial list with a trained model")
    s.add_argument("--model", required=True)
    s.add_argument("--trials", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_score)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USER
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"lff: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (LffError, OSError) as exc:
        print(f"lff: {exc}", file=sys.stderr)
        return EXIT_USER


if __name__ == "__main__":
    sys.exit(main())
