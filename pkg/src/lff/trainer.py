"""Desk-scale joint training of a front-end and a small embedding network.

Everything is plain numpy with hand-written backward passes.  A training
step runs front-end -> per-utterance feature normalization -> two
affine+ReLU layers -> mean/std pooling -> affine embedding -> AM-softmax,
then back-propagates into the backbone *and* into the filterbank's
``alpha``/``beta`` (for ``lff-t``/``lff-b``), followed by a projection of the
filter parameters back into their valid range.
"""

from __future__ import annotations

import json
import logging
import math
import struct
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import filterbank as fb
from . import timedomain as td
from .errors import ConfigError, DomainError, FormatError, ShapeError, TooShortError
from .signal_io import AudioBuffer
from .stft import StftConfig, spectrum_values

log = logging.getLogger(__name__)

FRONTENDS = ("lff-t", "lff-b", "mel", "sinc", "gabor")
ALIASES = {"lff": "lff-t", "mel-frozen": "mel"}
NORM_EPS = 1e-5
STD_EPS = 1e-5


def canonical_frontend(name: str) -> str:
    name = ALIASES.get(name, name)
    if name not in FRONTENDS:
        raise ConfigError(f"unknown front-end {name!r}; expected one of {FRONTENDS}")
    return name


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def split_channels(n_channels: int, lambda_mix: float) -> tuple:
    """(lff_channels, cnn_channels) for a mixing ratio; the CNN share rounds half up."""
    if not 0.0 <= lambda_mix < 1.0:
        raise ConfigError("lambda_mix must lie in [0, 1)")
    n_cnn = int(math.floor(lambda_mix * n_channels + 0.5))
    return n_channels - n_cnn, n_cnn


def mix_features(lff_features, cnn_features, lambda_mix: float, n_channels: int) -> np.ndarray:
    """Concatenate LFF channels (first) and CNN channels along the last axis."""
    n_lff, n_cnn = split_channels(n_channels, lambda_mix)
    lff_features = np.asarray(lff_features)
    cnn_features = np.asarray(cnn_features) if cnn_features is not None else None
    if cnn_features is None:
        cnn_features = np.zeros(lff_features.shape[:-1] + (0,))
    if lff_features.shape[-1] != n_lff or cnn_features.shape[-1] != n_cnn:
        raise ShapeError(
            f"expected {n_lff} LFF + {n_cnn} CNN channels, got "
            f"{lff_features.shape[-1]} + {cnn_features.shape[-1]}"
        )
    if lff_features.shape[:-1] != cnn_features.shape[:-1]:
        raise ShapeError("LFF and CNN features disagree on frame count")
    return np.concatenate([lff_features, cnn_features], axis=-1)


class FrontEnd:
    """One of the supported feature extractors, with optional CNN side branch.

    Only ``lff-t``/``lff-b`` filter parameters and the CNN branch are trainable.
    """

    def __init__(self, name: str, sample_rate: int = 16000, n_filters: int = 64,
                 stft: StftConfig = StftConfig(), lambda_mix: float = 0.0, seed: int = 0,
                 stride: int = 160, pool: int = 1, kernel_len: int = td.DEFAULT_KERNEL_LEN,
                 params=None, cnn_weights=None):
        self.name = canonical_frontend(name)
        self.sample_rate = int(sample_rate)
        self.n_filters = int(n_filters)
        self.stft = stft
        self.lambda_mix = float(lambda_mix)
        n_lff, n_cnn = split_channels(self.n_filters, self.lambda_mix)
        if n_cnn and not self.is_lff:
            raise ConfigError("CNN channel mixing is only defined for lff-t/lff-b")
        self.n_lff, self.n_cnn = n_lff, n_cnn

        if params is not None:
            self.params = params
        elif self.name in ("lff-t", "mel"):
            self.params = fb.mel_init(n_lff, stft.n_bins, sample_rate, fb.FilterShape.TRIANGLE)
        elif self.name == "lff-b":
            self.params = fb.mel_init(n_lff, stft.n_bins, sample_rate, fb.FilterShape.BELL)
        elif self.name == "sinc":
            self.params = td.init_sinc(n_filters, sample_rate, kernel_len, stride, pool)
        else:
            self.params = td.init_gabor(n_filters, sample_rate, kernel_len, stride, pool)

        if n_cnn:
            if cnn_weights is None:
                w = stft.window_len_samples
                cnn_weights = _rng(seed).normal(0.0, 1.0 / math.sqrt(w), size=(w, n_cnn))
            self.cnn_weights = np.asarray(cnn_weights, dtype=np.float64)
        else:
            self.cnn_weights = None
        self._kernels = td.kernel_bank(self.params) if self.name in ("sinc", "gabor") else None

    @property
    def is_lff(self) -> bool:
        return self.name in ("lff-t", "lff-b")

    @property
    def trainable(self) -> bool:
        return self.is_lff

    def features(self, segments) -> tuple:
        """Features for a (B, L) batch of waveforms: returns ((B, T, M), cache)."""
        x = np.atleast_2d(np.asarray(segments, dtype=np.float64))
        if self.name in ("sinc", "gabor"):
            feats = np.stack([td.frontend_values(row, self.params, kernels=self._kernels) for row in x])
            return feats, None
        spec = spectrum_values(x, self.stft)
        feats, energies = fb.apply_filters(spec, self.params)
        cache = {"spec": spec, "energies": energies}
        if self.n_cnn:
            normed = np.stack([td.normalize_waveform(row) for row in x])
            frames = sliding_window_view(normed, self.stft.window_len_samples, axis=-1)[
                :, :: self.stft.hop_samples, :
            ]
            cnn = frames @ self.cnn_weights
            feats = mix_features(feats, cnn, self.lambda_mix, self.n_filters)
            cache["frames"] = frames
        return feats, cache

    def backward(self, cache, d_feats) -> dict:
        if not self.trainable:
            return {}
        grads = {}
        d_lff = d_feats[..., : self.n_lff]
        g = fb.backward(cache["spec"], self.params, d_lff, energies=cache["energies"])
        grads["alpha"], grads["beta"] = g.d_alpha, g.d_beta
        if self.n_cnn:
            frames = cache["frames"]
            d_cnn = d_feats[..., self.n_lff :]
            grads["cnn"] = frames.reshape(-1, frames.shape[-1]).T @ d_cnn.reshape(-1, self.n_cnn)
        return grads

    def parameters(self) -> dict:
        if not self.trainable:
            return {}
        p = {"alpha": self.params.alphas, "beta": self.params.betas}
        if self.n_cnn:
            p["cnn"] = self.cnn_weights
        return p

    def project(self) -> None:
        if self.is_lff:
            projected = fb.project_params(self.params)
            self.params.alphas[:] = projected.alphas
            self.params.betas[:] = projected.betas


class ToyBackbone:
    """Frame-wise MLP with mean+std pooling; a stand-in for a TDNN."""

    def __init__(self, n_features: int, hidden: int = 64, embed_dim: int = 32, seed: int = 0,
                 weights: dict = None):
        if weights is None:
            rng = _rng(seed)
            weights = {
                "W1": rng.normal(0.0, math.sqrt(2.0 / n_features), (n_features, hidden)),
                "b1": np.zeros(hidden),
                "W2": rng.normal(0.0, math.sqrt(2.0 / hidden), (hidden, hidden)),
                "b2": np.zeros(hidden),
                "W3": rng.normal(0.0, math.sqrt(1.0 / (2 * hidden)), (2 * hidden, embed_dim)),
                "b3": np.zeros(embed_dim),
            }
        self.weights = {k: np.asarray(v, dtype=np.float64) for k, v in weights.items()}

    @property
    def hidden(self) -> int:
        return self.weights["W1"].shape[1]

    @property
    def embed_dim(self) -> int:
        return self.weights["W3"].shape[1]

    def forward(self, x) -> tuple:
        w = self.weights
        x = np.asarray(x, dtype=np.float64)
        squeeze = x.ndim == 2
        if squeeze:
            x = x[None]
        mu = x.mean(axis=1, keepdims=True)
        xc = x - mu
        inv = 1.0 / np.sqrt((xc**2).mean(axis=1, keepdims=True) + NORM_EPS)
        xn = xc * inv
        z1 = xn @ w["W1"] + w["b1"]
        h1 = np.maximum(z1, 0.0)
        z2 = h1 @ w["W2"] + w["b2"]
        h2 = np.maximum(z2, 0.0)
        m = h2.mean(axis=1)
        hc = h2 - m[:, None, :]
        s = np.sqrt((hc**2).mean(axis=1) + STD_EPS)
        pooled = np.concatenate([m, s], axis=1)
        emb = pooled @ w["W3"] + w["b3"]
        cache = dict(xn=xn, inv=inv, z1=z1, h1=h1, z2=z2, hc=hc, s=s, pooled=pooled)
        return (emb[0] if squeeze else emb), cache

    def backward(self, cache, d_emb) -> tuple:
        """Return (weight gradients, gradient w.r.t. the input features)."""
        w = self.weights
        d_emb = np.atleast_2d(d_emb)
        n_frames = cache["xn"].shape[1]
        hid = self.hidden
        grads = {"W3": cache["pooled"].T @ d_emb, "b3": d_emb.sum(axis=0)}
        d_pooled = d_emb @ w["W3"].T
        d_m, d_s = d_pooled[:, :hid], d_pooled[:, hid:]
        d_h2 = (d_m[:, None, :] + d_s[:, None, :] * cache["hc"] / cache["s"][:, None, :]) / n_frames
        d_z2 = d_h2 * (cache["z2"] > 0)
        grads["W2"] = np.einsum("btk,btj->kj", cache["h1"], d_z2)
        grads["b2"] = d_z2.sum(axis=(0, 1))
        d_z1 = (d_z2 @ w["W2"].T) * (cache["z1"] > 0)
        grads["W1"] = np.einsum("btk,btj->kj", cache["xn"], d_z1)
        grads["b1"] = d_z1.sum(axis=(0, 1))
        d_xn = d_z1 @ w["W1"].T
        xn = cache["xn"]
        d_x = cache["inv"] * (
            d_xn - d_xn.mean(axis=1, keepdims=True) - xn * (d_xn * xn).mean(axis=1, keepdims=True)
        )
        return grads, d_x


def _l2_normalize(v):
    norm = np.sqrt(np.sum(v**2, axis=1, keepdims=True))
    return v / norm, norm


def am_softmax_loss(embeddings, class_weights, labels, scale: float = 30.0, margin: float = 0.2) -> tuple:
    """Additive-margin softmax over cosine logits.

    Returns ``(loss, grad_embeddings, grad_class_weights)`` with gradients taken
    through the row normalizations of both inputs.
    """
    emb = np.atleast_2d(np.asarray(embeddings, dtype=np.float64))
    cw = np.asarray(class_weights, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    n_classes = cw.shape[0]
    if labels.shape[0] != emb.shape[0]:
        raise ShapeError("one label per embedding row required")
    if np.any(labels < 0) or np.any(labels >= n_classes):
        raise DomainError(f"labels must lie in [0, {n_classes})")
    batch = emb.shape[0]

    u, u_norm = _l2_normalize(emb)
    v, v_norm = _l2_normalize(cw)
    cos = u @ v.T
    onehot = np.zeros_like(cos)
    onehot[np.arange(batch), labels] = 1.0
    logits = scale * (cos - margin * onehot)
    logits -= logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(logits).sum(axis=1, keepdims=True))
    log_p = logits - log_z
    loss = -float(np.mean(log_p[np.arange(batch), labels]))

    d_cos = scale * (np.exp(log_p) - onehot) / batch
    d_u = d_cos @ v
    d_v = d_cos.T @ u
    d_emb = (d_u - u * np.sum(u * d_u, axis=1, keepdims=True)) / u_norm
    d_cw = (d_v - v * np.sum(v * d_v, axis=1, keepdims=True)) / v_norm
    return loss, d_emb, d_cw


class CropSampler:
    """Uniform random fixed-length crops driven by a seeded PCG64 stream."""

    def __init__(self, dataset, crop_s: float = 2.0, seed: int = 0):
        self.dataset = dataset
        self.crop_s = crop_s
        self.rng = _rng(seed)

    def crop_len(self, audio: AudioBuffer) -> int:
        return int(round(self.crop_s * audio.sample_rate))

    def offset(self, audio: AudioBuffer) -> int:
        n = self.crop_len(audio)
        if len(audio) < n:
            raise TooShortError(f"utterance of {audio.duration:.3f} s is shorter than {self.crop_s} s")
        return int(self.rng.integers(0, len(audio) - n + 1))

    def crops(self, indices) -> tuple:
        """Return ``(segments (B, L), labels (B,), offsets (B,))`` for the given utterances."""
        segs, labels, offsets = [], [], []
        for i in indices:
            audio, label = self.dataset[i]
            off = self.offset(audio)
            segs.append(audio.samples[off : off + self.crop_len(audio)])
            labels.append(label)
            offsets.append(off)
        return np.stack(segs), np.asarray(labels), np.asarray(offsets)


def train_2s_crop_sampler(dataset, batch: int, seed: int) -> tuple:
    """One batch of 2 s crops from utterances drawn uniformly with replacement."""
    sampler = CropSampler(dataset, 2.0, seed)
    idx = sampler.rng.integers(0, len(dataset), size=batch)
    return sampler.crops(idx)


@dataclass
class TrainConfig:
    loss_scale: float = 30.0
    loss_margin: float = 0.2
    lr: float = 0.01
    epochs: int = 15
    batch: int = 20
    seed: int = 0
    lambda_mix: float = 0.0
    optimizer: str = "sgd"
    momentum: float = 0.9
    lr_milestones: tuple = ()
    lr_decay: float = 0.1
    frontend_lr_scale: float = 50.0  # alpha/beta live in bin units, far larger than weights
    hidden: int = 64
    embed_dim: int = 32
    crop_s: float = 2.0

    def __post_init__(self):
        self.lr_milestones = tuple(int(m) for m in self.lr_milestones)
        if not self.loss_scale > 0:
            raise ConfigError("loss_scale must be positive")
        if not 0 <= self.loss_margin < 1:
            raise ConfigError("loss_margin must lie in [0, 1)")
        if not 0 <= self.lambda_mix < 1:
            raise ConfigError("lambda_mix must lie in [0, 1)")
        if self.optimizer not in ("sgd", "adam"):
            raise ConfigError("optimizer must be 'sgd' or 'adam'")
        if self.epochs < 0 or self.batch < 1 or not self.lr > 0:
            raise ConfigError("epochs >= 0, batch >= 1 and lr > 0 required")

    def lr_at(self, epoch: int) -> float:
        return self.lr * self.lr_decay ** sum(epoch >= m for m in self.lr_milestones)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lr_milestones"] = list(self.lr_milestones)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown train config keys: {sorted(unknown)}")
        return cls(**d)


class TrainedModel:
    """Front-end + backbone + AM-softmax class weights."""

    def __init__(self, frontend: FrontEnd, backbone: ToyBackbone, class_weights: np.ndarray,
                 config: TrainConfig = None):
        self.frontend = frontend
        self.backbone = backbone
        self.class_weights = np.asarray(class_weights, dtype=np.float64)
        self.config = config or TrainConfig()

    @property
    def sample_rate(self) -> int:
        return self.frontend.sample_rate

    def parameters(self) -> dict:
        p = {f"frontend.{k}": v for k, v in self.frontend.parameters().items()}
        p.update({f"backbone.{k}": v for k, v in self.backbone.weights.items()})
        p["class_weights"] = self.class_weights
        return p

    def embed_batch(self, segments) -> np.ndarray:
        feats, _ = self.frontend.features(segments)
        emb, _ = self.backbone.forward(feats)
        return emb

    def embed(self, samples) -> np.ndarray:
        return self.embed_batch(np.asarray(samples)[None])[0]

    def loss_and_grads(self, segments, labels) -> tuple:
        feats, fcache = self.frontend.features(segments)
        emb, bcache = self.backbone.forward(feats)
        loss, d_emb, d_cw = am_softmax_loss(emb, self.class_weights, labels,
                                            self.config.loss_scale, self.config.loss_margin)
        bgrads, d_feats = self.backbone.backward(bcache, d_emb)
        grads = {f"frontend.{k}": v for k, v in self.frontend.backward(fcache, d_feats).items()}
        grads.update({f"backbone.{k}": v for k, v in bgrads.items()})
        grads["class_weights"] = d_cw
        return loss, grads


class _Optimizer:
    def __init__(self, config: TrainConfig):
        self.config = config
        self.state = {}
        self.t = 0

    def step(self, params: dict, grads: dict, lr: float) -> None:
        c = self.config
        self.t += 1
        for name in sorted(grads):
            p, g = params[name], grads[name]
            rate = lr * (c.frontend_lr_scale if name in ("frontend.alpha", "frontend.beta") else 1.0)
            if c.optimizer == "sgd":
                v = self.state.setdefault(name, np.zeros_like(p))
                v *= c.momentum
                v += g
                p -= rate * v
            else:
                m, s = self.state.setdefault(name, (np.zeros_like(p), np.zeros_like(p)))
                m *= 0.9
                m += 0.1 * g
                s *= 0.999
                s += 0.001 * g**2
                m_hat = m / (1 - 0.9**self.t)
                s_hat = s / (1 - 0.999**self.t)
                p -= rate * m_hat / (np.sqrt(s_hat) + 1e-8)


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    alphas: np.ndarray = None
    betas: np.ndarray = None


@dataclass
class TrainHistory:
    initial_loss: float
    epochs: list = field(default_factory=list)

    @property
    def losses(self) -> list:
        return [r.loss for r in self.epochs]

    def to_csv(self, path) -> None:
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            n = 0 if not self.epochs or self.epochs[0].alphas is None else len(self.epochs[0].alphas)
            w.writerow(["epoch", "loss"] + [f"alpha_{i}" for i in range(n)] + [f"beta_{i}" for i in range(n)])
            w.writerow([0, repr(self.initial_loss)] + [""] * (2 * n))
            for r in self.epochs:
                snap = [] if r.alphas is None else [repr(float(v)) for v in np.concatenate([r.alphas, r.betas])]
                w.writerow([r.epoch, repr(r.loss)] + snap)


def _validate_dataset(dataset, crop_s: float) -> int:
    labels = [label for _, label in dataset]
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise ConfigError("need at least two classes")
    if classes != list(range(len(classes))):
        raise ConfigError("labels must be 0..C-1")
    if min(labels.count(c) for c in classes) < 2:
        raise ConfigError("need at least two utterances per class")
    rates = {audio.sample_rate for audio, _ in dataset}
    if len(rates) != 1:
        raise ConfigError(f"mixed sample rates in dataset: {sorted(rates)}")
    for audio, _ in dataset:
        if audio.duration + 1e-9 < crop_s:
            raise TooShortError(f"utterance of {audio.duration:.3f} s shorter than the {crop_s} s crop")
    return len(classes)


def init_model(frontend: FrontEnd, n_classes: int, config: TrainConfig) -> TrainedModel:
    backbone = ToyBackbone(frontend.n_filters, config.hidden, config.embed_dim, seed=config.seed + 1)
    class_weights = _rng(config.seed + 2).normal(size=(n_classes, config.embed_dim))
    return TrainedModel(frontend, backbone, class_weights, config)


def train(dataset, frontend, config: TrainConfig = TrainConfig(), n_filters: int = 64,
          stft: StftConfig = StftConfig()) -> tuple:
    """Jointly train front-end and backbone on ``dataset`` [(AudioBuffer, label), ...].

    ``frontend`` is a :class:`FrontEnd` or a front-end name.  Returns
    ``(TrainedModel, TrainHistory)``; the run is a pure function of
    (dataset, frontend, config).
    """
    n_classes = _validate_dataset(dataset, config.crop_s)
    if isinstance(frontend, str):
        frontend = FrontEnd(frontend, dataset[0][0].sample_rate, n_filters, stft,
                            lambda_mix=config.lambda_mix, seed=config.seed + 3)
    model = init_model(frontend, n_classes, config)

    # fixed leading crops give a reproducible pre-training loss
    n_crop = int(round(config.crop_s * frontend.sample_rate))
    all_labels = np.array([label for _, label in dataset])
    heads = np.stack([audio.samples[:n_crop] for audio, _ in dataset])
    initial_loss, _ = model.loss_and_grads(heads, all_labels)
    history = TrainHistory(initial_loss=initial_loss)

    sampler = CropSampler(dataset, config.crop_s, config.seed + 4)
    order_rng = _rng(config.seed + 5)
    opt = _Optimizer(config)
    params = model.parameters()
    for epoch in range(1, config.epochs + 1):
        lr = config.lr_at(epoch - 1)
        order = order_rng.permutation(len(dataset))
        losses = []
        for start in range(0, len(order), config.batch):
            segs, labels, _ = sampler.crops(order[start : start + config.batch])
            loss, grads = model.loss_and_grads(segs, labels)
            opt.step(params, grads, lr)
            frontend.project()
            losses.append(loss)
        snap = (frontend.params.alphas.copy(), frontend.params.betas.copy()) if isinstance(
            frontend.params, fb.FilterBankParams) else (None, None)
        history.epochs.append(EpochRecord(epoch, float(np.mean(losses)), *snap))
        log.info("epoch %d loss %.4f", epoch, history.epochs[-1].loss)
    return model, history


MODEL_MAGIC = b"LFFT"
MODEL_VERSION = 1


def model_to_bytes(model: TrainedModel) -> bytes:
    """Serialize as: magic, uint32 version, uint32 header length, JSON header,
    then every array listed in ``header["arrays"]`` as little-endian float32, in order."""
    fe = model.frontend
    arrays = []
    if isinstance(fe.params, fb.FilterBankParams):
        fe_meta = {"shape": fe.params.shape.value, "n_bins": fe.params.n_bins}
        arrays += [("frontend.alphas", fe.params.alphas), ("frontend.betas", fe.params.betas)]
    else:
        fe_meta = {k: v for k, v in fe.params.to_dict().items() if not isinstance(v, list)}
        arrays += [("frontend.freq_hz", fe.params.freq_hz), ("frontend.width", fe.params.width)]
    if fe.cnn_weights is not None:
        arrays.append(("frontend.cnn", fe.cnn_weights))
    arrays += [(f"backbone.{k}", model.backbone.weights[k]) for k in ("W1", "b1", "W2", "b2", "W3", "b3")]
    arrays.append(("class_weights", model.class_weights))
    header = {
        "frontend": fe.name,
        "sample_rate": fe.sample_rate,
        "n_filters": fe.n_filters,
        "lambda_mix": fe.lambda_mix,
        "stft": fe.stft.to_dict(),
        "frontend_params": fe_meta,
        "train_config": model.config.to_dict(),
        "arrays": [[name, list(np.shape(a))] for name, a in arrays],
    }
    head = json.dumps(header, sort_keys=True).encode("utf-8")
    body = b"".join(np.ascontiguousarray(a, dtype="<f4").tobytes() for _, a in arrays)
    return MODEL_MAGIC + struct.pack("<II", MODEL_VERSION, len(head)) + head + body


def model_from_bytes(blob: bytes) -> TrainedModel:
    if blob[:4] != MODEL_MAGIC:
        raise FormatError("not a model file")
    version, n_head = struct.unpack_from("<II", blob, 4)
    if version != MODEL_VERSION:
        raise FormatError(f"unsupported model version {version}")
    header = json.loads(blob[12 : 12 + n_head].decode("utf-8"))
    pos = 12 + n_head
    arrays = {}
    for name, shape in header["arrays"]:
        count = int(np.prod(shape)) if shape else 1
        arrays[name] = np.frombuffer(blob, dtype="<f4", count=count, offset=pos).reshape(shape).astype(np.float64)
        pos += 4 * count
    if pos != len(blob):
        raise FormatError("trailing or missing bytes in model file")

    meta = header["frontend_params"]
    if "shape" in meta:
        params = fb.FilterBankParams(arrays["frontend.alphas"], arrays["frontend.betas"], meta["shape"], meta["n_bins"])
    else:
        params = td.TimeKernelParams(meta["kind"], arrays["frontend.freq_hz"], arrays["frontend.width"],
                                     meta["sample_rate"], meta["kernel_len"], meta["stride"], meta["pool"])
    frontend = FrontEnd(header["frontend"], header["sample_rate"], header["n_filters"],
                        StftConfig.from_dict(header["stft"]), header["lambda_mix"], params=params,
                        cnn_weights=arrays.get("frontend.cnn"))
    weights = {k.split(".", 1)[1]: v for k, v in arrays.items() if k.startswith("backbone.")}
    return TrainedModel(frontend, ToyBackbone(0, weights=weights), arrays["class_weights"],
                        TrainConfig.from_dict(header["train_config"]))


def save_model(model: TrainedModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(model_to_bytes(model))


def load_model(path) -> TrainedModel:
    with open(path, "rb") as fh:
        return model_from_bytes(fh.read())
