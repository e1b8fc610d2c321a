"""Verification scoring and equal error rate."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, FormatError, TooShortError
from .signal_io import AudioBuffer, load_wav

SEGMENT_S = 4.0
SEGMENT_HOP_S = 1.0  # 4 s windows overlapping by 3 s


@dataclass(frozen=True)
class Trial:
    enroll_id: str
    test_id: str
    target: bool


def segment_starts(n_samples: int, sample_rate: int, segment_s: float = SEGMENT_S,
                   hop_s: float = SEGMENT_HOP_S) -> list:
    """Start offsets of every whole segment; a partial tail segment is dropped."""
    seg = int(round(segment_s * sample_rate))
    hop = int(round(hop_s * sample_rate))
    if n_samples < seg:
        raise TooShortError(f"{n_samples / sample_rate:.3f} s utterance is shorter than one {segment_s} s segment")
    return list(range(0, n_samples - seg + 1, hop))


def segment_embeddings(audio: AudioBuffer, model) -> np.ndarray:
    """L2-normalized embedding of every segment, shape (n_segments, D).

    ``model`` needs only an ``embed_batch(segments) -> (n, D)`` method.
    """
    seg = int(round(SEGMENT_S * audio.sample_rate))
    starts = segment_starts(len(audio), audio.sample_rate)
    emb = np.asarray(model.embed_batch(np.stack([audio.samples[s : s + seg] for s in starts])), dtype=np.float64)
    norms = np.linalg.norm(emb, axis=1, keepdims=True)
    return emb / np.where(norms > 0, norms, 1.0)


def cosine_score(enroll_emb: np.ndarray, test_emb: np.ndarray) -> float:
    """Mean cosine similarity over all enroll x test segment pairs (rows pre-normalized)."""
    return float(np.mean(enroll_emb @ test_emb.T))


def score_trial(enroll: AudioBuffer, test: AudioBuffer, model) -> float:
    return cosine_score(segment_embeddings(enroll, model), segment_embeddings(test, model))


def score_trials(trials, utterances, model) -> list:
    """Score every trial; ``utterances`` maps id -> AudioBuffer (or is a callable loader)."""
    cache = {}

    def emb(uid):
        if uid not in cache:
            audio = utterances(uid) if callable(utterances) else utterances[uid]
            cache[uid] = segment_embeddings(audio, model)
        return cache[uid]

    return [(cosine_score(emb(t.enroll_id), emb(t.test_id)), t.target) for t in trials]


def _counts(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels, dtype=bool)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise DomainError("scores and labels must be 1-D and equal length")
    n_tar, n_non = int(labels.sum()), int((~labels).sum())
    if n_tar == 0 or n_non == 0:
        raise DomainError("EER needs at least one target and one non-target score")
    return scores, labels, n_tar, n_non


def _roc_counts(scores, labels) -> tuple:
    """Thresholds at every unique score plus +inf, with integer error counts.

    A trial is accepted when ``score >= threshold``.  Returns
    ``(thresholds, false_accepts, misses, n_tar, n_non)``.
    """
    scores, labels, n_tar, n_non = _counts(scores, labels)
    thresholds = np.append(np.unique(scores), np.inf)
    tar = np.sort(scores[labels])
    non = np.sort(scores[~labels])
    misses = np.searchsorted(tar, thresholds, side="left")
    false_accepts = n_non - np.searchsorted(non, thresholds, side="left")
    return thresholds, false_accepts, misses, n_tar, n_non


def roc_points(scores, labels) -> tuple:
    """Operating points ``(thresholds, p_fa, p_miss)`` in increasing threshold order."""
    thresholds, fa, miss, n_tar, n_non = _roc_counts(scores, labels)
    return thresholds, fa / n_non, miss / n_tar


def _lower_hull(order, x, y):
    hull = []
    for i in order:
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a])
            if cross > 0:
                break
            hull.pop()
        hull.append(i)
    return hull


def compute_eer(scores, labels=None) -> tuple:
    """Equal error rate on the convex hull of the ROC, and its threshold.

    The ROC points (P_fa, P_miss) are replaced by their lower convex hull and
    the EER is read where the hull crosses P_fa = P_miss, interpolating
    linearly along the hull segment; the threshold is interpolated the same
    way between the segment's end thresholds.  ``scores`` may also be a list
    of ``(score, is_target)`` pairs with ``labels=None``.

    Rates are ratios of integer counts, so the hull and the crossing are
    computed exactly (integers scaled to the common denominator
    ``n_tar * n_non``, then fractions) and rounded to float once.
    """
    if labels is None:
        pairs = list(scores)
        scores, labels = [s for s, _ in pairs], [bool(t) for _, t in pairs]
    thresholds, fa, miss, n_tar, n_non = _roc_counts(scores, labels)
    x = [int(v) * n_tar for v in fa]
    y = [int(v) * n_non for v in miss]
    # one point per P_fa value: the lowest P_miss, which is also the lowest threshold
    best = {}
    for i in range(len(thresholds)):
        j = best.get(x[i])
        if j is None or y[i] < y[j]:
            best[x[i]] = i
    order = [best[v] for v in sorted(best)]
    hull = _lower_hull(order, x, y)
    gap = [x[i] - y[i] for i in hull]
    k = next(i for i, g in enumerate(gap) if g >= 0)
    if k == 0:
        return float(Fraction(x[hull[0]], n_tar * n_non)), float(thresholds[hull[0]])
    a, b = hull[k - 1], hull[k]
    w = Fraction(gap[k - 1], gap[k - 1] - gap[k])
    eer = (x[a] + w * (x[b] - x[a])) / (n_tar * n_non)
    if w == 1 or not np.isfinite(thresholds[a]):
        thr = thresholds[b]
    else:
        thr = thresholds[a] + float(w) * (thresholds[b] - thresholds[a])
    return float(eer), float(thr)


def read_trial_list(path) -> list:
    """Parse lines ``<label 0|1> <enroll_path> <test_path>``."""
    trials = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 3 or parts[0] not in ("0", "1"):
                raise FormatError(f"{path}:{lineno}: expected '<0|1> <enroll> <test>'")
            trials.append(Trial(parts[1], parts[2], parts[0] == "1"))
    return trials


def write_trial_list(path, trials) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in trials:
            fh.write(f"{int(t.target)} {t.enroll_id} {t.test_id}\n")


def write_scores(path, pairs) -> None:
    """One ``<score> <label>`` line per trial."""
    with open(path, "w", encoding="utf-8") as fh:
        for score, target in pairs:
            fh.write(f"{score!r} {int(bool(target))}\n")


def read_scores(path) -> list:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                s, t = line.split()
                out.append((float(s), t == "1"))
    return out


def score_trial_list(path, model) -> list:
    """Score a trial-list file whose ids are WAV paths."""
    return score_trials(read_trial_list(path), load_wav, model)
