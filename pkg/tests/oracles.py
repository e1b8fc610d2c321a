"""Independent reference computations used as test oracles.

Nothing here calls into the code path it checks: DFTs are evaluated from the
definition, the Mel bank is laid out in Hz with plain loops, EER is found by
an exact max-min search over the raw ROC points, and so on.
"""

import math
import wave
from fractions import Fraction

import numpy as np


def write_wav_stdlib(path, channels_int16, sample_rate):
    """Write int16 samples of shape (n, channels) with the stdlib ``wave`` module."""
    data = np.asarray(channels_int16, dtype="<i2")
    if data.ndim == 1:
        data = data[:, None]
    with wave.open(str(path), "wb") as w:
        w.setnchannels(data.shape[1])
        w.setsampwidth(2)
        w.setframerate(sample_rate)
        w.writeframes(data.tobytes())


def float_to_int16(x):
    return np.clip(np.round(np.asarray(x) * 32768.0), -32768, 32767).astype(np.int16)


def brute_dft(x, n_fft):
    """O(n^2) DFT of ``x`` zero-padded to ``n_fft``, from the definition."""
    padded = np.zeros(n_fft)
    padded[: len(x)] = x
    t = np.arange(n_fft)
    out = np.empty(n_fft, dtype=complex)
    for k in range(n_fft):
        out[k] = np.sum(padded * np.exp(-2j * np.pi * k * t / n_fft))
    return out


def periodic_hann(n):
    return np.array([0.5 - 0.5 * math.cos(2 * math.pi * i / n) for i in range(n)])


def brute_power_spectrogram(x, w, hop, n_fft, window):
    frames = [(x[j : j + w] * window) for j in range(0, len(x) - w + 1, hop)]
    return np.array([np.abs(brute_dft(f, n_fft)[: n_fft // 2]) ** 2 for f in frames])


def reference_mel_matrix(n_filters, n_bins, sample_rate):
    """Mel bank built in Hz: filter i is centered on Mel point i+1 with half-width
    equal to half the distance between Mel points i and i+2."""
    nyq = sample_rate / 2.0
    top = 2595.0 * math.log10(1.0 + nyq / 700.0)
    pts = [700.0 * (10 ** ((top * j / (n_filters + 1)) / 2595.0) - 1.0) for j in range(n_filters + 2)]
    freqs = [nyq * k / (n_bins - 1) for k in range(n_bins)]
    W = np.zeros((n_bins, n_filters))
    for i in range(n_filters):
        center = pts[i + 1]
        half = (pts[i + 2] - pts[i]) / 2.0
        for k, f in enumerate(freqs):
            W[k, i] = max(0.0, 1.0 - abs(f - center) / half)
    return W


def reference_log_mel(spectrum, n_filters, sample_rate, eps=1e-10):
    W = reference_mel_matrix(n_filters, spectrum.shape[1], sample_rate)
    return 10.0 * np.log10(spectrum @ W + eps)


def naive_filterbank(spectrum, weights, eps=1e-10):
    t_len, n_len = spectrum.shape
    m_len = weights.shape[1]
    out = np.zeros((t_len, m_len))
    for t in range(t_len):
        for i in range(m_len):
            acc = 0.0
            for n in range(n_len):
                acc += spectrum[t, n] * weights[n, i]
            out[t, i] = 10.0 * math.log10(acc + eps)
    return out


def central_difference(f, x, step):
    """Gradient of scalar ``f`` at vector ``x`` by central differences."""
    x = np.array(x, dtype=np.float64)
    g = np.zeros_like(x)
    for i in range(x.size):
        hi, lo = x.copy(), x.copy()
        hi.flat[i] += step
        lo.flat[i] -= step
        g.flat[i] = (f(hi) - f(lo)) / (2 * step)
    return g


def rel_err(a, b, floor=1e-12):
    a, b = np.asarray(a), np.asarray(b)
    return np.abs(a - b) / np.maximum(np.maximum(np.abs(a), np.abs(b)), floor)


def cross_entropy(logits, labels):
    total = 0.0
    for row, y in zip(logits, labels):
        m = max(row)
        lse = m + math.log(sum(math.exp(v - m) for v in row))
        total += lse - row[y]
    return total / len(labels)


def eer_max_min(scores, labels):
    """Exact hull EER: max over mixing weights a of min over ROC points of
    a*P_fa + (1-a)*P_miss, searched over every pairwise breakpoint."""
    tar = [Fraction(s) for s, l in zip(scores, labels) if l]
    non = [Fraction(s) for s, l in zip(scores, labels) if not l]
    thresholds = sorted(set(tar + non))
    pts = []
    for th in thresholds:
        pts.append((Fraction(sum(s >= th for s in non), len(non)), Fraction(sum(s < th for s in tar), len(tar))))
    pts.append((Fraction(0), Fraction(1)))
    candidates = {Fraction(0), Fraction(1)}
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            (x1, y1), (x2, y2) = pts[i], pts[j]
            denom = (x1 - y1) - (x2 - y2)
            if denom != 0:
                a = (y2 - y1) / denom
                if 0 <= a <= 1:
                    candidates.add(a)
    return max(min(a * x + (1 - a) * y for x, y in pts) for a in candidates)


def exhaustive_eer_staircase(scores, labels):
    """min over thresholds of max(P_fa, P_miss); an upper bound on the hull EER."""
    tar = [s for s, l in zip(scores, labels) if l]
    non = [s for s, l in zip(scores, labels) if not l]
    best = 1.0
    for th in sorted(set(scores)) + [math.inf]:
        fa = sum(s >= th for s in non) / len(non)
        miss = sum(s < th for s in tar) / len(tar)
        best = min(best, max(fa, miss))
    return best


def am_softmax_loss_decimal(embeddings, class_weights, labels, scale, margin, prec=40):
    """AM-softmax loss evaluated in ``prec``-digit decimal arithmetic.

    Central differences of this function at a tiny step are free of the float64
    cancellation that swamps gradient entries of order 1e-6 at scale 30.
    """
    from decimal import Decimal, localcontext

    with localcontext() as ctx:
        ctx.prec = prec
        s, m = Decimal(repr(float(scale))), Decimal(repr(float(margin)))

        def unit(row):
            r = [x if isinstance(x, Decimal) else Decimal(repr(float(x))) for x in row]
            n = sum(x * x for x in r).sqrt()
            return [x / n for x in r]

        us = [unit(r) for r in embeddings]
        vs = [unit(r) for r in class_weights]
        total = Decimal(0)
        for u, y in zip(us, labels):
            logits = [s * (sum(a * b for a, b in zip(u, v)) - (m if j == y else 0)) for j, v in enumerate(vs)]
            top = max(logits)
            lse = top + sum((z - top).exp() for z in logits).ln()
            total += lse - logits[y]
        return total / len(labels)


def decimal_gradient(f, x, step="1e-15", prec=40):
    """Central-difference gradient of ``f`` (taking a nested list of Decimals) at float array ``x``."""
    from decimal import Decimal, localcontext

    x = np.asarray(x, dtype=np.float64)
    g = np.zeros(x.size)
    with localcontext() as ctx:
        ctx.prec = prec
        h = Decimal(step)
        base = [Decimal(repr(float(v))) for v in x.ravel()]
        for i in range(x.size):
            hi, lo = list(base), list(base)
            hi[i] += h
            lo[i] -= h
            g[i] = float((f(np.array(hi, dtype=object).reshape(x.shape)) -
                          f(np.array(lo, dtype=object).reshape(x.shape))) / (2 * h))
    return g.reshape(x.shape)
