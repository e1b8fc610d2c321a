"""
From a waveform to log-Mel features, twice
===========================================

A frozen, Mel-initialized triangle filterbank is the plain log-Mel pipeline.
This walk-through builds both and checks that they agree.
"""

import numpy as np

from lff import filterbank as fb
from lff.signal_io import make_speaker_profiles, synth_speaker_utterance
from lff.stft import StftConfig, compute_spectrum, compute_spectrum_conv

# a two second synthetic "speaker": harmonics of a jittered fundamental
profile = make_speaker_profiles(1, seed=3)[0]
audio = synth_speaker_utterance(profile, 2.0, 16000, seed=0)
print("f0 %.1f Hz, %d samples" % (profile.fundamental_hz, len(audio)))

# 25 ms Hann windows every 10 ms, 1024-point FFT, power spectrum, 512 bins
cfg = StftConfig()
spec = compute_spectrum(audio, cfg)
print("spectrum", spec.values.shape)

# the same spectrum computed as a strided correlation with complex kernels
conv = compute_spectrum_conv(audio, cfg)
print("FFT vs conv max |diff|: %.2e" % np.abs(spec.values - conv.values).max())

# 64 triangles placed on the Mel scale; alpha is the center bin, beta the base width
params = fb.mel_init(64, cfg.n_bins, 16000)
print("first centers (bins):", np.round(params.alphas[:4], 2))
print("first widths  (bins):", np.round(params.betas[:4], 2))

feats = fb.forward(spec, params)
print("features", feats.values.shape, "range %.1f .. %.1f dB" % (feats.values.min(), feats.values.max()))

# an independent log-Mel: triangles drawn directly in Hz
nyq = 8000.0
mel_pts = fb.mel_to_hz(np.linspace(0, fb.hz_to_mel(nyq), 66))
freqs = np.linspace(0, nyq, 512)
W = np.zeros((512, 64))
for i in range(64):
    half = (mel_pts[i + 2] - mel_pts[i]) / 2
    W[:, i] = np.maximum(0, 1 - np.abs(freqs - mel_pts[i + 1]) / half)
reference = 10 * np.log10(spec.values @ W + 1e-10)
print("LFF vs hand-built log-Mel max |diff|: %.2e dB" % np.abs(feats.values - reference).max())
