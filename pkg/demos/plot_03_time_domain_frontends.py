"""
Sinc and Gabor front-ends, and why stride hurts them
====================================================

Time-domain front-ends learn band-pass kernels and slide them over the
waveform.  A wide band gives a short, spiky kernel, so most of its energy sits
in a few central taps and a large stride simply skips input samples.
"""

import numpy as np

from lff import timedomain as td
from lff.signal_io import synth_tone

for band in (100, 400, 1600, 4000):
    frac = td.demonstrate_scaling_tradeoff(float(band))["fraction_of_energy_in_central_quarter"]
    print("band %5d Hz: %.3f of kernel energy in the central quarter" % (band, frac))
print("flat kernel control: %.3f" % td.central_energy_fraction(np.ones(401)))

# a 16-band sinc bank, and a tone placed in the middle of band 9
sinc = td.init_sinc(16)
center = sinc.freq_hz[9] + sinc.width[9] / 2
means = td.frontend_values(synth_tone(center, 1.0, 16000, 0.5).samples, sinc).mean(axis=0)
print("tone at %.0f Hz -> loudest band %d, %.1f dB above the next" % (
    center, int(np.argmax(means)), np.sort(means)[-1] - np.sort(means)[-2]))

# the Gabor bank uses a cosine/sine pair per band and keeps the squared envelope
gabor = td.init_gabor(16)
means = td.frontend_values(synth_tone(gabor.freq_hz[4], 1.0, 16000, 0.5).samples, gabor).mean(axis=0)
print("gabor tone at %.0f Hz -> loudest band %d" % (gabor.freq_hz[4], int(np.argmax(means))))

# strided correlation cost: halve the stride, double the work
for stride in (160, 80, 40):
    print("stride %3d: %d MACs per minute of audio" % (stride, td.conv_macs(960000, 401, stride, 64)))
