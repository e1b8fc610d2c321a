"""
Filters with trainable centers and widths
=========================================

Each filter has a center ``alpha`` and a width ``beta`` (in FFT bins).  The
gradient of any loss on the dB features flows back to both.
"""

import numpy as np

from lff import filterbank as fb
from lff.filterbank import FilterBankParams, FilterShape

# one triangle and one bell over 32 bins
for shape in (FilterShape.TRIANGLE, FilterShape.BELL):
    p = FilterBankParams(np.array([12.3]), np.array([6.0]), shape, 32)
    col = fb.build_weight_matrix(p)[:, 0]
    print(shape.value.ljust(8), " ".join("%.2f" % v for v in col[8:17]))

# a toy objective: make filter 0 respond more strongly to a tone near bin 20
spectrum = np.zeros((1, 32))
spectrum[0, 20] = 1.0
params = FilterBankParams(np.array([12.3, 26.0]), np.array([6.0, 4.0]), FilterShape.BELL, 32)
for step in range(6):
    out, energies = fb.apply_filters(spectrum, params)
    upstream = np.array([[1.0, 0.0]])  # d(loss)/d(features): maximize filter 0's output
    g = fb.backward(spectrum, params, upstream, energies=energies)
    print("step %d  out %.1f dB  alpha %.2f  beta %.2f" % (step, out[0, 0], params.alphas[0], params.betas[0]))
    params.alphas += 0.5 * g.d_alpha
    params.betas += 0.05 * g.d_beta
    params = fb.project_params(params)

# the filter slides toward the tone and widens until it covers it
