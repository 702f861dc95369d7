"""A translated Gaussian packet measures distance in configuration space.

Moving the centre l of a packet of width sigma traces a line in ray space
whose metric is the constant 1/(4 sigma^2): configuration space inherits a
flat metric whose scale is fixed by the packet width.
"""

import numpy as np
from scipy.integrate import quad

from qsmetric import metric
from qsmetric.models import GaussianFamilySpec, gaussian_family

for sigma in (0.5, 1.0, 2.0):
    fam = gaussian_family(GaussianFamilySpec(sigma))
    g = [metric(fam, [l]).entries[0, 0] for l in (-sigma, 0.0, 0.5 * sigma)]
    amp = lambda x: (2 * np.pi * sigma**2) ** -0.25 * np.exp(-x**2 / (4 * sigma**2))
    exact, _ = quad(lambda x: (x * amp(x) / (2 * sigma**2)) ** 2, -np.inf, np.inf)
    print(f"sigma={sigma}: g_ll = {g[0]:.10f} {g[1]:.10f} {g[2]:.10f}  quadrature {exact:.10f}  1/(4 sigma^2) = {1 / (4 * sigma**2):.10f}")
