"""The Fubini-Study metric from a holomorphic, unnormalized chart.

In the chart psi(z) = (1, z) of CP(1) the metric follows from derivatives of
psi with respect to z alone, without normalizing. It agrees with the metric
of the normalized real family in (Re z, Im z), equals 1/(1+|z|^2)^2 times the
identity, and ignores any constant rescaling of psi.
"""

import numpy as np

from qsmetric import fs_holomorphic, metric
from qsmetric.geometry import holomorphic_family

chart = lambda z: np.array([1.0, z[0]])
real = holomorphic_family(chart, 1, 2, 1e-5)

for z in (0.0, 0.5 + 0.5j, -2.0 + 1.0j):
    h = fs_holomorphic(chart, [z]).entries
    r = metric(real, [z.real, z.imag]).entries
    print(f"z={z}: holomorphic {h[0, 0]:.8f}, real chart {r[0, 0]:.8f}, closed form {1 / (1 + abs(z) ** 2) ** 2:.8f}")

scaled = fs_holomorphic(lambda z: (3 - 4j) * chart(z), [0.5 + 0.5j]).entries
print("rescaled chart changes nothing:", np.allclose(scaled, fs_holomorphic(chart, [0.5 + 0.5j]).entries))
