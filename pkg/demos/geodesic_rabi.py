"""Schrodinger evolution traced against a Fubini-Study geodesic.

Rabi evolution from (1,0) runs along a great circle of the Bloch sphere. We
integrate the geodesic equation with finite-difference Christoffel symbols
from the same starting direction and compare the two curves point by point,
both in a chart adapted to the motion and in a tilted one.
"""

import numpy as np

from qsmetric.evolution import BlochChart, bloch_chart_for, geodesic_vs_schrodinger

sx = np.array([[0, 1], [1, 0]])
H, psi0 = 0.5 * sx, np.array([1.0, 0.0])

res = geodesic_vs_schrodinger(H, psi0, duration=np.pi / 2, steps=400)
print(f"adapted chart: max deviation {res.deviation:.2e}, speed drift {res.speed_drift:.2e}")

b = 0.6
rx = np.array([[np.cos(b / 2), -1j * np.sin(b / 2)], [-1j * np.sin(b / 2), np.cos(b / 2)]])
tilted = BlochChart(rx @ bloch_chart_for(H, psi0).rotation)
res = geodesic_vs_schrodinger(H, psi0, duration=np.pi / 2, steps=400, chart=tilted)
print(f"tilted chart:  max deviation {res.deviation:.2e}")
print("\n    s      theta_schr  theta_geo   phi_schr   phi_geo")
for k in range(0, 401, 80):
    print(f"{res.s[k]:.4f}  {res.schrodinger[k, 0]:.6f}  {res.geodesic[k, 0]:.6f}"
          f"  {res.schrodinger[k, 1]:+.6f}  {res.geodesic[k, 1]:+.6f}")
