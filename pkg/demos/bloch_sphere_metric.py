"""Metric and Berry curvature of a qubit on the Bloch sphere.

The family (cos(theta/2), exp(i phi) sin(theta/2)) covers CP(1). Its metric is
diag(1/4, sin^2(theta)/4), a round sphere of radius 1/2, and the curvature
integrates to -2 pi over the whole sphere (half the solid angle, with sign).
"""

import numpy as np
from scipy.integrate import dblquad

from qsmetric import berry_connection, berry_curvature, metric, qgt
from qsmetric.models import bloch_family

fam = bloch_family()

print("theta     g_tt      g_pp      sin^2/4   F_tp      A_p")
for theta in np.linspace(0.2, np.pi - 0.2, 6):
    p = [theta, 0.4]
    g = metric(fam, p).entries
    F = berry_curvature(fam, p)
    A = berry_connection(fam, p)
    print(f"{theta:.4f}  {g[0, 0]:.6f}  {g[1, 1]:.6f}  {np.sin(theta) ** 2 / 4:.6f}  {F[0, 1]:+.6f} {A[1]:+.6f}")

# the tensor holds both pieces: Re T is the metric, -2 Im T the curvature
T = qgt(fam, [1.0, 0.0])
print("\nQGT at theta=1:\n", np.round(T.entries, 6))

# total flux of the curvature: the Chern number of the tautological bundle
flux, _ = dblquad(lambda phi, theta: berry_curvature(fam, [theta, phi])[0, 1],
                  1e-3, np.pi - 1e-3, 0, 2 * np.pi)
print(f"\ntotal curvature flux / 2 pi = {flux / (2 * np.pi):.6f}")
