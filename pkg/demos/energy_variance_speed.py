"""Schrodinger evolution moves through ray space at speed 2 Delta H / hbar.

For a random four-level system we compare the distance between successive
states along the exact evolution with the speed predicted by the energy
spread, then check the Rabi half-period closed form: the path from (1,0) to
(0,1) has length pi.
"""

import numpy as np

from qsmetric import anandan_speed, evolve, speed_consistency
from qsmetric.models import random_hermitian, random_state, rng_from_seed

rng = rng_from_seed(3)
H = random_hermitian(4, rng)
psi0 = random_state(4, rng)
v = anandan_speed(H, psi0)
t = (1e-3 / v) * np.arange(2001)
trace = evolve(H, psi0, t)
print(f"speed 2 dH = {v:.6f}")
print(f"max relative mismatch per step: {speed_consistency(trace, H):.2e}")
print(f"path length {trace.cumulative_s[-1]:.6f} vs speed * time {v * t[-1]:.6f}")

sx = np.array([[0, 1], [1, 0]])
rabi = evolve(0.5 * sx, [1, 0], np.linspace(0, np.pi, 10001))
print(f"\nRabi half period: length = {rabi.cumulative_s[-1]:.10f}, final |<1|psi>| = {abs(rabi.states[-1][1]):.12f}")
