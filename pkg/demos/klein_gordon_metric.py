"""Configuration-space metric of Klein-Gordon plane waves.

For a plane wave the metric Re[conj(d_mu psi) d_nu psi] is |A|^2 k_mu k_nu:
rank one, so it is never positive definite. Superposing two waves makes it
vary from point to point. Under a Lorentz transformation it behaves as a
(0,2) tensor.
"""

import numpy as np

from qsmetric import fields as fl

grid = fl.SpacetimeGrid.uniform((9,) * 4, (0.2,) * 4, (-0.8,) * 4)
mass = 1.0
k = fl.on_shell_k([0.5, -0.3, 0.2], mass)
wave = fl.plane_wave(grid, k, 1.0, mass)
print(f"KG residual: analytic {fl.kg_residual(wave, 'analytic'):.1e}, grid {fl.kg_residual(wave, 'grid'):.1e}")

g = fl.config_metric(wave, (4, 4, 4, 4))
print("metric at the centre:\n", np.round(g.entries, 6))
print("k_mu k_nu:\n", np.round(np.outer(fl.lower(k), fl.lower(k)), 6))
print("signature", g.signature)

massless = fl.plane_wave(grid, [1, 1, 0, 0])
print("massless wave, flipped sign:", fl.config_metric(massless, (4, 4, 4, 4), sign_convention=-1).signature)

pair = fl.superpose(wave, fl.plane_wave(grid, fl.on_shell_k([-0.4, 0.6, 0], mass), 0.5j, mass))
g00 = [fl.config_metric(pair, (i, 4, 4, 4)).entries[0, 0] for i in range(1, 8)]
print("two waves, g_00 along x0:", np.round(g00, 4))

rng = np.random.default_rng(0)
worst = max(fl.lorentz_boost_check(k, fl.random_lorentz(rng)) for _ in range(10))
print(f"tensor law under 10 random Lorentz transformations: {worst:.1e}")
