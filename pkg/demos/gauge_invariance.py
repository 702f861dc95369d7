"""Why the connection term matters.

Multiplying a family by a position-dependent phase exp(i alpha(lam)) leaves
every ray unchanged, so any honest metric on rays must not notice. The
covariant derivative (with the Berry connection subtracted) gives a metric that
doesn't; the bare Re<d psi|d psi> changes by an amount set by d alpha.
"""

import numpy as np

from qsmetric import apply_gauge, berry_connection, metric
from qsmetric.geometry import random_polynomial_gauge
from qsmetric.models import random_family, rng_from_seed

rng = rng_from_seed(7)
fam = random_family(4, 2, seed=7)
alpha = random_polynomial_gauge(2, rng, degree=3)
gauged = apply_gauge(fam, alpha)
p = np.array([0.3, -0.6])

with_conn = np.abs(metric(gauged, p).entries - metric(fam, p).entries).max()
without = np.abs(metric(gauged, p, connection=False).entries - metric(fam, p, connection=False).entries).max()
print(f"metric change with connection term:     {with_conn:.2e}")
print(f"metric change without connection term:  {without:.2e}")

shift = berry_connection(gauged, p) - berry_connection(fam, p)
print(f"connection shift   {shift}")
print(f"minus grad alpha   {-alpha.grad(p)}")
