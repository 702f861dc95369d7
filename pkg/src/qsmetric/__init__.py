"""Metric and Berry geometry of parametrized quantum states."""

from .errors import *  # noqa: F401,F403
from .hilbert import (
    HermitianOperator,
    expectation,
    fs_distance,
    inner,
    norm,
    normalize,
    state,
    variance,
)
from .geometry import (
    GaugeTransform,
    MetricTensor,
    QGTensor,
    StateFamily,
    apply_gauge,
    berry_connection,
    berry_curvature,
    covariant_derivative,
    differentiate,
    fs_holomorphic,
    hermitian_metric,
    metric,
    qgt,
    reparametrize,
    transform_metric,
)
from .evolution import (
    BlochChart,
    anandan_speed,
    christoffel,
    evolve,
    geodesic_integrate,
    geodesic_vs_schrodinger,
    speed_consistency,
)
from .fields import (
    ComplexField,
    SpacetimeGrid,
    config_metric,
    kg_residual,
    lorentz_boost_check,
    plane_wave,
    read_field,
    write_field,
)
from .models import bloch_family, gaussian_family, random_family, GaussianFamilySpec

__version__ = "0.1.0"
