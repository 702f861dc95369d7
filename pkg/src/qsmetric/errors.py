"""Exception types raised by qsmetric.

Every numerical failure derives from :class:`QSMetricError`, which the
command line maps to exit code 3.
"""


class QSMetricError(ValueError):
    """Base class for numerical and domain errors."""


class DimMismatch(QSMetricError):
    pass


class ZeroState(QSMetricError):
    pass


class NotNormalized(QSMetricError):
    pass


class NotHermitian(QSMetricError):
    pass


class NotNormalizedFamily(QSMetricError):
    """The family violates its normalization contract."""


class NonFiniteState(QSMetricError):
    pass


class NotHolomorphic(QSMetricError):
    pass


class SingularJacobian(QSMetricError):
    pass


class DegenerateMetric(QSMetricError):
    pass


class ChartSingularity(QSMetricError):
    pass


class OffShell(QSMetricError):
    pass


class BoundaryNode(QSMetricError):
    pass


class NotLorentz(QSMetricError):
    pass


class GridError(QSMetricError):
    pass
