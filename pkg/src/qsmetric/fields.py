"""Klein-Gordon fields on a spacetime grid and their configuration-space metric.

Conventions: Minkowski signature ``(+, -, -, -)``, coordinates
``x = (x0, x1, x2, x3)`` with ``x0 = c t``, wave vectors stored with upper
indices ``k = (k0, k1, k2, k3)`` and plane waves ``A exp(-i k.x)`` with
``k.x = k0 x0 - k1 x1 - k2 x2 - k3 x3``. The mass term is
``mu^2 = (m c / hbar)^2`` so the on-shell condition is ``k.k = mu^2``.

The metric of a field is ``g_mu,nu(x) = s Re[conj(d_mu psi) d_nu psi]`` with an
overall sign ``s``. It lives on configuration space, so unlike the ray-space
metric it depends on position and need not be positive definite.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import BoundaryNode, DimMismatch, GridError, NotLorentz, OffShell, QSMetricError
from .geometry import signature

__all__ = [
    "MINKOWSKI",
    "SpacetimeGrid",
    "ComplexField",
    "FieldMetric",
    "lower",
    "on_shell_k",
    "plane_wave",
    "constant_field",
    "superpose",
    "kg_residual",
    "field_gradient",
    "config_metric",
    "boost",
    "rotation",
    "random_lorentz",
    "lorentz_boost_check",
    "write_field",
    "read_field",
]

MINKOWSKI = np.diag([1.0, -1.0, -1.0, -1.0])
MIN_AXIS_POINTS = 5


def lower(k) -> np.ndarray:
    """Lower the index of a 4-vector with the Minkowski metric."""
    return MINKOWSKI @ np.asarray(k, dtype=float)


@dataclass(frozen=True)
class SpacetimeGrid:
    """Tensor-product grid with uniformly spaced axes ``x0 .. x3``.

    ``step`` keeps the nominal spacing when the grid is built by
    :meth:`uniform`, so it survives file round trips without rounding drift.
    """

    axes: tuple
    step: Optional[tuple] = None

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        if len(axes) != 4:
            raise GridError("a spacetime grid needs exactly four axes")
        for i, a in enumerate(axes):
            if a.ndim != 1 or a.size < MIN_AXIS_POINTS:
                raise GridError(f"axis {i} needs at least {MIN_AXIS_POINTS} points")
            d = np.diff(a)
            if np.any(d <= 0):
                raise GridError(f"axis {i} is not increasing")
            if np.max(np.abs(d - d[0])) > 1e-12 * max(1.0, np.max(np.abs(a))):
                raise GridError(f"axis {i} is not uniformly spaced")
            a.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        if self.step is None:
            object.__setattr__(self, "step", tuple(float((a[-1] - a[0]) / (a.size - 1)) for a in axes))
        elif len(self.step) != 4:
            raise GridError("step needs four entries")

    @classmethod
    def uniform(cls, dims, spacing, origin=(0.0, 0.0, 0.0, 0.0)) -> "SpacetimeGrid":
        axes = tuple(o + h * np.arange(n) for n, h, o in zip(dims, spacing, origin))
        return cls(axes, tuple(float(h) for h in spacing))

    @property
    def shape(self) -> tuple:
        return tuple(a.size for a in self.axes)

    @property
    def spacing(self) -> np.ndarray:
        return np.array(self.step)

    @property
    def origin(self) -> np.ndarray:
        return np.array([a[0] for a in self.axes])

    def coords(self) -> np.ndarray:
        """Array of shape ``shape + (4,)`` with the coordinates of every node."""
        return np.stack(np.meshgrid(*self.axes, indexing="ij"), axis=-1)

    def point(self, node) -> np.ndarray:
        return np.array([a[i] for a, i in zip(self.axes, node)])

    def is_interior(self, node) -> bool:
        return all(0 < i < n - 1 for i, n in zip(node, self.shape))


@dataclass(frozen=True)
class ComplexField:
    """Sampled complex field with physical parameters.

    ``waves`` lists the ``(k, amplitude)`` plane-wave components when the
    field is known in closed form; it enables the analytic derivative mode.
    """

    grid: SpacetimeGrid
    values: np.ndarray
    mass: float = 0.0
    c: float = 1.0
    hbar: float = 1.0
    waves: tuple = ()

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise DimMismatch(f"values have shape {v.shape}, grid is {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise GridError("field has non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def mu2(self) -> float:
        return (self.mass * self.c / self.hbar) ** 2

    def evaluate(self, x) -> complex:
        """Closed-form value at an arbitrary point ``x``."""
        self._need_waves()
        x = np.asarray(x, dtype=float)
        return complex(sum(A * np.exp(-1j * (lower(k) @ x)) for k, A in self.waves))

    def _need_waves(self):
        if not self.waves:
            raise ValueError("analytic mode needs a field built from plane waves")


def on_shell_k(k_spatial, mass: float = 0.0, c: float = 1.0, hbar: float = 1.0) -> np.ndarray:
    """Positive-energy wave vector ``(k0, k)`` with ``k0 = sqrt(|k|^2 + (m c/hbar)^2)``."""
    ks = np.asarray(k_spatial, dtype=float)
    if ks.shape != (3,):
        raise DimMismatch("spatial wave vector must have three components")
    return np.concatenate([[np.sqrt(ks @ ks + (mass * c / hbar) ** 2)], ks])


def plane_wave(
    grid: SpacetimeGrid,
    k,
    amplitude: complex = 1.0,
    mass: float = 0.0,
    c: float = 1.0,
    hbar: float = 1.0,
    off_shell: bool = False,
) -> ComplexField:
    """Plane wave ``amplitude * exp(-i k.x)`` sampled on ``grid``.

    ``k`` must satisfy ``k0 = +sqrt(|k|^2 + mu^2)`` to relative precision
    1e-10 unless ``off_shell`` is set.
    """
    if mass < 0:
        raise ValueError("mass must be non-negative")
    k = np.asarray(k, dtype=float)
    if k.shape != (4,):
        raise DimMismatch("wave vector must have four components")
    if not off_shell:
        k0 = on_shell_k(k[1:], mass, c, hbar)[0]
        if abs(k[0] - k0) > 1e-10 * max(1.0, k0):
            raise OffShell(f"k0={k[0]!r} is off shell (expected {k0!r})")
    phase = grid.coords() @ lower(k)
    values = complex(amplitude) * np.exp(-1j * phase)
    return ComplexField(grid, values, mass, c, hbar, ((k, complex(amplitude)),))


def constant_field(grid: SpacetimeGrid, value: complex, mass: float = 0.0,
                   c: float = 1.0, hbar: float = 1.0) -> ComplexField:
    return plane_wave(grid, np.zeros(4), value, mass, c, hbar, off_shell=True)


def superpose(*fields: ComplexField) -> ComplexField:
    first = fields[0]
    for f in fields[1:]:
        if f.grid.shape != first.grid.shape or not np.allclose(f.grid.origin, first.grid.origin) \
                or not np.allclose(f.grid.spacing, first.grid.spacing):
            raise DimMismatch("fields live on different grids")
        if (f.mass, f.c, f.hbar) != (first.mass, first.c, first.hbar):
            raise ValueError("fields have different physical parameters")
    values = sum(f.values for f in fields)
    waves = () if any(not f.waves for f in fields) else sum((f.waves for f in fields), ())
    return ComplexField(first.grid, values, first.mass, first.c, first.hbar, waves)


def kg_residual(field: ComplexField, mode: str = "grid") -> float:
    """Max-norm of ``(box + mu^2) psi`` over interior nodes, ``box = d0^2 - laplacian``.

    ``mode="grid"`` uses second-order central differences; ``mode="analytic"``
    differentiates the plane-wave components exactly.
    """
    shape = field.grid.shape
    if any(n < 3 for n in shape):
        raise GridError("grid too small for a residual")
    interior = tuple(slice(1, -1) for _ in range(4))
    if mode == "analytic":
        field._need_waves()
        x = field.grid.coords()[interior]
        r = np.zeros(x.shape[:-1], dtype=complex)
        for k, A in field.waves:
            kk = k @ MINKOWSKI @ k
            r += A * (field.mu2 - kk) * np.exp(-1j * (x @ lower(k)))
        return float(np.max(np.abs(r)))
    if mode != "grid":
        raise ValueError(f"unknown mode {mode!r}")
    v = field.values
    h = field.grid.spacing
    box = np.zeros(tuple(n - 2 for n in shape), dtype=complex)
    for ax in range(4):
        plus = [slice(1, -1)] * 4
        minus = [slice(1, -1)] * 4
        plus[ax] = slice(2, None)
        minus[ax] = slice(None, -2)
        d2 = (v[tuple(plus)] - 2 * v[interior] + v[tuple(minus)]) / h[ax] ** 2
        box += MINKOWSKI[ax, ax] * d2
    return float(np.max(np.abs(box + field.mu2 * v[interior])))


def field_gradient(field: ComplexField, node, mode: str = "analytic") -> np.ndarray:
    """``d_mu psi`` (lower index) at an interior ``node``."""
    node = tuple(int(i) for i in node)
    if len(node) != 4:
        raise DimMismatch("node index needs four components")
    if not field.grid.is_interior(node):
        raise BoundaryNode(f"node {node} is on the grid boundary")
    if mode == "analytic":
        field._need_waves()
        return _wave_gradient(field.waves, field.grid.point(node))
    if mode != "grid":
        raise ValueError(f"unknown mode {mode!r}")
    v = field.values
    h = field.grid.spacing
    out = np.empty(4, dtype=complex)
    for ax in range(4):
        up, dn = list(node), list(node)
        up[ax] += 1
        dn[ax] -= 1
        out[ax] = (v[tuple(up)] - v[tuple(dn)]) / (2 * h[ax])
    return out


def _wave_gradient(waves, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros(4, dtype=complex)
    for k, A in waves:
        kl = lower(k)
        out += -1j * kl * A * np.exp(-1j * (kl @ x))
    return out


def _value_at(field: ComplexField, node, mode: str) -> complex:
    if mode == "analytic":
        return field.evaluate(field.grid.point(node))
    return complex(field.values[tuple(node)])


@dataclass(frozen=True)
class FieldMetric:
    node: tuple
    entries: np.ndarray
    sign_convention: int = 1
    signature: tuple = field(init=False)

    def __post_init__(self):
        g = np.asarray(self.entries, dtype=float)
        if np.max(np.abs(g - g.T)) > 1e-12 * (1.0 + np.max(np.abs(g))):
            raise QSMetricError("field metric is not symmetric")
        object.__setattr__(self, "entries", g)
        object.__setattr__(self, "signature", signature(g))


def _gradient_metric(d: np.ndarray, sign: int) -> np.ndarray:
    P = np.outer(d.conj(), d)
    return sign * 0.5 * (P + P.T).real


def config_metric(
    field: ComplexField,
    node,
    include_connection: bool = False,
    sign_convention: int = 1,
    mode: str = "analytic",
) -> FieldMetric:
    """Configuration-space metric ``s Re[conj(d_mu psi) d_nu psi]`` at ``node``.

    With ``include_connection`` the derivative is first made horizontal with
    the pointwise connection: ``d psi - (conj(psi) d psi / |psi|^2) psi``. For a
    single plane wave this removes everything, since the wave is a pure phase.
    """
    if sign_convention not in (1, -1):
        raise ValueError("sign_convention must be +1 or -1")
    d = field_gradient(field, node, mode)
    if include_connection:
        psi = _value_at(field, node, mode)
        n2 = abs(psi) ** 2
        if n2 > 0:
            d = d - (np.conj(psi) * d / n2) * psi
    return FieldMetric(tuple(int(i) for i in node), _gradient_metric(d, sign_convention), sign_convention)


# -- Lorentz transformations ---------------------------------------------------


def boost(rapidity: float, direction=(1.0, 0.0, 0.0)) -> np.ndarray:
    n = np.asarray(direction, dtype=float)
    n = n / np.linalg.norm(n)
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    L = np.eye(4)
    L[0, 0] = ch
    L[0, 1:] = L[1:, 0] = sh * n
    L[1:, 1:] += (ch - 1.0) * np.outer(n, n)
    return L


def rotation(axis, angle: float) -> np.ndarray:
    from scipy.spatial.transform import Rotation

    L = np.eye(4)
    a = np.asarray(axis, dtype=float)
    L[1:, 1:] = Rotation.from_rotvec(angle * a / np.linalg.norm(a)).as_matrix()
    return L


def random_lorentz(rng: np.random.Generator, max_rapidity: float = 1.0) -> np.ndarray:
    """Proper orthochronous transformation: a random rotation after a random boost."""
    from scipy.spatial.transform import Rotation

    L = np.eye(4)
    L[1:, 1:] = Rotation.random(random_state=rng).as_matrix()
    return L @ boost(rng.uniform(-max_rapidity, max_rapidity), rng.normal(size=3))


def _check_lorentz(L: np.ndarray, tol: float = 1e-10):
    if L.shape != (4, 4) or not np.all(np.isfinite(L)):
        raise NotLorentz("Lorentz transformation must be a finite 4x4 matrix")
    r = np.max(np.abs(L.T @ MINKOWSKI @ L - MINKOWSKI))
    if r > tol:
        raise NotLorentz(f"L^T eta L differs from eta by {r:.3e}")


def lorentz_boost_check(
    k,
    L,
    amplitude: complex = 1.0,
    sign_convention: int = 1,
    pairs: int = 100,
    seed: int = 0,
    extent: float = 5.0,
) -> float:
    """Check that the field metric of a plane wave transforms as a (0,2) tensor.

    The wave with vector ``k`` is compared with the transformed wave
    ``L k`` at matched points ``x' = L x``. Returns the larger of the two
    deviations, relative to ``max(1, |g|)``:

    * ``g'(x') - L^-T g(x) L^-1`` over all sampled points;
    * ``dx'. g' dx' - dx. g dx`` for ``dx' = L dx`` on ``pairs`` random
      displacement pairs.
    """
    L = np.asarray(L, dtype=float)
    _check_lorentz(L)
    k = np.asarray(k, dtype=float)
    kp = L @ k
    waves, waves_p = ((k, complex(amplitude)),), ((kp, complex(amplitude)),)
    Linv = np.linalg.inv(L)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    tensor_dev = 0.0
    ds_dev = 0.0
    for _ in range(pairs):
        x = rng.uniform(-extent, extent, size=4)
        dx = rng.normal(size=4)
        g = _gradient_metric(_wave_gradient(waves, x), sign_convention)
        gp = _gradient_metric(_wave_gradient(waves_p, L @ x), sign_convention)
        scale = max(1.0, np.max(np.abs(g)))
        tensor_dev = max(tensor_dev, np.max(np.abs(gp - Linv.T @ g @ Linv)) / scale)
        dxp = L @ dx
        ds_dev = max(ds_dev, abs(dxp @ gp @ dxp - dx @ g @ dx) / (scale * (1.0 + dx @ dx)))
    return float(max(tensor_dev, ds_dev))


# -- file format ---------------------------------------------------------------

_HEADER = re.compile(
    r"^# qsmetric-field v1 dims=(?P<dims>[^ ]+) spacing=(?P<spacing>[^ ]+) origin=(?P<origin>[^ ]+)\s*$"
)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_field(path, field: ComplexField) -> None:
    """Write ``field`` in the columnar ``qsmetric-field v1`` text format.

    One node per line, ``i0 i1 i2 i3 re im``, in C (row-major) order; floats
    use the shortest representation that round-trips.
    """
    g = field.grid
    lines = [
        "# qsmetric-field v1 dims={} spacing={} origin={}".format(
            ",".join(str(n) for n in g.shape),
            ",".join(_fmt(h) for h in g.spacing),
            ",".join(_fmt(o) for o in g.origin),
        )
    ]
    for idx in np.ndindex(*g.shape):
        v = field.values[idx]
        lines.append(" ".join(str(i) for i in idx) + f" {_fmt(v.real)} {_fmt(v.imag)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_field(path, mass: float = 0.0, c: float = 1.0, hbar: float = 1.0) -> ComplexField:
    """Read a ``qsmetric-field v1`` file. The result carries no closed form."""
    text = Path(path).read_text().splitlines()
    if not text:
        raise GridError("empty field file")
    m = _HEADER.match(text[0])
    if not m:
        raise GridError("missing or malformed qsmetric-field header")
    dims = tuple(int(x) for x in m["dims"].split(","))
    spacing = [float(x) for x in m["spacing"].split(",")]
    origin = [float(x) for x in m["origin"].split(",")]
    if len(dims) != 4 or len(spacing) != 4 or len(origin) != 4:
        raise GridError("header needs four dims, spacings and origins")
    grid = SpacetimeGrid.uniform(dims, spacing, origin)
    values = np.full(dims, np.nan, dtype=complex)
    for lineno, line in enumerate(text[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 6:
            raise GridError(f"line {lineno}: expected 6 columns")
        idx = tuple(int(p) for p in parts[:4])
        if any(not 0 <= i < n for i, n in zip(idx, dims)):
            raise GridError(f"line {lineno}: node {idx} outside the grid")
        values[idx] = complex(float(parts[4]), float(parts[5]))
    if np.any(np.isnan(values)):
        raise GridError("field file does not cover every node")
    return ComplexField(grid, values, mass, c, hbar)
