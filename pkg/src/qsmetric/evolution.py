"""Schrodinger evolution viewed through the Fubini-Study metric.

Path lengths here use the overlap convention of :func:`qsmetric.hilbert.fs_distance`,
in which CP(1) is the unit sphere and the projective speed is
``ds/dt = 2 dH / hbar``. In that convention the Bloch chart metric is
``diag(1, sin(theta)^2)``, four times the bare metric of
:func:`qsmetric.geometry.metric`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ChartSingularity, DegenerateMetric, DimMismatch, QSMetricError
from .geometry import MetricTensor, StateFamily, metric
from .hilbert import (
    HermitianOperator,
    _as_operator,
    _check_normalized,
    fs_distance,
    state,
    variance,
)
from .models import bloch_family, bloch_state

__all__ = [
    "EvolutionTrace",
    "GeodesicState",
    "BlochChart",
    "GeodesicComparison",
    "evolve",
    "anandan_speed",
    "speed_consistency",
    "christoffel",
    "geodesic_integrate",
    "bloch_chart_for",
    "geodesic_vs_schrodinger",
]

MAX_EXACT_DIM = 64
ZERO_SPEED = 1e-12


@dataclass(frozen=True)
class EvolutionTrace:
    times: np.ndarray
    states: np.ndarray
    hbar: float
    cumulative_s: np.ndarray

    @property
    def step_s(self) -> np.ndarray:
        return np.diff(self.cumulative_s)


def _propagate(H: HermitianOperator, psi0: np.ndarray, elapsed, hbar: float) -> np.ndarray:
    try:
        w, V = np.linalg.eigh(H.entries)
    except np.linalg.LinAlgError as exc:
        raise QSMetricError(f"eigendecomposition failed: {exc}") from exc
    c0 = V.conj().T @ psi0
    phases = np.exp(-1j * np.outer(np.asarray(elapsed, dtype=float), w) / hbar)
    states = (phases * c0) @ V.T
    return states / np.linalg.norm(states, axis=1)[:, None]


def evolve(H, psi0, times, hbar: float = 1.0) -> EvolutionTrace:
    """Exact evolution ``exp(-i H (t - t0)/hbar) psi0`` on an increasing time grid."""
    H = _as_operator(H)
    psi0 = state(psi0)
    if psi0.size != H.dim:
        raise DimMismatch(f"operator dim {H.dim} vs state dim {psi0.size}")
    if H.dim > MAX_EXACT_DIM:
        raise ValueError(f"exact propagation supports dim <= {MAX_EXACT_DIM}")
    _check_normalized(psi0)
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 1 or np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    states = _propagate(H, psi0, t - t[0], hbar)
    steps = [fs_distance(states[k], states[k + 1]) for k in range(t.size - 1)]
    cum = np.concatenate([[0.0], np.cumsum(steps)])
    return EvolutionTrace(t, states, float(hbar), cum)


def anandan_speed(H, psi, hbar: float = 1.0) -> float:
    """Projective speed ``2 sqrt(<H^2> - <H>^2) / hbar``."""
    return 2.0 * np.sqrt(variance(H, psi)) / hbar


def speed_consistency(trace: EvolutionTrace, H) -> float:
    """Worst relative mismatch between overlap and variance step lengths.

    Compares ``fs_distance(psi_k, psi_k+1)`` with ``anandan_speed(psi_k) * dt``
    at every step. Steps with zero speed are skipped. Requires
    ``speed * dt <= 0.01`` and checks that the energy spread is conserved.
    """
    H = _as_operator(H)
    speeds = np.array([anandan_speed(H, s, trace.hbar) for s in trace.states])
    if np.max(np.abs(speeds - speeds[0])) > 1e-10 * max(1.0, speeds[0]):
        raise QSMetricError("energy spread is not conserved along the trace")
    dt = np.diff(trace.times)
    worst = 0.0
    for k, ds in enumerate(trace.step_s):
        v = speeds[k] * dt[k]
        if speeds[k] < ZERO_SPEED:
            continue
        if v > 0.01 + 1e-12:
            raise ValueError(f"step {k} too coarse: speed*dt = {v:.3e} > 0.01")
        worst = max(worst, abs(ds - v) / (v + 1e-300))
    return worst


# -- geodesics -----------------------------------------------------------------


def _metric_array(metric_field, p) -> np.ndarray:
    g = metric_field(np.asarray(p, dtype=float))
    return np.asarray(g.entries if isinstance(g, MetricTensor) else g, dtype=float)


def christoffel(metric_field: Callable, p, step: float = 1e-5, richardson: bool = False) -> np.ndarray:
    """Levi-Civita symbols ``Gamma[a, b, c]`` of a metric field by central differences.

    ``Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_db - d_d g_bc)``. ``metric_field``
    maps a point to a :class:`MetricTensor` or a square array.
    """
    p = np.asarray(p, dtype=float)
    g = _metric_array(metric_field, p)
    m = g.shape[0]
    if p.size != m:
        raise DimMismatch(f"metric is {m}x{m} but point has {p.size} coordinates")
    w = np.linalg.eigvalsh(g)
    if np.min(np.abs(w)) <= 1e-8:
        raise DegenerateMetric(f"metric is singular at {p} (min |eig| = {np.min(np.abs(w)):.3e})")

    def dg_at(h):
        out = np.empty((m, m, m))
        for b in range(m):
            e = np.zeros(m)
            e[b] = h
            out[b] = (_metric_array(metric_field, p + e) - _metric_array(metric_field, p - e)) / (2 * h)
        return out

    dg = dg_at(step)
    if richardson:
        dg = (4.0 * dg_at(step / 2) - dg) / 3.0
    # lower[d, b, c] = d_b g_dc + d_c g_db - d_d g_bc
    lower = np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg
    gamma = 0.5 * np.linalg.solve(g, lower.reshape(m, m * m)).reshape(m, m, m)
    return 0.5 * (gamma + gamma.transpose(0, 2, 1))


@dataclass(frozen=True)
class GeodesicState:
    chart_point: np.ndarray
    velocity: np.ndarray


def geodesic_integrate(
    metric_field: Callable,
    start: GeodesicState,
    s_grid,
    max_step: float = 1e-2,
    guard: Optional[Callable[[np.ndarray], None]] = None,
    fd_step: float = 1e-5,
) -> list[GeodesicState]:
    """Integrate ``u'' + Gamma(u', u') = 0`` with classical RK4.

    The start velocity must have unit length under the metric. Each interval
    of ``s_grid`` is split into substeps no longer than ``max_step``.
    ``guard(point)`` may raise :class:`ChartSingularity`.
    """
    u = np.asarray(start.chart_point, dtype=float).copy()
    v = np.asarray(start.velocity, dtype=float).copy()
    s = np.asarray(s_grid, dtype=float)
    if np.any(np.diff(s) < 0):
        raise ValueError("s grid must be nondecreasing")
    speed2 = float(v @ _metric_array(metric_field, u) @ v)
    if abs(speed2 - 1.0) > 1e-8:
        raise ValueError(f"start velocity has g(u,u) = {speed2!r}, expected 1")

    def rhs(y):
        x, dx = y[: u.size], y[u.size:]
        if guard is not None:
            guard(x)
        G = christoffel(metric_field, x, fd_step)
        return np.concatenate([dx, -np.einsum("abc,b,c->a", G, dx, dx)])

    y = np.concatenate([u, v])
    out = [GeodesicState(u.copy(), v.copy())]
    for k in range(s.size - 1):
        span = s[k + 1] - s[k]
        n = max(1, int(np.ceil(span / max_step)))
        h = span / n
        for _ in range(n):
            if h == 0:
                break
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * h * k1)
            k3 = rhs(y + 0.5 * h * k2)
            k4 = rhs(y + h * k3)
            y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(GeodesicState(y[: u.size].copy(), y[u.size:].copy()))
    return out


@dataclass(frozen=True)
class BlochChart:
    """Polar chart on CP(1) after a fixed unitary ``rotation``.

    A state ``psi`` has coordinates ``(theta, phi)`` of ``rotation @ psi`` in
    the standard Bloch chart. Rotations are isometries, so the chart metric
    is always ``diag(1, sin(theta)^2)`` in the unit-sphere convention.
    """

    rotation: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))
    margin: float = 1e-6

    def coords(self, psi) -> np.ndarray:
        a, b = self.rotation @ np.asarray(psi, dtype=complex)
        theta = 2.0 * np.arctan2(abs(b), abs(a))
        self.guard(np.array([theta, 0.0]))
        phi = np.angle(b) - np.angle(a)
        return np.array([theta, phi])

    def state(self, coords) -> np.ndarray:
        return self.rotation.conj().T @ bloch_state(coords[0], coords[1])

    def guard(self, point):
        if np.sin(point[0]) < self.margin:
            raise ChartSingularity(f"theta={float(point[0])!r} is at a pole of the Bloch chart")

    def family(self) -> StateFamily:
        base = bloch_family(margin=0.0)
        R = self.rotation.conj().T
        return StateFamily(
            lambda p: R @ base(p),
            param_count=2,
            hilbert_dim=2,
            gradient=lambda p: base.gradient(p) @ R.T,
        )

    def metric_field(self) -> Callable[[np.ndarray], np.ndarray]:
        """Unit-sphere metric of the chart, computed through :func:`metric`."""
        fam = self.family()

        def field_(p):
            self.guard(p)
            return 4.0 * metric(fam, p).entries

        return field_


def bloch_chart_for(H, psi0) -> BlochChart:
    """Chart in which evolution under ``H`` from ``psi0`` runs along the equator.

    The eigenvectors of ``H`` go to the poles and ``psi0`` to ``phi = 0``.
    """
    H = _as_operator(H)
    _, V = np.linalg.eigh(H.entries)
    R = V.conj().T
    a, b = R @ np.asarray(psi0, dtype=complex)
    phase = np.exp(-1j * (np.angle(b) - np.angle(a))) if abs(a) > 0 and abs(b) > 0 else 1.0
    return BlochChart(np.diag([1.0, phase]) @ R)


@dataclass(frozen=True)
class GeodesicComparison:
    s: np.ndarray
    schrodinger: np.ndarray
    geodesic: np.ndarray
    deviation: float
    speed_drift: float


def _wrap(d):
    return (d + np.pi) % (2 * np.pi) - np.pi


def geodesic_vs_schrodinger(
    H,
    psi0,
    duration: float,
    hbar: float = 1.0,
    steps: int = 2000,
    chart: Optional[BlochChart] = None,
    equidistance_tol: float = 1e-8,
) -> GeodesicComparison:
    """Compare a two-level Schrodinger path with the Fubini-Study geodesic.

    The evolved states are mapped into ``chart`` and parametrized by their
    accumulated path length. A geodesic is launched from the same point with
    the same unit direction and integrated over the same arc lengths. The
    result reports the largest chart distance between the two paths.

    ``psi0`` must be equidistant from both eigenstates of ``H`` so that the
    projected path is a great circle. A stationary start gives zero.
    """
    H = _as_operator(H)
    psi0 = state(psi0)
    if H.dim != 2 or psi0.size != 2:
        raise DimMismatch("the geodesic comparison is defined on two-level systems")
    _check_normalized(psi0)
    speed = anandan_speed(H, psi0, hbar)
    if speed < ZERO_SPEED:
        s = np.zeros(1)
        point = np.zeros((1, 2))
        return GeodesicComparison(s, point, point, 0.0, 0.0)
    _, V = np.linalg.eigh(H.entries)
    pops = np.abs(V.conj().T @ psi0) ** 2
    if abs(pops[0] - pops[1]) > equidistance_tol:
        raise ValueError("psi0 is not equidistant from the eigenstates of H")
    chart = chart or bloch_chart_for(H, psi0)

    t = np.linspace(0.0, duration, steps + 1)
    trace = evolve(H, psi0, t, hbar)
    schr = np.array([chart.coords(p) for p in trace.states])
    schr[:, 1] = np.unwrap(schr[:, 1])

    # initial direction from a symmetric difference of the exact flow
    delta = 1e-4 / speed
    pair = _propagate(H, psi0, [-delta, delta], hbar)
    c_minus, c_plus = chart.coords(pair[0]), chart.coords(pair[1])
    du = np.array([c_plus[0] - c_minus[0], _wrap(c_plus[1] - c_minus[1])]) / (2 * delta * speed)
    field_ = chart.metric_field()
    u0 = schr[0]
    du = du / np.sqrt(du @ field_(u0) @ du)

    traj = geodesic_integrate(field_, GeodesicState(u0, du), trace.cumulative_s, guard=chart.guard)
    geo = np.array([g.chart_point for g in traj])
    speeds = np.array([g.velocity @ field_(g.chart_point) @ g.velocity for g in traj])
    diff = geo - schr
    diff[:, 1] = _wrap(diff[:, 1])
    dev = float(np.max(np.hypot(diff[:, 0], diff[:, 1])))
    return GeodesicComparison(trace.cumulative_s, schr, geo, dev, float(np.max(np.abs(speeds - 1.0))))
