"""Acceptance checks, one function per criterion.

Each check returns a report dictionary::

    {"criterion": n, "name": ..., "passed": bool,
     "checks": {label: {"value": x, "tol": t, "op": "<=" | ">=" | ">", "passed": bool}}}

Reference values come from oracles that avoid the code path under test where
possible: overlap polarization instead of derivatives, quadrature instead of
the discretized packet, finite differences of the gauge phase, and so on.
"""

from __future__ import annotations

import io
import json
import tempfile
from contextlib import redirect_stdout
from pathlib import Path

import numpy as np

from . import evolution as ev
from . import fields as fl
from . import geometry as geo
from . import models as md

__all__ = ["CRITERIA", "run_criterion", "overlap_metric"]


def _check(value, tol, op="<="):
    value = float(value)
    ok = {"<=": value <= tol, ">=": value >= tol, ">": value > tol}[op]
    return {"value": value, "tol": tol, "op": op, "passed": bool(ok)}


def _report(n, name, checks):
    return {
        "criterion": n,
        "name": name,
        "passed": all(c["passed"] for c in checks.values()),
        "checks": checks,
    }


def overlap_metric(evaluator, p, eps: float = 1e-4) -> np.ndarray:
    """Metric from state overlaps only, by polarization.

    ``g(v, v) ~ (1 - |<psi(p - eps v/2)|psi(p + eps v/2)>|^2) / eps^2`` is the
    unit-sphere line element ``4 (1 - |overlap|^2)`` divided by four.
    """
    p = np.asarray(p, dtype=float)
    m = p.size

    def unit(x):
        psi = np.asarray(evaluator(x), dtype=complex)
        return psi / np.linalg.norm(psi)

    def quad(v):
        o = np.vdot(unit(p - 0.5 * eps * v), unit(p + 0.5 * eps * v))
        return (1.0 - abs(o) ** 2) / eps**2

    E = np.eye(m)
    diag = [quad(E[i]) for i in range(m)]
    g = np.diag(diag)
    for i in range(m):
        for j in range(i + 1, m):
            g[i, j] = g[j, i] = 0.5 * (quad(E[i] + E[j]) - diag[i] - diag[j])
    return g


def bloch_grid():
    thetas = np.arange(1, 10) * np.pi / 10
    phis = np.arange(9) * 2 * np.pi / 9
    return [(t, f) for t in thetas for f in phis]


def criterion_1(seed: int = 0):
    fam = md.bloch_family()
    fd = fam.without_gradient(1e-5)
    dev_a = dev_fd = dev_o = 0.0
    for t, f in bloch_grid():
        exact = np.diag([0.25, np.sin(t) ** 2 / 4])
        dev_a = max(dev_a, np.max(np.abs(geo.metric(fam, [t, f]).entries - exact)))
        dev_fd = max(dev_fd, np.max(np.abs(geo.metric(fd, [t, f]).entries - exact)))
        dev_o = max(dev_o, np.max(np.abs(overlap_metric(fam.evaluator, [t, f]) - exact)))
    return _report(1, "Bloch metric closed form", {
        "analytic_max_dev": _check(dev_a, 1e-8),
        "finite_difference_max_dev": _check(dev_fd, 1e-5),
        "overlap_oracle_max_dev": _check(dev_o, 1e-6),
    })


def _gauge_trials(seed: int, trials: int = 200, hilbert_dim: int = 4):
    rng = md.rng_from_seed(seed)
    for t in range(trials):
        m = int(rng.integers(1, 4))
        fam = md.random_family(hilbert_dim, m, int(rng.integers(2**32)))
        alpha = geo.random_polynomial_gauge(m, rng, degree=3)
        p = rng.uniform(-1.0, 1.0, size=m)
        yield fam, alpha, p


def gauge_deviations(seed: int = 0, trials: int = 200, connection: bool = True, analytic: bool = True):
    """Worst metric and connection-shift deviations over random gauge trials."""
    metric_dev = shift_dev = 0.0
    for fam, alpha, p in _gauge_trials(seed, trials):
        if not analytic:
            fam = fam.without_gradient()
        gauged = geo.apply_gauge(fam, alpha)
        g0 = geo.metric(fam, p, connection=connection).entries
        g1 = geo.metric(gauged, p, connection=connection).entries
        metric_dev = max(metric_dev, np.max(np.abs(g1 - g0)))
        if connection:
            # finite-difference gradient of the phase, independent of the gauge's own gradient
            dalpha = geo.GaugeTransform(alpha.alpha).grad(p, 1e-5)
            shift = geo.berry_connection(gauged, p) - (geo.berry_connection(fam, p) - dalpha)
            shift_dev = max(shift_dev, np.max(np.abs(shift)))
    return float(metric_dev), float(shift_dev)


def criterion_2(seed: int = 0):
    dev_a, _ = gauge_deviations(seed, analytic=True)
    dev_fd, _ = gauge_deviations(seed, analytic=False)
    dev_bad, _ = gauge_deviations(seed, connection=False)
    return _report(2, "gauge invariance of the metric", {
        "max_metric_dev_analytic": _check(dev_a, 1e-6),
        "max_metric_dev_finite_difference": _check(dev_fd, 1e-6),
        "negative_control_no_connection": _check(dev_bad, 1e-3, ">"),
    })


def criterion_3(seed: int = 0):
    _, shift_a = gauge_deviations(seed, analytic=True)
    _, shift_fd = gauge_deviations(seed, analytic=False)
    return _report(3, "Berry connection shift law", {
        "shift_residual_analytic": _check(shift_a, 1e-5),
        "shift_residual_finite_difference": _check(shift_fd, 1e-5),
    })


def random_coordinate_map(m: int, rng: np.random.Generator):
    """Smooth invertible map ``q -> L q + b sin(q)`` and its Jacobian."""
    L = np.eye(m) + 0.3 * rng.normal(size=(m, m))
    while np.linalg.svd(L, compute_uv=False)[-1] < 0.3:
        L = np.eye(m) + 0.3 * rng.normal(size=(m, m))
    b = rng.uniform(-0.1, 0.1, size=m)

    def phi(q):
        return L @ q + b * np.sin(q)

    def jac(q):
        return L + np.diag(b * np.cos(q))

    return phi, jac


def criterion_4(seed: int = 0, trials: int = 50, segments: int = 100):
    rng = md.rng_from_seed(seed + 4)
    cases = []
    tensor_dev = 0.0
    for _ in range(trials):
        m = int(rng.integers(1, 4))
        fam = md.random_family(4, m, int(rng.integers(2**32)))
        phi, jac = random_coordinate_map(m, rng)
        new = geo.reparametrize(fam, phi, jac).without_gradient()
        cases.append((fam, new, phi))
        q = rng.uniform(-1.0, 1.0, size=m)
        expected = geo.transform_metric(geo.metric(fam, phi(q)), jac(q)).entries
        tensor_dev = max(tensor_dev, np.max(np.abs(geo.metric(new, q).entries - expected)))

    ds_dev = 0.0
    tau = 1e-5
    for i in range(segments):
        fam, new, phi = cases[i % len(cases)]
        m = fam.param_count
        q0 = rng.uniform(-1.0, 1.0, size=m)
        v = rng.normal(size=m) * 0.3
        for t in np.linspace(0.0, 1.0, 5):
            q = q0 + t * v
            ds_q = v @ geo.metric(new, q).entries @ v
            lam_dot = (phi(q + tau * v) - phi(q - tau * v)) / (2 * tau)
            ds_lam = lam_dot @ geo.metric(fam, phi(q)).entries @ lam_dot
            ds_dev = max(ds_dev, abs(ds_q - ds_lam))
    return _report(4, "coordinate covariance", {
        "tensor_law_max_dev": _check(tensor_dev, 1e-5),
        "line_element_max_dev": _check(ds_dev, 1e-5),
    })


def criterion_5(seed: int = 0, families: int = 500):
    rng = md.rng_from_seed(seed + 5)
    herm = form_dev = 0.0
    min_eig = np.inf
    for _ in range(families):
        dim = int(rng.integers(2, 9))
        m = int(rng.integers(1, 5))
        fam = md.random_family(dim, m, int(rng.integers(2**32)))
        p = rng.uniform(-2.0, 2.0, size=m)
        T = geo.qgt(fam, p)
        herm = max(herm, T.hermiticity_residual)
        min_eig = min(min_eig, T.min_eigenvalue)
        g12 = geo.metric(fam, p, form="symmetrized").entries
        g15 = geo.metric(fam, p, form="direct").entries
        form_dev = max(form_dev, np.max(np.abs(g12 - g15)))
    return _report(5, "quantum geometric tensor structure", {
        "hermiticity_residual": _check(herm, 1e-10),
        "min_eigenvalue": _check(min_eig, -1e-10, ">="),
        "symmetrized_vs_direct": _check(form_dev, 1e-9),
    })


def criterion_6(seed: int = 0, hamiltonians: int = 20, steps: int = 200):
    rng = md.rng_from_seed(seed + 6)
    worst = 0.0
    for _ in range(hamiltonians):
        H = md.random_hermitian(4, rng)
        psi0 = md.random_state(4, rng)
        dt = 1e-3 / ev.anandan_speed(H, psi0)
        trace = ev.evolve(H, psi0, dt * np.arange(steps + 1))
        worst = max(worst, ev.speed_consistency(trace, H))
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    omega = 1.0
    rabi = ev.evolve(0.5 * omega * sx, [1.0, 0.0], np.linspace(0.0, np.pi / omega, 10001))
    return _report(6, "energy-variance speed law", {
        "speed_consistency_max": _check(worst, 1e-3),
        "rabi_path_length_error": _check(abs(rabi.cumulative_s[-1] - np.pi), 1e-4),
    })


def _rx(beta):
    return np.array([[np.cos(beta / 2), -1j * np.sin(beta / 2)],
                     [-1j * np.sin(beta / 2), np.cos(beta / 2)]])


def criterion_7(seed: int = 0, steps: int = 1000):
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    H = 0.5 * sx
    psi0 = np.array([1.0, 0.0])
    duration = (np.pi / 2) / ev.anandan_speed(H, psi0)
    adapted = ev.bloch_chart_for(H, psi0)
    tilted = ev.BlochChart(_rx(0.6) @ adapted.rotation)
    a = ev.geodesic_vs_schrodinger(H, psi0, duration, steps=steps, chart=adapted)
    b = ev.geodesic_vs_schrodinger(H, psi0, duration, steps=steps, chart=tilted)
    return _report(7, "Schrodinger path is a geodesic on CP(1)", {
        "deviation_equatorial_chart": _check(a.deviation, 1e-3),
        "deviation_tilted_chart": _check(b.deviation, 1e-3),
        "quarter_circle_length_error": _check(abs(a.s[-1] - np.pi / 2), 1e-8),
        "speed_drift": _check(max(a.speed_drift, b.speed_drift), 1e-5),
    })


def gaussian_quadrature_metric(sigma: float) -> float:
    """``<d psi|d psi>`` for the continuum packet by adaptive quadrature."""
    from scipy.integrate import quad

    norm2, _ = quad(lambda x: np.exp(-(x**2) / (2 * sigma**2)), -np.inf, np.inf)
    val, _ = quad(lambda x: (x / (2 * sigma**2)) ** 2 * np.exp(-(x**2) / (2 * sigma**2)), -np.inf, np.inf)
    return val / norm2


def criterion_8(seed: int = 0):
    closed = quad_dev = trans = 0.0
    for sigma in (0.5, 1.0, 2.0):
        quad_dev = max(quad_dev, abs(gaussian_quadrature_metric(sigma) * 4 * sigma**2 - 1.0))
        g0 = geo.metric(md.gaussian_family(md.GaussianFamilySpec(sigma)), [0.0]).entries[0, 0]
        closed = max(closed, abs(g0 * 4 * sigma**2 - 1.0))
        for l in (0.37 * sigma, -1.3 * sigma, 2.9 * sigma):
            gl = geo.metric(md.gaussian_family(md.GaussianFamilySpec(sigma, center=l)), [l]).entries[0, 0]
            trans = max(trans, abs(gl - g0))
            shifted = geo.metric(md.gaussian_family(md.GaussianFamilySpec(sigma)), [l / 3]).entries[0, 0]
            trans = max(trans, abs(shifted - g0))
    return _report(8, "Gaussian packet configuration limit", {
        "quadrature_oracle_closed_form": _check(quad_dev, 1e-8),
        "metric_times_4sigma2_minus_1": _check(closed, 2e-3),
        "translation_max_dev": _check(trans, 1e-6),
    })


def kg_convergence_order(k_spatial=(3.0, 2.0, 1.0), mass: float = 1.0, extent: float = 0.8,
                         sizes=(9, 17, 33)) -> float:
    res = []
    for n in sizes:
        grid = fl.SpacetimeGrid.uniform((n,) * 4, (extent / (n - 1),) * 4)
        wave = fl.plane_wave(grid, fl.on_shell_k(k_spatial, mass), 1.0, mass)
        res.append(fl.kg_residual(wave, "grid"))
    return float(min(np.log2(res[i] / res[i + 1]) for i in range(len(res) - 1)))


def criterion_9(seed: int = 0):
    rng = md.rng_from_seed(seed + 9)
    grid = fl.SpacetimeGrid.uniform((7,) * 4, (0.25,) * 4, (-0.75,) * 4)
    residual = rank = prop = 0.0
    for _ in range(10):
        mass = float(rng.uniform(0.0, 2.0))
        k = fl.on_shell_k(rng.normal(size=3), mass)
        A = complex(rng.normal(), rng.normal())
        wave = fl.plane_wave(grid, k, A, mass)
        residual = max(residual, fl.kg_residual(wave, "analytic"))
        node = tuple(int(i) for i in rng.integers(1, 6, size=4))
        g = fl.config_metric(wave, node).entries
        s = np.linalg.svd(g, compute_uv=False)
        rank = max(rank, s[1] / s[0])
        kl = fl.lower(k)
        target = abs(A) ** 2 * np.outer(kl, kl)
        prop = max(prop, np.max(np.abs(g - target)) / np.max(np.abs(target)))
    massless = fl.plane_wave(grid, fl.on_shell_k([1.0, 0.0, 0.0]), 1.0)
    sig = fl.config_metric(massless, (3, 3, 3, 3), sign_convention=-1).signature
    return _report(9, "Klein-Gordon plane waves and their metric", {
        "analytic_residual": _check(residual, 1e-10),
        "grid_convergence_order": _check(kg_convergence_order(), 1.8, ">="),
        "second_singular_value_ratio": _check(rank, 1e-8),
        "k_k_proportionality_dev": _check(prop, 1e-6),
        "massless_negative_eigenvalues": _check(sig[1], 1, ">="),
    })


def criterion_10(seed: int = 0, transforms: int = 10):
    rng = md.rng_from_seed(seed + 10)
    worst = 0.0
    for _ in range(transforms):
        mass = float(rng.uniform(0.0, 2.0))
        k = fl.on_shell_k(rng.normal(size=3), mass)
        L = fl.random_lorentz(rng)
        worst = max(worst, fl.lorentz_boost_check(k, L, seed=int(rng.integers(2**32))))
    rest = fl.on_shell_k([0.0, 0.0, 0.0], 1.0)
    boost_dev = fl.lorentz_boost_check(rest, fl.boost(0.5, (1, 0, 0)))
    rot_dev = fl.lorentz_boost_check(fl.on_shell_k([0.3, -0.2, 0.5], 1.0), fl.rotation((1, 1, 0), 0.7))
    return _report(10, "Lorentz covariance of the field metric", {
        "random_transform_max_dev": _check(worst, 1e-6),
        "rest_frame_boost_dev": _check(boost_dev, 1e-6),
        "rotation_dev": _check(rot_dev, 1e-6),
    })


def criterion_11(seed: int = 0, points: int = 50):
    rng = md.rng_from_seed(seed + 11)

    def chart(z):
        return np.array([1.0, z[0]])

    def normalized(q):
        z = q[0] + 1j * q[1]
        return np.array([1.0, z]) / np.sqrt(1.0 + abs(z) ** 2)

    real_chart = geo.StateFamily(normalized, param_count=2, hilbert_dim=2)
    worst = scale_dev = 0.0
    for _ in range(points):
        z = complex(*rng.normal(size=2))
        G = geo.fs_holomorphic(chart, [z]).entries
        ref = geo.metric(real_chart, [z.real, z.imag]).entries
        worst = max(worst, np.max(np.abs(G - ref)))
        G2 = geo.fs_holomorphic(lambda w: (2.0 - 1.5j) * chart(w), [z]).entries
        scale_dev = max(scale_dev, np.max(np.abs(G2 - G)))
    return _report(11, "holomorphic Fubini-Study form", {
        "holomorphic_vs_real_chart": _check(worst, 1e-6),
        "projective_scale_invariance": _check(scale_dev, 1e-6),
    })


DETERMINISM_COMMANDS = [
    ["metric"],
    ["gauge-check", "--trials", "20"],
    ["evolve"],
    ["geodesic", "--steps", "200"],
    ["kg"],
    ["accept", "--criterion", "11"],
]


def criterion_12(seed: int = 0):
    """Run each CLI command twice per output format and compare the produced bytes."""
    from .cli import main

    mismatches = failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for i, cmd in enumerate(DETERMINISM_COMMANDS):
            for fmt in ("csv", "json"):
                outs = []
                for run in range(2):
                    path = Path(tmp) / f"{i}-{fmt}-{run}.out"
                    buf = io.StringIO()
                    with redirect_stdout(buf):
                        code = main(cmd + ["--seed", str(seed), "--out", str(path), "--format", fmt])
                    failures += code != 0
                    outs.append(path.read_bytes() + buf.getvalue().encode() if path.exists() else b"")
                mismatches += outs[0] != outs[1]
    return _report(12, "deterministic CLI output", {
        "mismatching_outputs": _check(mismatches, 0),
        "failed_runs": _check(failures, 0),
    })


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
}


def run_criterion(n: int, seed: int = 0) -> dict:
    if n not in CRITERIA:
        raise KeyError(f"no acceptance criterion {n}")
    return CRITERIA[n](seed)


def format_report(report: dict) -> str:
    status = "PASS" if report["passed"] else "FAIL"
    parts = [f"{k}={v['value']:.3e}{v['op']}{v['tol']:g}" for k, v in report["checks"].items()]
    return f"[{status}] criterion {report['criterion']:>2} {report['name']}: " + ", ".join(parts)


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2)
