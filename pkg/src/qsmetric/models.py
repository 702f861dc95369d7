"""Built-in state families.

Random objects are drawn from ``numpy.random.default_rng`` seeded through
``numpy.random.SeedSequence(seed)`` (PCG64), so a given seed reproduces the
same generators and reference state on every platform numpy supports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartSingularity, GridError
from .geometry import StateFamily
from .hilbert import normalize

__all__ = [
    "BLOCH_MARGIN",
    "rng_from_seed",
    "random_hermitian",
    "random_state",
    "bloch_state",
    "bloch_family",
    "GaussianFamilySpec",
    "gaussian_family",
    "random_family",
    "unitary_orbit_family",
    "constant_family",
    "pure_gauge_family",
    "product_family",
]

BLOCH_MARGIN = 1e-3


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (a + a.conj().T)


def random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    return normalize(rng.normal(size=dim) + 1j * rng.normal(size=dim))


def bloch_state(theta: float, phi: float) -> np.ndarray:
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def bloch_family(margin: float = BLOCH_MARGIN) -> StateFamily:
    """``(theta, phi) -> (cos(theta/2), exp(i phi) sin(theta/2))``.

    Queries closer than ``margin`` to either pole raise :class:`ChartSingularity`.
    """

    def guard(p):
        if not margin <= p[0] <= np.pi - margin:
            raise ChartSingularity(f"theta={float(p[0])!r} is within {margin} of a pole")

    def evaluator(p):
        guard(p)
        return bloch_state(p[0], p[1])

    def gradient(p):
        guard(p)
        t, f = p
        return np.array([
            [-0.5 * np.sin(t / 2), 0.5 * np.exp(1j * f) * np.cos(t / 2)],
            [0.0, 1j * np.exp(1j * f) * np.sin(t / 2)],
        ])

    return StateFamily(evaluator, param_count=2, hilbert_dim=2, gradient=gradient)


@dataclass(frozen=True)
class GaussianFamilySpec:
    """Discretized Gaussian packet centred at a movable position ``l``.

    The spatial grid has ``n_points`` nodes over
    ``[center - half_width*sigma, center + half_width*sigma]`` and stays fixed
    while ``l`` varies; queries must keep ``l +- 5 sigma`` inside it. The
    truncated tail then shifts the metric by at most about 1e-6; recentre the
    grid on the query point (``center=l``) when that matters.
    """

    sigma: float
    center: float = 0.0
    n_points: int = 801
    half_width: float = 8.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise GridError("sigma must be positive")
        if self.n_points < 401:
            raise GridError("the spatial grid needs at least 401 points")
        if self.half_width < 5.0:
            raise GridError("the grid must span at least 10 sigma")

    @property
    def grid(self) -> np.ndarray:
        w = self.half_width * self.sigma
        return np.linspace(self.center - w, self.center + w, self.n_points)


def gaussian_family(spec: GaussianFamilySpec) -> StateFamily:
    """One-parameter family ``psi_l(x_j) ~ exp(-(x_j - l)^2 / (4 sigma^2))``.

    Amplitudes are normalized on the grid, so ``|psi|^2`` is a discrete
    Gaussian of standard deviation ``sigma``. The metric in ``l`` tends to
    ``1/(4 sigma^2)``.
    """
    x = spec.grid
    s2 = spec.sigma**2
    reach = (spec.half_width - 5.0) * spec.sigma

    def packet(l):
        if abs(l - spec.center) > reach + 1e-12 * spec.sigma:
            raise GridError(f"l={float(l)!r} leaves less than 5 sigma of grid on one side")
        u = np.exp(-((x - l) ** 2) / (4 * s2))
        return u, np.linalg.norm(u)

    def evaluator(p):
        u, r = packet(p[0])
        return (u / r).astype(complex)

    def gradient(p):
        l = p[0]
        u, r = packet(l)
        a = u / r
        du = u * (x - l) / (2 * s2)
        return ((du - a * (a @ du)) / r)[None, :].astype(complex)

    return StateFamily(evaluator, param_count=1, hilbert_dim=x.size, gradient=gradient)


def _expm_and_derivatives(generators: np.ndarray, lam: np.ndarray):
    """``U = exp(-i sum lam_mu G_mu)`` and ``dU/dlam_mu`` via the Daleckii-Krein formula."""
    K = np.tensordot(lam, generators, axes=1)
    w, V = np.linalg.eigh(K)
    e = np.exp(-1j * w)
    U = (V * e) @ V.conj().T
    dw = w[:, None] - w[None, :]
    # divided difference of exp(-i x), written with sinc for stability at dw -> 0
    phi = -1j * np.exp(-0.5j * (w[:, None] + w[None, :])) * np.sinc(dw / (2 * np.pi))
    dU = np.array([V @ (phi * (V.conj().T @ G @ V)) @ V.conj().T for G in generators])
    return U, dU


def unitary_orbit_family(generators, psi0) -> StateFamily:
    """``lam -> exp(-i sum_mu lam_mu G_mu) psi0`` with an exact gradient."""
    G = np.asarray(generators, dtype=complex)
    if G.ndim == 2:
        G = G[None]
    psi0 = normalize(psi0)
    m, n = G.shape[0], psi0.size

    def evaluator(p):
        K = np.tensordot(p, G, axes=1)
        w, V = np.linalg.eigh(K)
        return V @ (np.exp(-1j * w) * (V.conj().T @ psi0))

    def gradient(p):
        _, dU = _expm_and_derivatives(G, p)
        return dU @ psi0

    return StateFamily(evaluator, param_count=m, hilbert_dim=n, gradient=gradient)


def random_family(hilbert_dim: int, m: int, seed: int) -> StateFamily:
    """Unitary orbit of a random state under ``m`` random Hermitian generators.

    Generators and reference state are drawn, in that order, from
    :func:`rng_from_seed`. Supports ``hilbert_dim <= 16`` and ``m <= 4``.
    """
    if not (1 <= hilbert_dim <= 16 and 1 <= m <= 4):
        raise ValueError("random_family supports hilbert_dim <= 16 and m <= 4")
    rng = rng_from_seed(seed)
    G = np.array([random_hermitian(hilbert_dim, rng) for _ in range(m)])
    psi0 = random_state(hilbert_dim, rng)
    return unitary_orbit_family(G, psi0)


def constant_family(psi0, m: int = 1) -> StateFamily:
    psi0 = normalize(psi0)
    zero = np.zeros((m, psi0.size), dtype=complex)
    return StateFamily(lambda p: psi0, param_count=m, hilbert_dim=psi0.size,
                       gradient=lambda p: zero)


def pure_gauge_family(psi0) -> StateFamily:
    """``lam -> exp(i lam) psi0``: a single ray traversed by its phase."""
    psi0 = normalize(psi0)
    return StateFamily(
        lambda p: np.exp(1j * p[0]) * psi0,
        param_count=1,
        hilbert_dim=psi0.size,
        gradient=lambda p: (1j * np.exp(1j * p[0]) * psi0)[None, :],
    )


def product_family(first: StateFamily, second: StateFamily) -> StateFamily:
    """Tensor product family ``(lam1, lam2) -> first(lam1) (x) second(lam2)``."""
    m1 = first.param_count

    def evaluator(p):
        return np.kron(first(p[:m1]), second(p[m1:]))

    gradient = None
    if first.gradient is not None and second.gradient is not None and first.normalized and second.normalized:

        def gradient(p):
            a, b = first(p[:m1]), second(p[m1:])
            da = np.asarray(first.gradient(p[:m1]))
            db = np.asarray(second.gradient(p[m1:]))
            return np.vstack([[np.kron(x, b) for x in da], [np.kron(a, y) for y in db]])

    return StateFamily(
        evaluator,
        param_count=m1 + second.param_count,
        hilbert_dim=first.hilbert_dim * second.hilbert_dim,
        gradient=gradient,
        fd_step=min(first.fd_step, second.fd_step),
    )
