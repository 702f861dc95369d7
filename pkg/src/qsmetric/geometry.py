"""Quantum geometric tensor on parametrized families of states.

A :class:`StateFamily` maps real parameters ``lam`` to state vectors. From
its derivatives we build the horizontal (covariant) derivative

    D_mu psi = d_mu psi - <psi|d_mu psi> psi,

and the quantum geometric tensor ``T_mu,nu = <D_mu psi|D_nu psi>``. Its real
part is the metric ``g`` on ray space and ``F = -2 Im T`` is the Berry
curvature.

Distance conventions: the metric returned here is the bare one. The
overlap-based line element used by :func:`qsmetric.hilbert.fs_distance` and
the evolution tools is ``ds^2 = 4 g_mu,nu dlam^mu dlam^nu``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import combinations_with_replacement
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DimMismatch,
    NonFiniteState,
    NotHolomorphic,
    NotNormalizedFamily,
    QSMetricError,
    SingularJacobian,
    ZeroState,
)
from .hilbert import ZERO_NORM

__all__ = [
    "StateFamily",
    "QGTensor",
    "MetricTensor",
    "GaugeTransform",
    "polynomial_gauge",
    "random_polynomial_gauge",
    "signature",
    "differentiate",
    "covariant_derivative",
    "berry_connection",
    "qgt",
    "metric",
    "berry_curvature",
    "hermitian_metric",
    "fs_holomorphic",
    "holomorphic_family",
    "apply_gauge",
    "reparametrize",
    "transform_metric",
    "check_family",
]

NORMALIZED_FAMILY_TOL = 1e-8
CONNECTION_RESIDUE_TOL = 1e-6
SIGNATURE_REL_TOL = 1e-10


def _as_point(p, m: Optional[int] = None) -> np.ndarray:
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if p.ndim != 1:
        raise DimMismatch(f"parameter point must be a vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise NonFiniteState("parameter point has non-finite coordinates")
    if m is not None and p.size != m:
        raise DimMismatch(f"expected {m} parameters, got {p.size}")
    return p


@dataclass(frozen=True)
class StateFamily:
    """A smooth map from ``param_count`` real parameters to states.

    Parameters
    ----------
    evaluator : callable
        ``lam -> psi`` for a real parameter vector ``lam``. Must be pure.
    param_count : int
        Number of real parameters ``m``.
    hilbert_dim : int
        Length of the returned state vectors.
    gradient : callable, optional
        ``lam -> (m, hilbert_dim)`` array whose rows are ``d_mu evaluator``.
        When absent, central finite differences with step ``fd_step`` are used.
    fd_step : float
        Finite-difference step.
    normalized : bool
        Whether the evaluator already returns unit vectors. If False the
        family is normalized internally before any derivative is taken.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    param_count: int
    hilbert_dim: int
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    fd_step: float = 1e-5
    normalized: bool = True

    def __post_init__(self):
        if self.param_count < 1:
            raise ValueError("param_count must be at least 1")
        if self.hilbert_dim < 1:
            raise ValueError("hilbert_dim must be at least 1")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")

    def raw(self, p) -> np.ndarray:
        """Evaluator output at ``p``, validated but not renormalized."""
        p = _as_point(p, self.param_count)
        psi = np.asarray(self.evaluator(p), dtype=complex)
        if psi.shape != (self.hilbert_dim,):
            raise DimMismatch(f"evaluator returned shape {psi.shape}, expected ({self.hilbert_dim},)")
        if not np.all(np.isfinite(psi)):
            raise NonFiniteState(f"evaluator returned non-finite amplitudes at {p}")
        n = np.linalg.norm(psi)
        if n <= ZERO_NORM:
            raise ZeroState(f"evaluator returned the zero vector at {p}")
        if self.normalized and abs(n - 1.0) > NORMALIZED_FAMILY_TOL:
            raise NotNormalizedFamily(f"norm {n!r} at {p} violates the normalized flag")
        return psi

    def __call__(self, p) -> np.ndarray:
        """Normalized state at ``p``."""
        psi = self.raw(p)
        return psi if self.normalized else psi / np.linalg.norm(psi)

    def without_gradient(self, fd_step: Optional[float] = None) -> "StateFamily":
        """Same family forced onto the finite-difference path."""
        return replace(self, gradient=None, fd_step=fd_step or self.fd_step)


def _central_difference(family: StateFamily, p: np.ndarray, h: float) -> np.ndarray:
    m = family.param_count
    out = np.empty((m, family.hilbert_dim), dtype=complex)
    for mu in range(m):
        e = np.zeros(m)
        e[mu] = h
        out[mu] = (family(p + e) - family(p - e)) / (2.0 * h)
    return out


def differentiate(family: StateFamily, p, richardson: bool = False) -> np.ndarray:
    """Partial derivatives ``d_mu psi`` of the normalized family at ``p``.

    Returns an ``(m, hilbert_dim)`` complex array. The analytic gradient is
    used when the family provides one; otherwise symmetric central
    differences, optionally Richardson-extrapolated from steps ``h`` and ``h/2``.
    """
    p = _as_point(p, family.param_count)
    if family.gradient is not None:
        grad = np.asarray(family.gradient(p), dtype=complex)
        if grad.shape != (family.param_count, family.hilbert_dim):
            raise DimMismatch(f"gradient returned shape {grad.shape}")
        if not np.all(np.isfinite(grad)):
            raise NonFiniteState(f"gradient is non-finite at {p}")
        if not family.normalized:
            # derivative of u/|u|
            u = family.raw(p)
            r = np.linalg.norm(u)
            a = u / r
            grad = grad / r - np.outer(np.real(grad @ a.conj()), a) / r
        return grad
    h = family.fd_step
    d = _central_difference(family, p, h)
    if richardson:
        d = (4.0 * _central_difference(family, p, h / 2.0) - d) / 3.0
    return d


def _psi_and_overlaps(family: StateFamily, p):
    p = _as_point(p, family.param_count)
    psi = family(p)
    d = differentiate(family, p)
    # c_mu = <psi|d_mu psi>
    c = d @ psi.conj()
    return p, psi, d, c


def covariant_derivative(family: StateFamily, p) -> np.ndarray:
    """Horizontal derivatives ``D_mu psi = d_mu psi - <psi|d_mu psi> psi``.

    Rows are orthogonal to ``psi``. The connection term enters with a minus
    sign so that the resulting tensor is invariant under local phase changes.
    """
    _, psi, d, c = _psi_and_overlaps(family, p)
    return d - np.outer(c, psi)


def berry_connection(family: StateFamily, p) -> np.ndarray:
    """Berry connection ``A_mu = i <psi|d_mu psi>`` as a real vector."""
    _, _, _, c = _psi_and_overlaps(family, p)
    residue = np.max(np.abs(c.real))
    if residue > CONNECTION_RESIDUE_TOL:
        raise NotNormalizedFamily(
            f"<psi|d psi> has real part {residue:.3e}; family is not normalized"
        )
    return -c.imag


def signature(matrix, rel_tol: float = SIGNATURE_REL_TOL) -> tuple[int, int, int]:
    """Counts ``(n_plus, n_minus, n_zero)`` of eigenvalue signs.

    Eigenvalues below ``rel_tol * (1 + max|eig|)`` in magnitude count as zero.
    """
    w = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    if w.size == 0:
        return (0, 0, 0)
    thresh = rel_tol * (1.0 + np.max(np.abs(w)))
    return (int(np.sum(w > thresh)), int(np.sum(w < -thresh)), int(np.sum(np.abs(w) <= thresh)))


@dataclass(frozen=True)
class QGTensor:
    """Complex Hermitian tensor ``T_mu,nu`` at a parameter point."""

    entries: np.ndarray
    base: np.ndarray

    @property
    def metric(self) -> np.ndarray:
        return self.entries.real.copy()

    @property
    def curvature(self) -> np.ndarray:
        return -2.0 * self.entries.imag

    @property
    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    @property
    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.entries + self.entries.conj().T)
        return float(np.min(np.linalg.eigvalsh(h)))


@dataclass(frozen=True)
class MetricTensor:
    """Real symmetric metric coefficients ``g_mu,nu`` at a point."""

    entries: np.ndarray
    base: Optional[np.ndarray] = None
    signature: tuple = field(init=False)

    def __post_init__(self):
        g = np.array(self.entries, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DimMismatch(f"metric must be square, got shape {g.shape}")
        asym = np.max(np.abs(g - g.T)) if g.size else 0.0
        if asym > 1e-12 * (1.0 + np.max(np.abs(g))):
            raise QSMetricError(f"metric is not symmetric (residual {asym:.3e})")
        g = 0.5 * (g + g.T)
        g.setflags(write=False)
        object.__setattr__(self, "entries", g)
        object.__setattr__(self, "signature", signature(g))

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def line_element(self, v) -> float:
        """``g(v, v)`` for a coordinate displacement ``v``."""
        v = np.asarray(v, dtype=float)
        return float(v @ self.entries @ v)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def qgt(family: StateFamily, p, form: str = "projector") -> QGTensor:
    """Quantum geometric tensor of ``family`` at ``p``.

    ``form="projector"`` takes inner products of the horizontal derivatives;
    ``form="direct"`` evaluates ``<d_mu psi|d_nu psi> - <d_mu psi|psi><psi|d_nu psi>``.
    The two agree to rounding.
    """
    p, psi, d, c = _psi_and_overlaps(family, p)
    if form == "projector":
        D = d - np.outer(c, psi)
        T = D.conj() @ D.T
    elif form == "direct":
        T = d.conj() @ d.T - np.outer(c.conj(), c)
    else:
        raise ValueError(f"unknown form {form!r}")
    return QGTensor(T, p)


def metric(
    family: StateFamily,
    p,
    form: str = "symmetrized",
    connection: bool = True,
) -> MetricTensor:
    """Ray-space metric ``g_mu,nu`` at ``p``.

    Parameters
    ----------
    form : {"symmetrized", "direct"}
        ``"symmetrized"`` builds ``(1/2)[<D_mu|D_nu> + <D_nu|D_mu>]`` from the
        horizontal derivatives; ``"direct"`` takes
        ``Re[<d_mu|d_nu> - <d_mu|psi><psi|d_nu>]``.
    connection : bool
        If False, drop the connection term and return ``Re <d_mu|d_nu>``.
        This is not gauge invariant and exists as a negative control.
    """
    p = _as_point(p, family.param_count)
    if not connection:
        d = differentiate(family, p)
        return MetricTensor((d.conj() @ d.T).real, p)
    if form == "symmetrized":
        T = qgt(family, p, "projector").entries
        g = 0.5 * (T + T.T)
    elif form == "direct":
        g = qgt(family, p, "direct").entries
    else:
        raise ValueError(f"unknown form {form!r}")
    return MetricTensor(g.real, p)


def berry_curvature(family: StateFamily, p) -> np.ndarray:
    """Berry curvature ``F_mu,nu = -2 Im T_mu,nu``, an antisymmetric matrix.

    With ``A = i<psi|d psi>`` this equals ``d_mu A_nu - d_nu A_mu``.
    """
    F = qgt(family, p).curvature
    return 0.5 * (F - F.T)


# -- holomorphic charts --------------------------------------------------------


def _as_complex_point(z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.ndim != 1 or not np.all(np.isfinite(z)):
        raise DimMismatch("complex chart point must be a finite vector")
    return z


def hermitian_metric(
    evaluator: Callable[[np.ndarray], np.ndarray],
    z,
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    step: float = 1e-6,
    cr_tol: float = 1e-4,
) -> np.ndarray:
    """Hermitian Fubini-Study coefficients ``h_mu,nubar`` for a holomorphic chart.

    ``evaluator(z)`` returns a possibly unnormalized state depending
    holomorphically on complex coordinates ``z``. The result

        h = <d_mu psi|d_nu psi>/<psi|psi> - <d_mu psi|psi><psi|d_nu psi>/<psi|psi>^2

    is unchanged by ``psi -> c psi``. Without an analytic ``derivative`` the
    complex derivative is taken along the real axis and the Cauchy-Riemann
    residual against the imaginary-axis derivative must stay below ``cr_tol``.
    """
    z = _as_complex_point(z)
    m = z.size
    psi = np.asarray(evaluator(z), dtype=complex)
    nrm2 = float(np.vdot(psi, psi).real)
    if nrm2 <= ZERO_NORM**2:
        raise ZeroState(f"holomorphic chart returned the zero vector at {z}")
    if derivative is not None:
        d = np.asarray(derivative(z), dtype=complex).reshape(m, psi.size)
    else:
        d = np.empty((m, psi.size), dtype=complex)
        for mu in range(m):
            e = np.zeros(m, dtype=complex)
            e[mu] = step
            dx = (np.asarray(evaluator(z + e)) - np.asarray(evaluator(z - e))) / (2 * step)
            dy = (np.asarray(evaluator(z + 1j * e)) - np.asarray(evaluator(z - 1j * e))) / (2 * step)
            cr = np.linalg.norm(dy - 1j * dx) / (1.0 + np.linalg.norm(dx))
            if cr > cr_tol:
                raise NotHolomorphic(f"Cauchy-Riemann residual {cr:.3e} in coordinate {mu}")
            d[mu] = dx
    c = d @ psi.conj()
    return (d.conj() @ d.T) / nrm2 - np.outer(c.conj(), c) / nrm2**2


def fs_holomorphic(
    evaluator: Callable[[np.ndarray], np.ndarray],
    z,
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    step: float = 1e-6,
) -> MetricTensor:
    """Real ``2m x 2m`` metric in coordinates ``(Re z, Im z)`` from a holomorphic chart.

    The line element is ``h_mu,nubar dzbar^mu dz^nu``, which matches
    :func:`metric` on the normalized real chart. In block form

        [[Re h, -Im h],
         [Im h,  Re h]].
    """
    h = hermitian_metric(evaluator, z, derivative, step)
    G = np.block([[h.real, -h.imag], [h.imag, h.real]])
    zc = _as_complex_point(z)
    return MetricTensor(0.5 * (G + G.T), np.concatenate([zc.real, zc.imag]))


def holomorphic_family(evaluator: Callable[[np.ndarray], np.ndarray], m: int, hilbert_dim: int,
                       fd_step: float = 1e-5) -> StateFamily:
    """Real chart ``(x, y) -> evaluator(x + i y)``, normalized internally."""
    return StateFamily(
        lambda q: evaluator(q[:m] + 1j * q[m:]),
        param_count=2 * m,
        hilbert_dim=hilbert_dim,
        fd_step=fd_step,
        normalized=False,
    )


# -- gauge and coordinate transformations ---------------------------------------


@dataclass(frozen=True)
class GaugeTransform:
    """Local phase ``psi(lam) -> exp(i alpha(lam)) psi(lam)``.

    ``gradient`` returns ``d_mu alpha``; without it the gradient is taken by
    central differences.
    """

    alpha: Callable[[np.ndarray], float]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def grad(self, p, h: float = 1e-5) -> np.ndarray:
        p = _as_point(p)
        if self.gradient is not None:
            return np.asarray(self.gradient(p), dtype=float)
        out = np.empty(p.size)
        for mu in range(p.size):
            e = np.zeros(p.size)
            e[mu] = h
            out[mu] = (self.alpha(p + e) - self.alpha(p - e)) / (2 * h)
        return out


def polynomial_gauge(terms: Sequence[tuple[Sequence[int], float]]) -> GaugeTransform:
    """Gauge phase ``alpha(lam) = sum_k c_k prod_mu lam_mu^e_k,mu``.

    ``terms`` is a list of ``(exponents, coefficient)`` pairs.
    """
    if not terms:
        return GaugeTransform(lambda p: 0.0, lambda p: np.zeros(np.size(p)))
    exps = np.array([t[0] for t in terms], dtype=int)
    if exps.ndim != 2:
        raise DimMismatch("all gauge terms need the same number of exponents")
    coef = np.array([t[1] for t in terms], dtype=float)

    def alpha(p):
        return float(coef @ np.prod(p[None, :] ** exps, axis=1))

    def gradient(p):
        g = np.zeros(p.size)
        for e, c in zip(exps, coef):
            for mu in range(p.size):
                if e[mu] == 0:
                    continue
                de = e.copy()
                de[mu] -= 1
                g[mu] += c * e[mu] * np.prod(p**de)
        return g

    return GaugeTransform(alpha, gradient)


def random_polynomial_gauge(m: int, rng: np.random.Generator, degree: int = 3,
                            scale: float = 1.0) -> GaugeTransform:
    """Polynomial phase with every monomial of total degree ``1..degree``."""
    terms = []
    for deg in range(1, degree + 1):
        for combo in combinations_with_replacement(range(m), deg):
            e = np.bincount(combo, minlength=m)
            terms.append((tuple(int(x) for x in e), float(scale * rng.normal())))
    return polynomial_gauge(terms)


def apply_gauge(family: StateFamily, g: GaugeTransform) -> StateFamily:
    """Family ``lam -> exp(i alpha(lam)) psi(lam)``; same ray at every point."""

    def evaluator(p):
        return np.exp(1j * g.alpha(p)) * family.raw(p)

    gradient = None
    if family.gradient is not None:

        def gradient(p):
            phase = np.exp(1j * g.alpha(p))
            psi = family.raw(p)
            d = np.asarray(family.gradient(p), dtype=complex)
            return phase * (d + 1j * np.outer(g.grad(p, family.fd_step), psi))

    return replace(family, evaluator=evaluator, gradient=gradient)


def _fd_jacobian(phi, q, h=1e-6):
    q = np.asarray(q, dtype=float)
    cols = []
    for a in range(q.size):
        e = np.zeros(q.size)
        e[a] = h
        cols.append((np.asarray(phi(q + e)) - np.asarray(phi(q - e))) / (2 * h))
    return np.column_stack(cols)


def _checked_jacobian(jacobian, q, m: int) -> np.ndarray:
    J = np.atleast_2d(np.asarray(jacobian(q), dtype=float))
    if J.shape != (m, q.size):
        raise DimMismatch(f"Jacobian has shape {J.shape}, expected {(m, q.size)}")
    if not np.all(np.isfinite(J)):
        raise SingularJacobian("Jacobian is not finite")
    if J.shape[0] == J.shape[1]:
        s = np.linalg.svd(J, compute_uv=False)
        if s[-1] <= 1e-12 * max(1.0, s[0]):
            raise SingularJacobian(f"Jacobian is singular at {q}")
    return J


def reparametrize(
    family: StateFamily,
    phi: Callable[[np.ndarray], np.ndarray],
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    param_count: Optional[int] = None,
) -> StateFamily:
    """Family ``q -> family(phi(q))`` in new coordinates ``q``.

    ``jacobian(q)`` returns ``d phi^mu / d q^a`` with shape ``(m, m')``. When
    the original family has an analytic gradient the new one does too, by
    the chain rule; the Jacobian is then taken by finite differences if not
    supplied.
    """
    mq = param_count or family.param_count
    jac = jacobian or (lambda q: _fd_jacobian(phi, q))

    def evaluator(q):
        lam = np.asarray(phi(q), dtype=float)
        if jacobian is not None:
            _checked_jacobian(jac, q, family.param_count)
        return family.raw(lam)

    gradient = None
    if family.gradient is not None:

        def gradient(q):
            J = _checked_jacobian(jac, q, family.param_count)
            return J.T @ np.asarray(family.gradient(np.asarray(phi(q), dtype=float)), dtype=complex)

    return replace(family, evaluator=evaluator, gradient=gradient, param_count=mq)


def transform_metric(g, J) -> MetricTensor:
    """Pull back ``g`` through the Jacobian ``J``: ``J^T g J``."""
    base = g.base if isinstance(g, MetricTensor) else None
    G = np.asarray(g, dtype=float)
    J = np.atleast_2d(np.asarray(J, dtype=float))
    if J.shape[0] != G.shape[0]:
        raise DimMismatch(f"Jacobian rows {J.shape[0]} do not match metric size {G.shape[0]}")
    if not np.all(np.isfinite(J)):
        raise NonFiniteState("Jacobian is not finite")
    out = J.T @ G @ J
    return MetricTensor(0.5 * (out + out.T), base)


def check_family(family: StateFamily, points, grad_rtol: float = 1e-4) -> float:
    """Check the family contract at ``points``; return the worst gradient mismatch.

    Raises if the evaluator misbehaves. The returned number is
    ``max |analytic - fd| / (1 + |grad|)`` over components, zero when the
    family has no analytic gradient.
    """
    worst = 0.0
    fd = family.without_gradient()
    for p in points:
        family(p)
        if family.gradient is None:
            continue
        a = differentiate(family, p)
        b = differentiate(fd, p)
        err = float(np.max(np.abs(a - b)) / (1.0 + np.max(np.abs(a))))
        worst = max(worst, err)
    if worst > grad_rtol:
        raise QSMetricError(f"analytic gradient disagrees with finite differences ({worst:.3e})")
    return worst
