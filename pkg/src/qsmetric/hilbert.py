"""Finite-dimensional Hilbert space primitives.

States are plain one-dimensional complex numpy arrays. Operators are wrapped
in :class:`HermitianOperator`, which checks Hermiticity once at construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NonFiniteState, NotHermitian, NotNormalized, ZeroState

__all__ = [
    "HermitianOperator",
    "state",
    "inner",
    "norm",
    "normalize",
    "expectation",
    "variance",
    "fs_distance",
]

HERMITIAN_TOL = 1e-12
NORMALIZED_TOL = 1e-10
ZERO_NORM = 1e-14


def state(amplitudes) -> np.ndarray:
    """Validate ``amplitudes`` and return them as a complex vector."""
    psi = np.asarray(amplitudes, dtype=complex)
    if psi.ndim != 1 or psi.size < 1:
        raise DimMismatch(f"a state must be a non-empty vector, got shape {psi.shape}")
    if not np.all(np.isfinite(psi)):
        raise NonFiniteState("state has NaN or infinite amplitudes")
    return psi


@dataclass(frozen=True)
class HermitianOperator:
    """A dense Hermitian matrix, e.g. a Hamiltonian."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimMismatch(f"operator must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise NonFiniteState("operator has non-finite entries")
        residual = np.max(np.abs(m - m.conj().T))
        if residual > HERMITIAN_TOL:
            raise NotHermitian(f"Hermiticity residual {residual:.3e} exceeds {HERMITIAN_TOL}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __matmul__(self, psi):
        return self.entries @ psi


def _as_operator(H) -> HermitianOperator:
    return H if isinstance(H, HermitianOperator) else HermitianOperator(H)


def _check_dims(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise DimMismatch(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")


def _check_normalized(psi: np.ndarray, tol: float = NORMALIZED_TOL):
    n = np.linalg.norm(psi)
    if abs(n - 1.0) > tol:
        raise NotNormalized(f"state norm {n!r} differs from 1 by more than {tol}")


def inner(a, b) -> complex:
    """Return ``<a|b>``, antilinear in the first argument."""
    a, b = state(a), state(b)
    _check_dims(a, b)
    return complex(np.vdot(a, b))


def norm(a) -> float:
    return float(np.linalg.norm(state(a)))


def normalize(a) -> np.ndarray:
    """Rescale ``a`` to unit norm, keeping its ray."""
    a = state(a)
    n = np.linalg.norm(a)
    if n <= ZERO_NORM:
        raise ZeroState(f"cannot normalize a state of norm {n:.3e}")
    return a / n


def expectation(H, psi) -> float:
    """``<psi|H|psi>`` for a normalized ``psi``."""
    H = _as_operator(H)
    psi = state(psi)
    if psi.shape[0] != H.dim:
        raise DimMismatch(f"operator dim {H.dim} vs state dim {psi.shape[0]}")
    _check_normalized(psi)
    return float(np.vdot(psi, H.entries @ psi).real)


def variance(H, psi) -> float:
    """Energy variance ``<H^2> - <H>^2``.

    Computed as ``||(H - <H>) psi||^2``, which is non-negative by construction
    and avoids the cancellation of the two-moment form.
    """
    H = _as_operator(H)
    mean = expectation(H, psi)
    psi = state(psi)
    r = H.entries @ psi - mean * psi
    return max(float(np.vdot(r, r).real), 0.0)


def fs_distance(psi, phi) -> float:
    """Geodesic distance between the rays of two normalized states.

    Uses the convention ``s = 2 arccos |<psi|phi>|`` so that ``s`` runs from 0
    (same ray) to pi (orthogonal rays) and ``ds^2 = 4 (1 - |<psi|psi+dpsi>|^2)``
    to second order. Evaluated through ``atan2`` of the perpendicular and
    parallel components, which stays accurate for nearby rays.
    """
    psi, phi = state(psi), state(phi)
    _check_dims(psi, phi)
    _check_normalized(psi)
    _check_normalized(phi)
    overlap = np.vdot(psi, phi)
    perp = np.linalg.norm(phi - overlap * psi)
    return float(2.0 * np.arctan2(perp, abs(overlap)))
