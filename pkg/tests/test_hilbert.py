import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qsmetric.errors import DimMismatch, NotHermitian, NotNormalized, ZeroState
from qsmetric.hilbert import (
    HermitianOperator,
    expectation,
    fs_distance,
    inner,
    normalize,
    state,
    variance,
)

from conftest import random_hermitian, random_state

SX = np.array([[0, 1], [1, 0]])
SZ = np.diag([1.0, -1.0])
PLUS = np.array([1, 1]) / np.sqrt(2)


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ((1, 0), (1, 0), 1.0),
        ((1, 0), (0, 1), 0.0),
        (np.array([1, 1j]) / np.sqrt(2), np.array([1, -1j]) / np.sqrt(2), 0.0),
    ],
)
def test_inner_examples(a, b, expected):
    assert_allclose(inner(a, b), expected, atol=1e-15)


def test_inner_dim_mismatch():
    with pytest.raises(DimMismatch):
        inner([1, 0], [1, 0, 0])


@pytest.mark.parametrize(
    "a, expected",
    [((2, 0), (1, 0)), ((0, 3j), (0, 1j)), ((1, 1), PLUS)],
)
def test_normalize_examples(a, expected):
    out = normalize(a)
    assert_allclose(out, expected, atol=1e-15)
    assert abs(np.linalg.norm(out) - 1) <= 1e-14


def test_normalize_rejects_zero():
    with pytest.raises(ZeroState):
        normalize([1e-16, 0])


def test_state_rejects_non_finite():
    with pytest.raises(ValueError):
        state([np.nan, 1])


def test_hermitian_operator_validation():
    HermitianOperator(SX)
    with pytest.raises(NotHermitian):
        HermitianOperator([[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        HermitianOperator(np.ones((2, 3)))


@pytest.mark.parametrize(
    "H, psi, expected",
    [(SZ, (1, 0), 1.0), (SZ, PLUS, 0.0), (SX, PLUS, 1.0)],
)
def test_expectation_examples(H, psi, expected):
    assert_allclose(expectation(H, psi), expected, atol=1e-15)


def test_expectation_errors():
    with pytest.raises(NotNormalized):
        expectation(SZ, (1, 1))
    with pytest.raises(DimMismatch):
        expectation(SZ, (1, 0, 0))


@pytest.mark.parametrize(
    "H, psi, expected",
    [(SZ, (1, 0), 0.0), (SZ, PLUS, 1.0), (2.5 * np.eye(2), random_state(np.random.default_rng(3), 2), 0.0)],
)
def test_variance_examples(H, psi, expected):
    assert_allclose(variance(H, psi), expected, atol=1e-14)


@pytest.mark.parametrize(
    "psi, phi, expected",
    [(PLUS, PLUS, 0.0), ((1, 0), (0, 1), np.pi), ((1, 0), PLUS, np.pi / 2)],
)
def test_fs_distance_examples(psi, phi, expected):
    assert_allclose(fs_distance(psi, phi), expected, atol=1e-15)


def test_fs_distance_requires_normalized():
    with pytest.raises(NotNormalized):
        fs_distance((1, 1), (1, 0))


complex_entries = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(complex_entries, complex_entries), min_size=1, max_size=8))
def test_inner_conjugate_symmetry(pairs):
    a = np.array([p[0] for p in pairs])
    b = np.array([p[1] for p in pairs])
    assert abs(inner(a, b) - np.conj(inner(b, a))) <= 1e-14 * (1 + np.linalg.norm(a) * np.linalg.norm(b))


def test_fs_distance_gauge_invariance(rng):
    psi, phi = random_state(rng, 4), random_state(rng, 4)
    s = fs_distance(psi, phi)
    for alpha in rng.uniform(-np.pi, np.pi, size=100):
        assert abs(fs_distance(psi, np.exp(1j * alpha) * phi) - s) <= 1e-14
        assert abs(fs_distance(np.exp(1j * alpha) * psi, phi) - s) <= 1e-14


def _tangent_step(rng, psi, eps):
    d = rng.normal(size=psi.size) + 1j * rng.normal(size=psi.size)
    d -= inner(psi, d) * psi
    return d * (eps / np.linalg.norm(d))


def test_fs_distance_second_order_consistency(rng):
    # the overlap form loses ~1e-16 absolute to cancellation, so keep 10 eps^4 above that
    for _ in range(200):
        psi = random_state(rng, 5)
        eps = 10 ** rng.uniform(-3.5, -3)
        chi = psi + _tangent_step(rng, psi, eps)
        s = fs_distance(psi, normalize(chi))
        overlap = abs(inner(psi, chi)) ** 2 / np.linalg.norm(chi) ** 2
        assert abs(s**2 - 4 * (1 - overlap)) <= 10 * eps**4


def test_fs_distance_second_order_small_steps(rng):
    # for a tangent step 1 - overlap equals |d|^2 / |psi + d|^2, free of cancellation;
    # below eps ~ 1e-5 rounding of the normalized input itself dominates 10 eps^4
    for _ in range(200):
        psi = random_state(rng, 5)
        eps = 10 ** rng.uniform(-5, -3)
        d = _tangent_step(rng, psi, eps)
        chi = psi + d
        s = fs_distance(psi, normalize(chi))
        one_minus = np.linalg.norm(d) ** 2 / np.linalg.norm(chi) ** 2
        assert abs(s**2 - 4 * one_minus) <= 10 * eps**4


def test_fs_distance_triangle_inequality(rng):
    for _ in range(500):
        a, b, c = (random_state(rng, 3) for _ in range(3))
        assert fs_distance(a, c) <= fs_distance(a, b) + fs_distance(b, c) + 1e-12


def test_fs_distance_range(rng):
    for _ in range(100):
        s = fs_distance(random_state(rng, 3), random_state(rng, 3))
        assert 0.0 <= s <= np.pi


def test_variance_nonnegative(rng):
    for _ in range(500):
        dim = int(rng.integers(1, 7))
        assert variance(random_hermitian(rng, dim), random_state(rng, dim)) >= 0.0


def test_operator_is_immutable():
    H = HermitianOperator(SZ)
    with pytest.raises(ValueError):
        H.entries[0, 0] = 3
