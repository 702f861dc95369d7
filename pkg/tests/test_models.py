import numpy as np
import pytest
from numpy.testing import assert_allclose

from qsmetric import geometry as geo
from qsmetric import models as md
from qsmetric.errors import ChartSingularity, GridError


FAMILIES = {
    "bloch": (md.bloch_family(), lambda rng, n: rng.uniform([0.01, 0.0], [np.pi - 0.01, 2 * np.pi], size=(n, 2))),
    "gaussian": (md.gaussian_family(md.GaussianFamilySpec(1.0)), lambda rng, n: rng.uniform(-3, 3, size=(n, 1))),
    "random": (md.random_family(6, 3, 42), lambda rng, n: rng.uniform(-2, 2, size=(n, 3))),
    "constant": (md.constant_family([1, 2j, 3], m=2), lambda rng, n: rng.uniform(-1, 1, size=(n, 2))),
    "pure_gauge": (md.pure_gauge_family([1, 1j]), lambda rng, n: rng.uniform(-5, 5, size=(n, 1))),
}


@pytest.mark.parametrize("name", FAMILIES)
def test_family_invariants(name, rng):
    fam, sampler = FAMILIES[name]
    pts = sampler(rng, 1000)
    for p in pts:
        psi = fam(p)
        assert psi.shape == (fam.hilbert_dim,)
        assert abs(np.linalg.norm(psi) - 1) <= 1e-8
    # analytic gradient against central differences, on a subset for speed
    geo.check_family(fam, pts[:: 10 if name == "gaussian" else 1])


def test_bloch_examples():
    fam = md.bloch_family()
    assert_allclose(fam([np.pi / 2, 0.0]), np.array([1, 1]) / np.sqrt(2), atol=1e-15)
    near_pole = fam([md.BLOCH_MARGIN, 1.3])
    assert abs(near_pole[0]) == pytest.approx(1.0, abs=1e-6)
    for bad in (0.0, np.pi, 5e-4):
        with pytest.raises(ChartSingularity):
            fam([bad, 0.0])


@pytest.mark.parametrize("theta", np.linspace(0.1, 3.0, 7))
def test_bloch_metric(theta):
    g = geo.metric(md.bloch_family(), [theta, 0.0]).entries
    assert_allclose(g, np.diag([0.25, np.sin(theta) ** 2 / 4]), atol=1e-12)


def test_random_family_reference_point():
    fam = md.random_family(5, 2, 123)
    rng = md.rng_from_seed(123)
    _ = [md.random_hermitian(5, rng) for _ in range(2)]
    psi0 = md.random_state(5, rng)
    assert_allclose(fam(np.zeros(2)), psi0, atol=1e-14)


def test_random_family_is_deterministic():
    p = np.array([0.3, -0.1, 0.7])
    a, b = md.random_family(7, 3, 99), md.random_family(7, 3, 99)
    assert np.array_equal(a(p), b(p))
    assert np.array_equal(a.gradient(p), b.gradient(p))
    assert not np.array_equal(a(p), md.random_family(7, 3, 100)(p))


def test_random_family_limits():
    with pytest.raises(ValueError):
        md.random_family(17, 1, 0)
    with pytest.raises(ValueError):
        md.random_family(4, 5, 0)


def test_zero_generators_give_constant_family():
    fam = md.unitary_orbit_family(np.zeros((2, 3, 3)), [1, 0, 1j])
    assert_allclose(geo.metric(fam, [0.4, -0.9]).entries, 0.0, atol=1e-14)


def test_single_generator_variance_identity():
    fam = md.unitary_orbit_family(np.diag([1.0, -1.0]), np.array([1, 1]) / np.sqrt(2))
    for lam in (0.0, 0.7, -2.0):
        assert_allclose(geo.metric(fam, [lam]).entries, [[1.0]], atol=1e-12)


def test_random_family_covariance_at_origin():
    for seed in range(10):
        rng = md.rng_from_seed(seed)
        G = np.array([md.random_hermitian(4, rng) for _ in range(3)])
        psi0 = md.random_state(4, rng)
        fam = md.random_family(4, 3, seed)
        mean = np.array([np.vdot(psi0, g @ psi0) for g in G])
        second = np.array([[np.vdot(psi0, a @ b @ psi0) for b in G] for a in G])
        cov = (second - np.outer(mean, mean)).real
        assert_allclose(geo.metric(fam, np.zeros(3)).entries, cov, atol=1e-8)


def test_exact_gradient_matches_expm():
    from scipy.linalg import expm

    rng = np.random.default_rng(0)
    G = np.array([md.random_hermitian(4, rng) for _ in range(2)])
    lam = np.array([0.4, -0.3])
    U, dU = md._expm_and_derivatives(G, lam)
    assert_allclose(U, expm(-1j * np.tensordot(lam, G, axes=1)), atol=1e-12)
    h = 1e-6
    for mu in range(2):
        e = np.zeros(2)
        e[mu] = h
        fd = (expm(-1j * np.tensordot(lam + e, G, axes=1)) - expm(-1j * np.tensordot(lam - e, G, axes=1))) / (2 * h)
        assert_allclose(dU[mu], fd, atol=1e-8)


def test_degenerate_spectrum_gradient():
    # repeated eigenvalues exercise the divided-difference limit
    G = np.array([np.diag([1.0, 1.0, -1.0]), np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)])
    fam = md.unitary_orbit_family(G, [1, 0, 0])
    geo.check_family(fam, [[0.0, 0.0], [0.5, 0.0], [1e-9, 0.3]])


@pytest.mark.parametrize("sigma", [0.5, 1.0, 2.0])
def test_gaussian_metric(sigma):
    fam = md.gaussian_family(md.GaussianFamilySpec(sigma))
    g = geo.metric(fam, [0.0]).entries[0, 0]
    assert abs(g * 4 * sigma**2 - 1) <= 2e-3


def test_gaussian_sigma_doubling():
    g1 = geo.metric(md.gaussian_family(md.GaussianFamilySpec(0.7)), [0.0]).entries[0, 0]
    g2 = geo.metric(md.gaussian_family(md.GaussianFamilySpec(1.4)), [0.0]).entries[0, 0]
    assert abs(g2 / g1 - 0.25) <= 2e-3 * 0.25


def test_gaussian_translation_and_connection():
    fam = md.gaussian_family(md.GaussianFamilySpec(1.0, center=2.0))
    g0 = geo.metric(fam, [2.0]).entries[0, 0]
    # on a fixed grid, stay 6 sigma from the ends so the truncated tail is below 1e-8
    for l in (0.1, 0.9, 3.3, 4.0):
        assert abs(geo.metric(fam, [l]).entries[0, 0] - g0) <= 1e-6
        psi = fam([l])
        assert abs(np.vdot(psi, fam.gradient(np.array([l]))[0])) <= 1e-8
        assert abs(np.sum(np.abs(psi) ** 2) - 1) <= 1e-8
    # a grid recentred on each query is translation invariant at any l
    for l in (-40.0, 2.9, 1e3):
        recentred = md.gaussian_family(md.GaussianFamilySpec(1.0, center=l))
        assert abs(geo.metric(recentred, [l]).entries[0, 0] - g0) <= 1e-6


def test_gaussian_grid_coverage():
    fam = md.gaussian_family(md.GaussianFamilySpec(1.0))
    with pytest.raises(GridError):
        fam([3.5])
    with pytest.raises(GridError):
        md.GaussianFamilySpec(1.0, n_points=300)
    with pytest.raises(GridError):
        md.GaussianFamilySpec(1.0, half_width=4.0)
    with pytest.raises(GridError):
        md.GaussianFamilySpec(-1.0)
