import numpy as np
import pytest
from numpy.testing import assert_allclose

from qsmetric import fields as fl
from qsmetric import geometry as geo
from qsmetric.errors import BoundaryNode, GridError, NotLorentz, OffShell
from qsmetric.models import bloch_family

GRID = fl.SpacetimeGrid.uniform((7, 7, 7, 7), (0.25,) * 4, (-0.75,) * 4)
CENTER = (3, 3, 3, 3)


def test_grid_validation():
    with pytest.raises(GridError):
        fl.SpacetimeGrid.uniform((4, 7, 7, 7), (0.1,) * 4)
    with pytest.raises(GridError):
        fl.SpacetimeGrid([np.linspace(0, 1, 6)] * 3 + [np.array([0, 0.1, 0.2, 0.35, 0.4])])
    assert GRID.shape == (7, 7, 7, 7)
    assert_allclose(GRID.point(CENTER), 0.0, atol=1e-15)
    assert GRID.is_interior(CENTER) and not GRID.is_interior((0, 3, 3, 3))


def test_lightlike_wave():
    wave = fl.plane_wave(GRID, [1, 1, 0, 0], mass=0.0)
    assert fl.kg_residual(wave, "analytic") <= 1e-12
    assert fl.kg_residual(wave, "grid") <= 1e-2


def test_rest_frame_wave():
    wave = fl.plane_wave(GRID, fl.on_shell_k([0, 0, 0], 1.0), mass=1.0)
    x0 = GRID.coords()[..., 0]
    assert_allclose(wave.values, np.exp(-1j * x0), atol=1e-15)


def test_random_on_shell_waves(rng):
    for _ in range(20):
        mass = rng.uniform(0, 2)
        k = fl.on_shell_k(rng.normal(size=3), mass, c=1.3, hbar=0.7)
        wave = fl.plane_wave(GRID, k, rng.normal() + 1j * rng.normal(), mass, c=1.3, hbar=0.7)
        assert fl.kg_residual(wave, "analytic") <= 1e-10
        assert fl.kg_residual(wave, "grid") <= 0.05 * np.max(np.abs(wave.values)) * (k @ k + 1) ** 2


def test_off_shell_rejected_unless_flagged():
    with pytest.raises(OffShell):
        fl.plane_wave(GRID, [2.0, 1.0, 0, 0], mass=0.0)
    wave = fl.plane_wave(GRID, [2.0, 1.0, 0, 0], mass=0.0, off_shell=True)
    assert fl.kg_residual(wave, "analytic") == pytest.approx(3.0, rel=1e-12)


def test_constant_field_residual():
    mass = 1.5
    const = fl.constant_field(GRID, 2.0 - 1.0j, mass=mass)
    expected = mass**2 * abs(2.0 - 1.0j)
    assert fl.kg_residual(const, "grid") == pytest.approx(expected, rel=1e-12)
    assert fl.kg_residual(const, "analytic") == pytest.approx(expected, rel=1e-12)


def test_grid_convergence_order():
    res = []
    for n in (9, 17, 33):
        grid = fl.SpacetimeGrid.uniform((n,) * 4, (0.8 / (n - 1),) * 4)
        res.append(fl.kg_residual(fl.plane_wave(grid, fl.on_shell_k([3, 2, 1], 1.0), mass=1.0), "grid"))
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert orders.min() >= 1.8


def test_grid_gradient_convergence():
    errs = []
    k = fl.on_shell_k([1.0, -0.5, 0.3], 0.5)
    for n in (9, 17, 33):
        grid = fl.SpacetimeGrid.uniform((n,) * 4, (0.8 / (n - 1),) * 4)
        wave = fl.plane_wave(grid, k, 1.0, 0.5)
        node = (n // 2,) * 4
        g_grid = fl.config_metric(wave, node, mode="grid").entries
        g_exact = fl.config_metric(wave, node, mode="analytic").entries
        errs.append(np.abs(g_grid - g_exact).max())
    assert np.log2(errs[0] / errs[1]) >= 1.8 and np.log2(errs[1] / errs[2]) >= 1.8


def test_constant_field_metric_is_zero():
    g = fl.config_metric(fl.constant_field(GRID, 1.0 + 2j), CENTER)
    assert_allclose(g.entries, 0.0, atol=0)
    assert g.signature == (0, 0, 4)


def test_plane_wave_metric_is_k_outer_k():
    A = 0.8 - 0.6j
    k = fl.on_shell_k([0.4, -0.2, 0.9], 1.0)
    wave = fl.plane_wave(GRID, k, A, mass=1.0)
    kl = fl.lower(k)
    assert_allclose(fl.config_metric(wave, CENTER).entries, abs(A) ** 2 * np.outer(kl, kl), atol=1e-12)
    fine = fl.SpacetimeGrid.uniform((5,) * 4, (0.01,) * 4)
    g = fl.config_metric(fl.plane_wave(fine, k, A, mass=1.0), (2, 2, 2, 2), mode="grid").entries
    assert_allclose(g, abs(A) ** 2 * np.outer(kl, kl), atol=1e-3)
    g = fl.config_metric(wave, CENTER).entries
    sv = np.linalg.svd(g, compute_uv=False)
    assert sv[1] <= 1e-8 * sv[0]


def test_rest_frame_signature_not_positive_definite():
    wave = fl.plane_wave(GRID, fl.on_shell_k([0, 0, 0], 1.0), mass=1.0)
    g = fl.config_metric(wave, CENTER)
    assert g.signature == (1, 0, 3)


def test_massless_negative_signature():
    wave = fl.plane_wave(GRID, [1, 1, 0, 0], mass=0.0)
    assert fl.config_metric(wave, CENTER, sign_convention=-1).signature == (0, 1, 3)
    assert fl.config_metric(wave, CENTER).signature == (1, 0, 3)


def test_sign_convention_validation():
    with pytest.raises(ValueError):
        fl.config_metric(fl.plane_wave(GRID, [1, 1, 0, 0]), CENTER, sign_convention=2)


def test_connection_option_removes_single_wave_phase():
    wave = fl.plane_wave(GRID, fl.on_shell_k([0.3, 0.1, 0.0], 1.0), 1.0, mass=1.0)
    assert_allclose(fl.config_metric(wave, CENTER, include_connection=True).entries, 0.0, atol=1e-14)


def test_two_wave_metric_varies_with_position():
    m = 1.0
    wave = fl.superpose(
        fl.plane_wave(GRID, fl.on_shell_k([1.0, 0, 0], m), 1.0, m),
        fl.plane_wave(GRID, fl.on_shell_k([-0.5, 0.7, 0], m), 0.6j, m),
    )
    metrics = np.array([
        fl.config_metric(wave, node).entries
        for node in [(i, j, 3, 3) for i in range(1, 6) for j in range(1, 6)]
    ])
    assert np.max(metrics.max(axis=0) - metrics.min(axis=0)) > 1e-2
    # the ray-space metric of a parameter family is a single matrix at each parameter point
    fam = bloch_family()
    assert_allclose(geo.metric(fam, [1.0, 0.3]).entries, geo.metric(fam, [1.0, 0.3]).entries, atol=0)


def test_boundary_node_rejected():
    wave = fl.plane_wave(GRID, [1, 1, 0, 0])
    with pytest.raises(BoundaryNode):
        fl.config_metric(wave, (0, 3, 3, 3))
    with pytest.raises(BoundaryNode):
        fl.config_metric(wave, (3, 3, 3, 6), mode="grid")


def test_analytic_mode_needs_waves(tmp_path):
    path = tmp_path / "field.txt"
    fl.write_field(path, fl.plane_wave(GRID, [1, 1, 0, 0]))
    loaded = fl.read_field(path)
    with pytest.raises(ValueError):
        fl.config_metric(loaded, CENTER, mode="analytic")
    assert fl.config_metric(loaded, CENTER, mode="grid").signature == (1, 0, 3)


# -- Lorentz --------------------------------------------------------------------------


def test_lorentz_helpers_are_lorentz(rng):
    eta = fl.MINKOWSKI
    for L in (fl.boost(0.7, [1, 2, 3]), fl.rotation([0, 0, 1], 0.4), fl.random_lorentz(rng)):
        assert_allclose(L.T @ eta @ L, eta, atol=1e-12)


def test_boost_check_examples(rng):
    rest = fl.on_shell_k([0, 0, 0], 1.0)
    assert fl.lorentz_boost_check(rest, np.eye(4)) <= 1e-15
    assert fl.lorentz_boost_check(rest, fl.boost(0.5)) <= 1e-6
    moving = fl.on_shell_k([0.3, -0.4, 0.2], 1.0)
    assert fl.lorentz_boost_check(moving, fl.rotation([1, 1, 0], 1.1)) <= 1e-6
    for _ in range(5):
        assert fl.lorentz_boost_check(moving, fl.random_lorentz(rng), amplitude=0.3 + 1j) <= 1e-6


def test_boosted_wave_metric_matches_tensor_law():
    # independent check: build the boosted wave on a grid and compare at the mapped node
    k = fl.on_shell_k([0.2, 0.1, -0.3], 1.0)
    L = fl.boost(0.4, [0, 1, 0])
    g = fl.config_metric(fl.plane_wave(GRID, k, 1.0, 1.0), CENTER).entries
    gp = fl.config_metric(fl.plane_wave(GRID, L @ k, 1.0, 1.0), CENTER).entries
    Li = np.linalg.inv(L)
    assert_allclose(gp, Li.T @ g @ Li, atol=1e-12)


def test_non_lorentz_rejected():
    with pytest.raises(NotLorentz):
        fl.lorentz_boost_check(fl.on_shell_k([0, 0, 0], 1.0), np.diag([1.0, 2.0, 1.0, 1.0]))


# -- file format ------------------------------------------------------------------------


def test_field_file_roundtrip(tmp_path, rng):
    grid = fl.SpacetimeGrid.uniform((5, 6, 5, 7), (0.1, 0.2, 0.3, 1 / 3), (0.0, -1.0, 0.5, 1e-7))
    values = rng.normal(size=grid.shape) + 1j * rng.normal(size=grid.shape)
    field = fl.ComplexField(grid, values, mass=0.5)
    path = tmp_path / "f.txt"
    fl.write_field(path, field)
    text = path.read_text()
    assert text.startswith("# qsmetric-field v1 dims=5,6,5,7 spacing=0.1,0.2,0.3,0.3333333333333333 ")
    assert text.splitlines()[1].startswith("0 0 0 0 ")
    back = fl.read_field(path, mass=0.5)
    assert np.array_equal(back.values, field.values)
    assert_allclose(back.grid.spacing, grid.spacing, rtol=1e-15)
    fl.write_field(tmp_path / "g.txt", back)
    assert (tmp_path / "g.txt").read_text() == text


@pytest.mark.parametrize(
    "content",
    [
        "",
        "not a header\n",
        "# qsmetric-field v1 dims=5,5,5 spacing=1,1,1 origin=0,0,0\n",
        "# qsmetric-field v1 dims=5,5,5,5 spacing=1,1,1,1 origin=0,0,0,0\n0 0 0 0 1.0 0.0\n",
    ],
)
def test_field_file_errors(tmp_path, content):
    path = tmp_path / "bad.txt"
    path.write_text(content)
    with pytest.raises(GridError):
        fl.read_field(path)
