import numpy as np
import pytest

from helmholtz_bie import spectra
from helmholtz_bie.errors import HypothesisViolated, NoConvergence, UnresolvedDip
from helmholtz_bie.geometry import build_grid
from helmholtz_bie.nystrom import assemble_all
from helmholtz_bie.oracle import bessel_jn, bessel_zero
from helmholtz_bie.potentials import point_source
from helmholtz_bie.spectra import (
    dirichlet_kernel,
    eigen_scan,
    eigenfunction_from_density,
    golden_section,
    holmgren_injectivity_check,
    interior_samples,
    operator_kernel,
    single_layer_condition,
    xi_decompose,
)

from conftest import J01, J11, JP11, JP21


def _traces(k, grid, x0):
    u, g = point_source(k, x0, grid.points)
    return u, np.sum(g * grid.normals, axis=1)


@pytest.fixture(scope="module")
def disk_scan(disk128):
    return eigen_scan("interior-dirichlet", disk128, (2.0, 5.5), samples=128)


def test_golden_section_minimises():
    x, fx = golden_section(lambda t: abs(t - 0.3), 0.0, 1.0, 1e-12)
    assert x == pytest.approx(0.3, abs=1e-11)
    assert fx < 1e-11


def test_scan_validation(disk128):
    with pytest.raises(ValueError):
        eigen_scan("interior-robin", disk128, (2, 4))
    with pytest.raises(ValueError):
        eigen_scan("interior-dirichlet", disk128, (2, 4), samples=32)
    with pytest.raises(ValueError):
        eigen_scan("interior-dirichlet", disk128, (4, 2))


def test_dirichlet_scan_roots(disk_scan):
    oracle = [bessel_zero("J0", 1), bessel_zero("J1", 1), bessel_zero("J2", 1)]
    assert len(disk_scan.roots) == 3
    assert np.max(np.abs(np.array(disk_scan.roots) - oracle)) < 1e-6
    assert disk_scan.dims == [1, 2, 2]
    assert disk_scan.roots == sorted(disk_scan.roots)
    d = disk_scan.as_dict()
    assert set(d) == {"role", "roots", "dims", "sigma_at_roots"}


def test_dims_stable_under_refinement(disk):
    a = eigen_scan("interior-dirichlet", build_grid(disk, 64), (2.0, 4.0), samples=64)
    b = eigen_scan("interior-dirichlet", build_grid(disk, 128), (2.0, 4.0), samples=64)
    assert a.dims == b.dims == [1, 2]
    assert np.max(np.abs(np.array(a.roots) - b.roots)) < 1e-6


def test_neumann_scan(disk):
    res = eigen_scan("interior-neumann", build_grid(disk, 64), (1.5, 3.5), samples=64)
    assert np.max(np.abs(np.array(res.roots) - [JP11, JP21])) < 1e-6
    assert res.dims == [2, 2]


def test_annulus_exterior_bounded_scan(annulus64):
    res = eigen_scan("exterior-dirichlet-bounded", annulus64, (2.0, 4.0), samples=64)
    assert np.max(np.abs(np.array(res.roots) - [J01, J11])) < 1e-6
    assert res.dims == [1, 2]


def test_threaded_scan_matches_serial(disk):
    grid = build_grid(disk, 32)
    a = eigen_scan("interior-dirichlet", grid, (2.0, 3.0), samples=64)
    b = eigen_scan("interior-dirichlet", grid, (2.0, 3.0), samples=64, workers=4)
    assert np.array_equal(a.sigma, b.sigma)
    assert a.roots == b.roots


def test_unresolved_dip(disk, monkeypatch):
    grid = build_grid(disk, 32)
    monkeypatch.setattr(spectra, "refine_root", lambda role, grid, lo, hi: (lo, 0.0))
    with pytest.raises(UnresolvedDip):
        eigen_scan("interior-dirichlet", grid, (2.0, 3.0), samples=64)


def test_eigenfunction_matches_bessel(disk128):
    mu = dirichlet_kernel(J01, disk128)
    assert mu.shape[1] == 1
    ef = eigenfunction_from_density(J01, disk128, mu[:, 0])
    pts = interior_samples(disk128)
    u = ef(pts)
    ref = np.array([bessel_jn(0, J01 * r).real for r in np.hypot(pts[:, 0], pts[:, 1])])
    corr = abs(np.vdot(ref, u)) / (np.linalg.norm(ref) * np.linalg.norm(u))
    assert corr > 1 - 1e-8
    assert ef.trace_defect < 1e-6 and ef.exterior_max < 1e-6
    assert abs(ef(np.array([[2.0, 0.0]]))[0]) < 1e-6


def test_eigenfunction_normal_derivative_recovers_density(disk128):
    mu = dirichlet_kernel(J01, disk128)[:, 0]
    Wt = assemble_all(J01, disk128, ("Wt",))["Wt"].matrix
    nd = (-0.5 * np.eye(128) + Wt) @ (-mu)
    assert np.max(np.abs(nd - mu)) < 1e-8


def test_kernel_normalisation(disk128):
    basis = dirichlet_kernel(J11, disk128)
    gram = (np.conj(basis).T * disk128.weights) @ basis
    assert np.allclose(gram.diagonal(), 1.0, atol=1e-12)
    for j in range(basis.shape[1]):
        i = np.argmax(np.abs(basis[:, j]))
        assert abs(basis[i, j].imag) < 1e-14 and basis[i, j].real > 0
    assert operator_kernel(np.eye(128), disk128).shape == (128, 0)


def test_eigenfunction_refused_when_hole_is_neumann_resonant(annulus64):
    with pytest.raises(HypothesisViolated):
        eigenfunction_from_density(JP11, annulus64, np.ones(annulus64.size))


def test_holmgren_two_modes(disk128):
    basis = dirichlet_kernel(J11, disk128)
    rep = holmgren_injectivity_check(J11, disk128, basis)
    assert rep.gram_rank == 2 and rep.gram_cond < 1e3
    assert rep.conjugate_defect < 1e-8
    assert rep.ok


def test_holmgren_empty_kernel(disk128):
    rep = holmgren_injectivity_check(2.0, disk128, np.zeros((128, 0)))
    assert rep.density_norms == [] and rep.gram_rank == 0


def test_xi_single_layer_regime_on_disk(disk128):
    u, un = _traces(2.0, disk128, (3.0, 0.5))
    xi = xi_decompose(2.0, disk128, u, un)
    assert xi.kernel_dim == 0
    assert disk128.norm(xi.psi) < 1e-8
    x = np.array([[0.3, 0.2], [-0.4, -0.1]])
    assert np.max(np.abs(xi(x) - point_source(2.0, (3.0, 0.5), x)[0])) < 1e-8


def test_xi_zero_solution(kite128):
    xi = xi_decompose(2.0, kite128, np.zeros(128), np.zeros(128))
    assert not np.any(xi.phi) and not np.any(xi.psi)


def test_xi_kite_point_sources(kite128, rng):
    pts = interior_samples(kite128, n=12)[:10]
    for _ in range(5):
        ang = rng.uniform(0, 2 * np.pi)
        x0 = 3.0 * np.array([np.cos(ang), np.sin(ang)])
        xi = xi_decompose(2.0, kite128, *_traces(2.0, kite128, x0))
        assert np.max(np.abs(xi(pts) - point_source(2.0, x0, pts)[0])) < 1e-7


def test_xi_with_kernel_on_disk(disk128):
    # at a Neumann eigenvalue the double layer part is needed and lies in Ker(-1/2 I + W)
    u, un = _traces(JP11, disk128, (3.0, 0.5))
    xi = xi_decompose(JP11, disk128, u, un)
    assert xi.kernel_dim == 2
    ops = assemble_all(JP11, disk128, ("W", "Wt"))
    assert disk128.norm((-0.5 * np.eye(128) + ops["W"].matrix) @ xi.psi) < 1e-8 * disk128.norm(u)
    K = operator_kernel(-0.5 * np.eye(128) + ops["Wt"].matrix, disk128)
    assert np.max(np.abs((np.conj(K).T * disk128.weights) @ xi.phi)) < 1e-8 * disk128.norm(xi.phi)
    x = np.array([[0.3, 0.2]])
    assert abs(xi(x)[0] - point_source(JP11, (3.0, 0.5), x)[0][0]) < 1e-7


def test_xi_refused_when_hole_is_dirichlet_resonant(annulus64):
    with pytest.raises(HypothesisViolated):
        xi_decompose(J01, annulus64, np.ones(annulus64.size), np.ones(annulus64.size))


def test_xi_rejects_non_solutions(kite128, rng):
    # independent random traces are not Cauchy data of any Helmholtz solution
    with pytest.raises(NoConvergence):
        xi_decompose(2.0, kite128, rng.standard_normal(128), rng.standard_normal(128))


@pytest.mark.parametrize("k", [2.0, JP11])
def test_xi_stacked_map_has_full_rank(disk128, k):
    # (phi, psi) in A x Ker(-1/2 I + W) maps injectively onto boundary traces
    n = 128
    ops = assemble_all(k, disk128, ("V", "W", "Wt"))
    eye = np.eye(n)
    K = operator_kernel(-0.5 * eye + ops["W"].matrix, disk128)
    Kt = operator_kernel(-0.5 * eye + ops["Wt"].matrix, disk128)
    sw = np.sqrt(disk128.weights)
    q, _ = np.linalg.qr(np.hstack([sw[:, None] * Kt, eye]))
    A = q[:, Kt.shape[1] : n] / sw[:, None]
    B = np.hstack([ops["V"].matrix @ A, (0.5 * eye + ops["W"].matrix) @ K])
    s = np.linalg.svd(sw[:, None] * B, compute_uv=False)
    assert B.shape[1] == n - Kt.shape[1] + K.shape[1]
    assert int(np.sum(s > 1e-8 * s[0])) == B.shape[1]


def test_single_layer_condition_grows_at_most_linearly(kite_domain):
    conds = [single_layer_condition(2.0, build_grid(kite_domain, n)) for n in (64, 128, 256)]
    assert all(np.isfinite(conds))
    for a, b in zip(conds, conds[1:]):
        assert b / a < 2.5
