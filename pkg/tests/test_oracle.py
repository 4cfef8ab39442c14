import numpy as np
import pytest
import scipy.special as sp

from helmholtz_bie import oracle
from helmholtz_bie.specfun import bessel_j


@pytest.mark.parametrize("kind, value", [
    ("J0", 2.404825557695773),
    ("J1", 3.831705970207512),
    ("J1'", 1.841183781340659),
    ("J0'", 3.831705970207512),
    ("J2'", 3.054236928227140),
])
def test_bessel_zero_first(kind, value):
    assert oracle.bessel_zero(kind, 1) == pytest.approx(value, abs=1e-11)


def test_bessel_zero_matches_scipy():
    assert np.allclose([oracle.bessel_zero("J0", i) for i in (1, 2, 3)], sp.jn_zeros(0, 3), atol=1e-11)
    assert np.allclose([oracle.bessel_zero("J3'", i) for i in (1, 2)], sp.jnp_zeros(3, 2), atol=1e-11)


def test_bessel_zero_index_validation():
    with pytest.raises(ValueError):
        oracle.bessel_zero("J0", 0)


@pytest.mark.parametrize("z", [0.05, 1.0, 4.0, 12.0, 35.0, 2.0 + 1.5j])
def test_higher_orders_against_wronskian(z):
    J = oracle.bessel_jn_all(41, z)
    Y = oracle.bessel_yn_all(41, z)
    m = np.arange(41)
    w = J[m + 1] * Y[m] - J[m] * Y[m + 1]
    ok = np.abs(Y[m]) < 1e250
    assert np.max(np.abs(w[ok] - 2 / (np.pi * z)) / abs(2 / (np.pi * z))) < 1e-10


@pytest.mark.parametrize("z", [0.3, 2.5, 9.0, 30.0])
def test_higher_orders_against_scipy(z):
    m = np.arange(30)
    ref = sp.jv(m, z)
    J = oracle.bessel_jn_all(29, z)
    assert np.max(np.abs(J - ref) / np.maximum(np.abs(ref), 1e-300)) < 1e-10
    assert abs(J[0] - bessel_j(0, z)) < 1e-14


def test_negative_orders():
    assert oracle.bessel_jn(-3, 2.0) == pytest.approx(-oracle.bessel_jn(3, 2.0))
    assert oracle.bessel_jn_prime(1, 2.0) == pytest.approx(sp.jvp(1, 2.0), rel=1e-13)


def test_mie_total_field_vanishes_on_disk():
    sol = oracle.mie_solution(2.0, 1.0, (1.0, 0.0))
    th = 2 * np.pi * np.arange(32) / 32
    pts = (1 + 1e-15) * np.stack([np.cos(th), np.sin(th)], -1)
    assert np.max(np.abs(sol.total(pts))) < 1e-12


def test_mie_truncation_converged():
    a = oracle.mie_solution(2.0)
    b = oracle.MieSolution(a.k, a.a, a.d, 2 * a.order, np.zeros(0), 0.0)
    coef = -(1j ** np.arange(-b.order, b.order + 1)) * np.array(
        [oracle.bessel_jn(m, 2.0) / oracle.hankel_n(m, 2.0) for m in range(-b.order, b.order + 1)]
    )
    b = oracle.MieSolution(a.k, a.a, a.d, b.order, coef, 0.0)
    pts = np.array([[2.0, 0.0], [0.0, -1.5], [-3.0, 1.0]])
    assert np.max(np.abs(a.scattered(pts) - b.scattered(pts))) < 1e-13


def test_mie_direction_rotation():
    pts = np.array([[0.0, 2.0]])
    a = oracle.mie_exterior_dirichlet(2.0, 1.0, (0.0, 1.0), pts)
    b = oracle.mie_exterior_dirichlet(2.0, 1.0, (1.0, 0.0), np.array([[2.0, 0.0]]))
    assert a[0] == pytest.approx(b[0], abs=1e-13)


def test_mie_complex_wavenumber_decays():
    sol = oracle.mie_solution(2.0 + 0.5j)
    vals = [abs(sol.scattered(np.array([[r, 0.3]]))[0]) for r in (2.0, 4.0, 8.0)]
    assert vals[0] > vals[1] > vals[2]


def laplacian4(f, x, h=1e-2):
    """Fourth-order five-point-per-axis finite-difference Laplacian."""
    c = np.array([-1, 16, -30, 16, -1]) / (12 * h * h)
    offs = np.array([-2, -1, 0, 1, 2]) * h
    pts = [x + [o, 0] for o in offs] + [x + [0, o] for o in offs]
    u = f(np.array(pts))
    return c @ u[:5] + c @ u[5:], u[2]


def test_mie_helmholtz_residual(rng):
    k = 2.0
    sol = oracle.mie_solution(k)
    for _ in range(5):
        r, t = rng.uniform(1.5, 4.0), rng.uniform(0, 2 * np.pi)
        x = np.array([r * np.cos(t), r * np.sin(t)])
        lap, u = laplacian4(sol.scattered, x)
        assert abs(lap + k * k * u) < 1e-6


def test_mie_evaluated_outside_only():
    with pytest.raises(ValueError):
        oracle.mie_solution(2.0).scattered(np.array([[0.5, 0.0]]))


def test_dirichlet_eigenfunction_vanishes_on_boundary():
    th = np.linspace(0, 2 * np.pi, 9)
    pts = np.stack([np.cos(th), np.sin(th)], -1)
    assert np.max(np.abs(oracle.disk_eigenfunction("dirichlet", 0, 1, pts))) < 1e-11


def test_neumann_eigenfunction_radial_derivative():
    k = oracle.disk_eigenvalue("neumann", 1, 1)
    assert abs(oracle.bessel_jn_prime(1, k)) < 1e-10
    h = 1e-5
    pts = np.array([[1 + h, 0.0], [1 - h, 0.0]])
    u = oracle.disk_eigenfunction("neumann", 1, 1, pts)
    assert abs((u[0] - u[1]) / (2 * h)) < 1e-9


def test_eigenfunction_orthogonality():
    xr, wr = np.polynomial.legendre.leggauss(40)
    r = 0.5 * (xr + 1)
    wr = 0.5 * wr
    nt = 64
    th = 2 * np.pi * np.arange(nt) / nt
    R, T = np.meshgrid(r, th, indexing="ij")
    pts = np.stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()], -1)
    w = (wr[:, None] * R * (2 * np.pi / nt)).ravel()
    a = oracle.disk_eigenfunction("dirichlet", 0, 1, pts)
    b = oracle.disk_eigenfunction("dirichlet", 1, 1, pts)
    assert abs(np.sum(w * a * np.conj(b))) < 1e-10
    assert np.sum(w * np.abs(a) ** 2) > 0.1
