import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helmholtz_bie.errors import BranchCut, InvalidWavenumber, OriginSingularity
from helmholtz_bie.specfun import (
    Wavenumber,
    bessel_j,
    bessel_y,
    fundamental_gradient,
    fundamental_hessian,
    fundamental_solution,
    hankel1,
)


def _envelope(order, z):
    return abs(complex(mp.hankel1(order, z)))


class TestWavenumber:
    @pytest.mark.parametrize("bad", [0.0, -1.0, -2 + 0j, 1 - 1j, complex("nan")])
    def test_rejects_excluded_values(self, bad):
        with pytest.raises(InvalidWavenumber):
            Wavenumber(bad)

    def test_lambda_accessor(self):
        assert Wavenumber(2 + 1j).lam == pytest.approx((2 + 1j) ** 2)

    def test_complex_with_positive_imaginary_part(self):
        assert Wavenumber(-1 + 0.5j).k == -1 + 0.5j


class TestBesselJ:
    def test_values_at_zero(self):
        assert bessel_j(0, 0) == 1.0
        assert bessel_j(1, 0) == 0.0

    def test_j0_at_one(self):
        assert bessel_j(0, 1.0) == pytest.approx(0.7651976865579666, rel=1e-15)

    @pytest.mark.parametrize("order", [0, 1])
    def test_accuracy_against_mpmath(self, order):
        zs = np.concatenate([np.geomspace(1e-8, 1, 40), np.linspace(1, 50, 200)])
        for z in zs:
            ref = complex(mp.besselj(order, z))
            scale = abs(ref) if z < 2 else _envelope(order, z)
            assert abs(bessel_j(order, z) - ref) <= 1e-12 * scale

    def test_complex_argument(self):
        z = 3.0 + 2.0j
        assert abs(bessel_j(1, z) - complex(mp.besselj(1, z))) < 1e-12 * abs(complex(mp.besselj(1, z)))

    def test_unsupported_order(self):
        with pytest.raises(ValueError):
            bessel_j(2, 1.0)


class TestBesselY:
    def test_values_at_one(self):
        assert bessel_y(0, 1.0) == pytest.approx(0.08825696421567700, rel=1e-13)
        assert bessel_y(1, 1.0) == pytest.approx(-0.7812128213002887, rel=1e-13)

    def test_logarithmic_blow_up(self):
        zs = [1e-4, 1e-8, 1e-12]
        vals = [bessel_y(0, z).real for z in zs]
        assert vals[0] > vals[1] > vals[2]
        for z, v in zip(zs, vals):
            assert v == pytest.approx(2 / math.pi * (math.log(z / 2) + 0.5772156649015329), rel=1e-6)

    @pytest.mark.parametrize("order", [0, 1])
    def test_accuracy_against_mpmath(self, order):
        for z in np.concatenate([np.geomspace(1e-6, 1, 30), np.linspace(1, 50, 150)]):
            ref = complex(mp.bessely(order, z))
            assert abs(bessel_y(order, z) - ref) <= 1e-10 * _envelope(order, z)

    @pytest.mark.parametrize("z", [0.0, -1.0, -10.0 + 0j])
    def test_branch_cut(self, z):
        with pytest.raises(BranchCut):
            bessel_y(0, z)
        with pytest.raises(BranchCut):
            hankel1(1, z)


class TestHankel:
    def test_values_at_one(self):
        assert hankel1(0, 1.0) == pytest.approx(0.7651976866 + 0.0882569642j, abs=1e-10)
        assert hankel1(1, 1.0) == pytest.approx(0.4400505857 - 0.7812128213j, abs=1e-10)

    @pytest.mark.parametrize("z", [100.0, 1000.0, 5000.0])
    def test_large_argument_modulus(self, z):
        assert abs(hankel1(0, z)) == pytest.approx(math.sqrt(2 / (math.pi * z)), rel=1 / z)

    def test_vectorised(self):
        z = np.array([1.0, 2.0, 30.0])
        assert hankel1(0, z).shape == (3,)


class TestFundamentalSolution:
    def test_value_at_unit_distance(self):
        assert fundamental_solution(1.0, np.array([1.0, 0.0])) == pytest.approx(
            0.0220642411 - 0.1912994216j, abs=1e-10
        )

    def test_radial_symmetry(self):
        x = np.array([0.3, -1.2])
        assert fundamental_solution(1.0, x) == fundamental_solution(1.0, -x)

    @pytest.mark.parametrize("k", [1.0, 2.5, 1.0 + 0.3j])
    def test_helmholtz_by_finite_differences(self, k):
        h = 1e-4
        x = np.array([2.0, 0.0])
        pts = [x + h * np.array(e) for e in ((1, 0), (-1, 0), (0, 1), (0, -1))]
        lap = (sum(fundamental_solution(k, p) for p in pts) - 4 * fundamental_solution(k, x)) / h**2
        assert abs(lap + k * k * fundamental_solution(k, x)) < 1e-5

    def test_log_behaviour_near_origin(self):
        r = 1e-6
        val = fundamental_solution(1.0, np.array([r, 0.0]))
        const = (math.log(0.5) + 0.5772156649015329) / (2 * math.pi) - 0.25j
        assert abs(val - math.log(r) / (2 * math.pi) - const) < 1e-10

    def test_origin(self):
        with pytest.raises(OriginSingularity):
            fundamental_solution(1.0, np.zeros(2))
        with pytest.raises(OriginSingularity):
            fundamental_gradient(1.0, np.zeros(2))

    def test_gradient_matches_central_differences(self, rng):
        for _ in range(20):
            x = rng.uniform(-3, 3, 2)
            h = 1e-6
            fd = np.array([
                (fundamental_solution(2.0, x + h * e) - fundamental_solution(2.0, x - h * e)) / (2 * h)
                for e in np.eye(2)
            ])
            g = fundamental_gradient(2.0, x)
            assert np.linalg.norm(g - fd) < 1e-7 * np.linalg.norm(g)

    def test_gradient_is_odd(self):
        x = np.array([0.4, 0.9])
        assert np.allclose(fundamental_gradient(1.5, -x), -fundamental_gradient(1.5, x))

    def test_gradient_component(self):
        g = fundamental_gradient(1.0, np.array([1.0, 0.0]))
        assert g[0] == pytest.approx(-hankel1(1, 1.0) / 4j, rel=1e-14)
        assert g[1] == 0

    def test_hessian_trace_is_helmholtz(self):
        x = np.array([0.7, -0.4])
        hess = fundamental_hessian(1.3, x)
        assert abs(np.trace(hess) + 1.69 * fundamental_solution(1.3, x)) < 1e-13

    def test_sommerfeld_decay(self):
        k = 2.0
        res = []
        for r in (10.0, 100.0, 1000.0):
            x = np.array([r, 0.0]) / math.sqrt(2) * np.array([1, 1])
            g = fundamental_gradient(k, x)
            res.append(math.sqrt(r) * abs(g @ (x / r) - 1j * k * fundamental_solution(k, x)))
        assert res[0] > res[1] > res[2]


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 50.0))
def test_wronskian(z):
    w = bessel_j(0, z) * bessel_y(1, z) - bessel_j(1, z) * bessel_y(0, z)
    assert abs(w + 2 / (math.pi * z)) <= 1e-10 * 2 / (math.pi * z)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 50.0))
def test_derivative_of_j0(z):
    h = 1e-6 * max(1.0, z)
    fd = (bessel_j(0, z + h) - bessel_j(0, z - h)) / (2 * h)
    assert abs(fd + bessel_j(1, z)) <= 1e-7 * max(abs(bessel_j(1, z)), _envelope(1, z))
