import numpy as np
import pytest

from ksmetrics.grids import RadialField, uniform_grid
from ksmetrics.states import (
    HeliumState,
    ProductState,
    angular_basis,
    ion_radial_basis,
    overlap,
    pair_quadrature,
    state_norm,
)


class TestBasisFactors:
    @pytest.mark.parametrize("z", [0.8, 2.0, 7.5])
    def test_radial_orthonormal(self, z):
        # int R_i R_j r^2 dr = delta_ij under the physical measure
        r = np.linspace(0, 60.0 / z, 30001)
        basis = ion_radial_basis(z, range(6), r)
        gram = np.einsum("ri,rj,r->ij", basis, basis, r**2) * (r[1] - r[0])
        np.testing.assert_allclose(gram, np.eye(6), atol=1e-6)

    def test_angular_orthonormal(self):
        t = np.linspace(-1, 1, 20001)
        basis = angular_basis(range(5), t)
        w = np.full(t.size, t[1] - t[0])
        w[0] = w[-1] = 0.5 * (t[1] - t[0])
        gram = np.einsum("ti,tj,t->ij", basis, basis, w)
        np.testing.assert_allclose(gram, np.eye(5), atol=1e-6)

    def test_radial_lowest_is_hydrogenic(self):
        z = 2.0
        r = np.array([0.0, 0.3, 1.1])
        got = ion_radial_basis(z, [0], r)[:, 0]
        exact = np.sqrt((2 * z) ** 3 / 2.0) * np.exp(-z * r)
        np.testing.assert_allclose(got, exact, rtol=1e-13)


class TestHeliumState:
    def test_single_config_norm(self):
        cube = np.zeros((1, 1, 1))
        cube[0, 0, 0] = 1.0
        state = HeliumState(2.0, cube)
        assert state_norm(state) == pytest.approx(2.0, abs=1e-8)

    def test_single_config_closed_form(self):
        z = 1.5
        cube = np.zeros((2, 2, 1))
        cube[0, 0, 0] = 1.0
        state = HeliumState(z, cube)
        r1, r2, t = 0.4, 1.3, -0.2
        exact = (
            np.sqrt(2.0 / (8 * np.pi**2))
            * ((2 * z) ** 3 / 2.0)
            * np.exp(-z * (r1 + r2))
            / np.sqrt(2.0)
        )
        assert state.value(r1, r2, t) == pytest.approx(exact, rel=1e-12)

    def test_mixed_cube_norm(self):
        rng = np.random.default_rng(7)
        cube = rng.standard_normal((3, 3, 2))
        cube /= np.sqrt(np.sum(cube**2))
        state = HeliumState(2.0, cube)
        assert state_norm(state) == pytest.approx(2.0, abs=1e-7)


class TestProductState:
    @pytest.fixture(scope="class")
    @staticmethod
    def gaussian_product():
        grid = uniform_grid(2001, 10.0)
        rho = 2.0 * np.pi**-1.5 * np.exp(-(grid.nodes**2))
        return ProductState(RadialField(grid, rho))

    def test_norm(self, gaussian_product):
        assert state_norm(gaussian_product) == pytest.approx(2.0, abs=1e-6)

    def test_angle_independent(self, gaussian_product):
        v = gaussian_product.value(0.5, 1.0, np.array([-1.0, 0.0, 1.0]))
        assert np.ptp(v) == 0.0

    def test_value_is_orbital_product(self, gaussian_product):
        got = gaussian_product.value(0.3, 0.9, 0.0)
        orb = lambda r: np.sqrt(np.pi**-1.5 * np.exp(-(r**2)))
        assert got == pytest.approx(np.sqrt(2.0) * orb(0.3) * orb(0.9), rel=1e-6)


class TestOverlap:
    def test_cauchy_schwarz_and_symmetry(self):
        rng = np.random.default_rng(3)
        cubes = []
        for _ in range(2):
            c = rng.standard_normal((2, 2, 2))
            cubes.append(c / np.sqrt(np.sum(c**2)))
        a, b = (HeliumState(2.0, c) for c in cubes)
        quad = pair_quadrature([a, b])
        ab = overlap(a, b, quad)
        assert ab == pytest.approx(overlap(b, a, quad), rel=1e-12)
        assert abs(ab) <= 2.0 + 1e-9

    def test_coefficient_inner_product(self):
        # overlap of two expansion states reduces to 2 x (coefficient dot product)
        rng = np.random.default_rng(11)
        c1 = rng.standard_normal((3, 3, 2))
        c1 /= np.sqrt(np.sum(c1**2))
        c2 = rng.standard_normal((3, 3, 2))
        c2 /= np.sqrt(np.sum(c2**2))
        a, b = HeliumState(3.0, c1), HeliumState(3.0, c2)
        assert overlap(a, b) == pytest.approx(2.0 * np.sum(c1 * c2), abs=1e-7)
