import numpy as np
import pytest
from scipy.integrate import cumulative_simpson

from ksmetrics.errors import ContractViolation
from ksmetrics.grids import (
    RadialField,
    RadialGrid,
    geometric_panel_grid,
    panel_grid,
    second_derivative,
    uniform_grid,
)


class TestRadialGrid:
    @pytest.mark.parametrize("n", [4, 5, 101, 128, 2001])
    def test_uniform_integrates_constant_exactly(self, n):
        g = uniform_grid(n, 7.5)
        assert g.integrate(np.ones(n)) == pytest.approx(7.5, rel=1e-12)

    def test_uniform_polynomial_accuracy(self):
        g = uniform_grid(2001, 2.0)
        # Simpson-type weights are exact for cubics
        assert g.integrate(g.nodes**3) == pytest.approx(2.0**4 / 4, rel=1e-12)

    def test_panel_integrates_constant_exactly(self):
        g = panel_grid([0.0, 0.5, 2.0, 7.0], points_per_panel=8)
        assert g.integrate(np.ones(g.n)) == pytest.approx(7.0, rel=1e-12)

    def test_panel_gaussian_integral(self):
        g = panel_grid(np.linspace(0, 12, 13), points_per_panel=16)
        got = g.integrate_d3r(np.exp(-g.nodes**2))
        assert got == pytest.approx(np.pi**1.5, rel=1e-12)

    def test_geometric_panels_span_scales(self):
        g = geometric_panel_grid(1e-3, 50.0)
        assert g.nodes[0] < 1e-3
        assert g.integrate(np.ones(g.n)) == pytest.approx(50.0, rel=1e-12)
        # resolves a narrow exponential: int_0^inf e^(-r/s) r^2 dr = 2 s^3
        s = 5e-3
        got = g.integrate(np.exp(-g.nodes / s) * g.nodes**2)
        assert got == pytest.approx(2 * s**3, rel=1e-9)

    def test_monotonic_nodes_required(self):
        with pytest.raises(ContractViolation):
            RadialGrid(np.array([0.0, 1.0, 1.0]), np.ones(3), "uniform")

    def test_positive_weights_required(self):
        with pytest.raises(ContractViolation):
            RadialGrid(np.array([0.0, 1.0, 2.0]), np.array([1.0, -1.0, 1.0]), "uniform")


class TestRadialField:
    def test_shape_mismatch_rejected(self):
        g = uniform_grid(11, 1.0)
        with pytest.raises(ContractViolation):
            RadialField(g, np.ones(10))

    def test_nonfinite_rejected(self):
        g = uniform_grid(11, 1.0)
        v = np.ones(11)
        v[3] = np.inf
        with pytest.raises(ContractViolation):
            RadialField(g, v)

    def test_density_normalization(self):
        g = uniform_grid(2001, 14.0)
        omega = 0.5
        rho = 2.0 * (omega / np.pi) ** 1.5 * np.exp(-omega * g.nodes**2)
        assert RadialField(g, rho).integrate_d3r() == pytest.approx(2.0, abs=1e-10)


class TestSecondDerivative:
    def test_parabola(self):
        g = uniform_grid(101, 5.0)
        d2 = second_derivative(RadialField(g, g.nodes**2))
        np.testing.assert_allclose(d2.values, 2.0, atol=1e-8)

    def test_constant(self):
        g = uniform_grid(64, 5.0)
        d2 = second_derivative(RadialField(g, np.full(64, 4.2)))
        np.testing.assert_allclose(d2.values, 0.0, atol=1e-9)

    def test_sine(self):
        g = uniform_grid(601, 6.0)
        d2 = second_derivative(RadialField(g, np.sin(g.nodes)))
        np.testing.assert_allclose(d2.values, -np.sin(g.nodes), atol=1e-6)

    def test_nonuniform_rejected(self):
        g = panel_grid([0.0, 1.0, 5.0], points_per_panel=8)
        with pytest.raises(ContractViolation):
            second_derivative(RadialField(g, np.ones(g.n)))

    def test_double_cumulative_integration_recovers_input(self):
        # f'' integrated twice matches f up to an affine function, to high order
        for n in (401, 801):
            g = uniform_grid(n, 4.0)
            f = np.exp(-g.nodes) * np.cos(2 * g.nodes)
            d2 = second_derivative(RadialField(g, f)).values
            once = cumulative_simpson(d2, x=g.nodes, initial=0.0)
            twice = cumulative_simpson(once, x=g.nodes, initial=0.0)
            resid = f - twice
            a = np.polynomial.polynomial.polyfit(g.nodes, resid, 1)
            err = np.max(np.abs(resid - (a[0] + a[1] * g.nodes)))
            if n == 401:
                err_coarse = err
        assert err_coarse < 1e-7
        assert err < err_coarse / 8  # order >= 3 convergence under h -> h/2
