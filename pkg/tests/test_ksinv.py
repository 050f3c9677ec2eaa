import numpy as np
import pytest

from ksmetrics.errors import ContractViolation
from ksmetrics.grids import RadialField, uniform_grid
from ksmetrics.hooke import HookeSpec, assemble_solution
from ksmetrics.hooke import record as hooke_record
from ksmetrics.helium import HeliumSpec, solve
from ksmetrics.helium import record as helium_record
from ksmetrics.ksinv import (
    invert,
    ks_eigenvalue,
    ks_orbital,
    ks_potential,
    ks_record,
    ks_two_electron,
    round_trip_check,
)
from ksmetrics.states import overlap, pair_quadrature, state_norm


@pytest.fixture(scope="module")
def taut_record():
    return hooke_record(assemble_solution(HookeSpec(0.5)))


@pytest.fixture(scope="module")
def he_record():
    return helium_record(solve(HeliumSpec(2.0, 10)))


class TestOrbital:
    def test_hydrogenic(self):
        z = 2.0
        grid = uniform_grid(2001, 10.0)
        rho = 2.0 * (z**3 / np.pi) * np.exp(-2 * z * grid.nodes)
        phi = ks_orbital(RadialField(grid, rho))
        exact = np.sqrt(z**3 / np.pi) * np.exp(-z * grid.nodes)
        np.testing.assert_allclose(phi.values, exact, rtol=1e-12)

    def test_zero_region_stays_zero(self):
        grid = uniform_grid(1001, 12.0)
        rho = 2.0 * np.pi**-1.5 * np.exp(-(grid.nodes**2))
        rho[grid.nodes > 6.0] = 0.0
        rho /= grid.integrate_d3r(rho) / 2.0
        phi = ks_orbital(RadialField(grid, rho))
        assert np.all(phi.values[grid.nodes > 6.0] == 0.0)

    def test_unit_norm_from_solver_density(self, taut_record):
        phi = ks_orbital(taut_record.density)
        assert phi.grid.integrate_d3r(phi.values**2) == pytest.approx(1.0, abs=1e-8)

    def test_negative_density_rejected(self):
        grid = uniform_grid(101, 5.0)
        rho = np.full(grid.n, 0.1)
        rho[50] = -1e-3
        with pytest.raises(ContractViolation):
            ks_orbital(RadialField(grid, rho))

    def test_unnormalized_density_rejected(self):
        grid = uniform_grid(1001, 10.0)
        rho = np.exp(-grid.nodes)
        with pytest.raises(ContractViolation):
            ks_orbital(RadialField(grid, rho))


class TestEigenvalue:
    def test_taut(self, taut_record):
        assert ks_eigenvalue(taut_record) == pytest.approx(1.25, abs=1e-5)

    def test_helium(self, he_record):
        eps = ks_eigenvalue(he_record)
        assert eps == pytest.approx(he_record.e_total + 2.0, rel=1e-12)
        assert eps == pytest.approx(-0.904, abs=0.005)

    def test_noninteracting_coulomb(self):
        rec = helium_record(solve(HeliumSpec(3.0, 2, lam=0.0)))
        assert ks_eigenvalue(rec) == pytest.approx(-4.5, abs=1e-8)


class TestPotential:
    def test_recovers_coulomb(self):
        z = 2.0
        grid = uniform_grid(4001, 12.0)
        phi = RadialField(grid, np.sqrt(z**3 / np.pi) * np.exp(-z * grid.nodes))
        v, valid_r_max = ks_potential(phi, -0.5 * z**2, tail="coulomb")
        r = grid.nodes
        m = (r >= 0.1) & (r <= valid_r_max)
        np.testing.assert_allclose(v.values[m], -z / r[m], atol=1e-5)

    def test_recovers_harmonic(self):
        omega = 0.5
        grid = uniform_grid(4001, 12.0)
        phi = RadialField(grid, (omega / np.pi) ** 0.75 * np.exp(-0.5 * omega * grid.nodes**2))
        v, valid_r_max = ks_potential(phi, 1.5 * omega, tail="harmonic")
        r = grid.nodes
        m = (r >= 0.1) & (r <= valid_r_max)
        np.testing.assert_allclose(v.values[m], 0.5 * omega**2 * r[m] ** 2, atol=1e-5)

    def test_tail_is_smooth_continuation(self, taut_record):
        ks = invert(taut_record)
        r = ks.v_ks.grid.nodes
        beyond = r > ks.valid_r_max
        if np.any(beyond):
            assert np.all(np.isfinite(ks.v_ks.values[beyond]))
            jump = abs(
                ks.v_ks.values[np.argmax(beyond)] - ks.v_ks.values[np.argmax(beyond) - 1]
            )
            assert jump < 0.05

    def test_floor_everywhere_rejected(self):
        grid = uniform_grid(101, 5.0)
        with pytest.raises(ContractViolation):
            ks_potential(RadialField(grid, np.zeros(grid.n)), -1.0)


class TestRoundTrip:
    def test_interacting_hooke(self, taut_record):
        ks = invert(taut_record, check=False)
        eps, ov = round_trip_check(ks)
        assert eps == pytest.approx(ks.eps_ks, abs=1e-4)
        assert ov > 1 - 1e-6

    def test_interacting_helium(self, he_record):
        ks = invert(he_record, check=False)
        eps, ov = round_trip_check(ks)
        assert eps == pytest.approx(ks.eps_ks, abs=1e-4)
        assert ov > 1 - 1e-6


class TestTwoElectron:
    def test_state_is_scaled_density_product(self, taut_record):
        ks = invert(taut_record)
        grid = ks.density.grid
        idx = np.arange(10, grid.n // 2, 97)
        r = grid.nodes[idx]
        vals = np.array([float(ks.state.value(a, a, 0.5)) for a in r])
        np.testing.assert_allclose(vals, ks.density.values[idx] / np.sqrt(2.0), atol=1e-10)

    def test_state_norm(self, taut_record):
        ks = invert(taut_record)
        assert state_norm(ks.state) == pytest.approx(2.0, abs=1e-6)

    def test_total_energy_doubles_eigenvalue(self, he_record):
        ks = invert(he_record)
        assert ks.e_ks_total == 2.0 * ks.eps_ks

    def test_noninteracting_source_state_identical(self):
        rec = helium_record(solve(HeliumSpec(2.0, 3, lam=0.0)))
        ks = invert(rec)
        quad = pair_quadrature([rec.state, ks.state])
        ov = overlap(rec.state, ks.state, quad)
        # both states normalized to 2, so a vanishing distance means overlap 2
        assert np.sqrt(max(4.0 - 2.0 * abs(ov), 0.0)) < 1e-6


class TestRecordWrap:
    def test_fields(self, he_record):
        ks = invert(he_record)
        rec = ks_record(ks, he_record)
        assert rec.kind == "helium-ks"
        assert rec.lam == 0.0
        assert rec.e_total == ks.e_ks_total
        assert rec.density is he_record.density

    def test_potential_callable_matches_grid(self, he_record):
        ks = invert(he_record)
        r_probe = np.array([0.5, 1.0, ks.valid_r_max * 0.8])
        spline_vals = ks.potential(r_probe)
        grid_vals = np.interp(r_probe, ks.v_ks.grid.nodes, ks.v_ks.values)
        np.testing.assert_allclose(spline_vals, grid_vals, atol=1e-3)

    def test_potential_beyond_grid_uses_tail(self, he_record):
        ks = invert(he_record)
        far = ks.v_ks.grid.r_max * 2.0
        val = float(ks.potential(far))
        assert np.isfinite(val)
        assert abs(val) < abs(float(ks.potential(ks.valid_r_max)))
