"""Two electrons in an isotropic harmonic trap with Coulomb repulsion.

The Hamiltonian separates in center-of-mass and relative coordinates
(R = (r1+r2)/2, u = r1-r2). The center-of-mass part is an oscillator with
analytic ground energy 1.5*omega; the relative s-wave problem

    -chi'' + (omega^2 u^2 / 4 + lam / u) chi = eps chi,  chi(0) = chi(u_max) = 0

is solved by finite differences. The ionization energy equals the relative
motion energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ContractViolation, DomainTooSmallError, NumericalError, QuadratureResolutionError
from .grids import RadialField, RadialGrid, uniform_grid
from .numerics import eig_sym_tridiag
from .records import SystemRecord
from .states import HookeState

__all__ = [
    "HookeSpec",
    "HookeSolution",
    "solve_relative",
    "assemble_solution",
    "compute_density",
]


@dataclass(frozen=True)
class HookeSpec:
    """Confinement frequency and interaction dial (lam=0 gives two free oscillators)."""

    omega: float
    lam: float = 1.0

    def __post_init__(self):
        if self.omega <= 0:
            raise ContractViolation(f"omega must be positive, got {self.omega}")
        if not 0.0 <= self.lam <= 1.0:
            raise ContractViolation(f"lam must lie in [0, 1], got {self.lam}")


@dataclass(frozen=True)
class HookeSolution:
    spec: HookeSpec
    eps_rel: float
    e_com: float
    e_total: float
    ionization: float
    rel_orbital: RadialField
    state: HookeState
    density: Optional[RadialField] = None
    components: Optional[tuple[float, float, float]] = None


def default_u_max(omega: float) -> float:
    """Gaussian tail scale 1/sqrt(omega) plus margin for the Coulomb shift."""
    return max(6.0, 12.0 / math.sqrt(omega) + 10.0 * omega**-0.25)


def _default_grid_n(omega: float, u_max: float) -> int:
    # keep the h^2 eigenvalue error below ~1e-7 relative; the curvature of
    # chi grows like omega, so the step must shrink like 1/sqrt(omega)
    h = min(8e-4, 0.0028 / math.sqrt(omega))
    return max(512, int(math.ceil(u_max / h)))


def _fd_lowest(omega: float, lam: float, u_max: float, n: int):
    h = u_max / n
    u = h * np.arange(1, n)
    diag = 2.0 / h**2 + 0.25 * omega**2 * u**2 + lam / u
    off = np.full(n - 2, -1.0 / h**2)
    vals, vecs = eig_sym_tridiag(diag, off, n_lowest=1)
    return float(vals[0]), u, vecs[:, 0]


def solve_relative(
    spec: HookeSpec, grid_n: int | None = None, u_max: float | None = None
) -> tuple[float, RadialField]:
    """Lowest relative-motion eigenpair; refuses if halving h moves the eigenvalue."""
    if u_max is None:
        u_max = default_u_max(spec.omega)
    if grid_n is None:
        grid_n = _default_grid_n(spec.omega, u_max)
    if grid_n < 512:
        raise ContractViolation(f"grid_n must be >= 512, got {grid_n}")

    eps_coarse, _, _ = _fd_lowest(spec.omega, spec.lam, u_max, grid_n)
    eps, u_int, chi_int = _fd_lowest(spec.omega, spec.lam, u_max, 2 * grid_n)
    if abs(eps - eps_coarse) > 1e-6 * max(abs(eps), 1e-12):
        raise NumericalError(
            f"relative-motion eigenvalue not grid-converged: {eps_coarse} -> {eps} "
            f"(n={grid_n} -> {2 * grid_n})"
        )

    peak = np.max(np.abs(chi_int))
    if abs(chi_int[-1]) > 1e-8 * peak:
        raise DomainTooSmallError(
            f"relative orbital leaks into the boundary at u_max={u_max} "
            f"(amplitude ratio {abs(chi_int[-1]) / peak:.2e})"
        )

    grid = uniform_grid(2 * grid_n + 1, u_max)
    chi = np.zeros(grid.n)
    chi[1:-1] = chi_int
    chi /= math.sqrt(grid.integrate(chi**2))
    if chi[np.argmax(np.abs(chi))] < 0:
        chi = -chi
    return eps, RadialField(grid, chi)


def assemble_solution(
    spec: HookeSpec,
    grid_n: int | None = None,
    u_max: float | None = None,
    density_grid: RadialGrid | None = None,
    with_density: bool = True,
) -> HookeSolution:
    """Solve the relative problem and assemble energies, state, density, components."""
    eps_rel, rel_orbital = solve_relative(spec, grid_n=grid_n, u_max=u_max)
    e_com = 1.5 * spec.omega
    e_total = eps_rel + e_com
    state = HookeState(spec.omega, rel_orbital.grid.nodes, rel_orbital.values)

    # expectation values from the separated form: <V_cm> = E_cm/2 by the virial
    # theorem, the relative pieces by quadrature over chi
    u = rel_orbital.grid.nodes
    chi_sq = rel_orbital.values**2
    v_rel = rel_orbital.grid.integrate(0.25 * spec.omega**2 * u**2 * chi_sq)
    inv_u = np.zeros_like(u)
    np.divide(chi_sq, u, out=inv_u, where=u > 0)
    u_rep = spec.lam * rel_orbital.grid.integrate(inv_u)
    v_ext = 0.75 * spec.omega + v_rel
    kinetic = e_total - u_rep - v_ext
    solution = HookeSolution(
        spec=spec,
        eps_rel=eps_rel,
        e_com=e_com,
        e_total=e_total,
        ionization=eps_rel,
        rel_orbital=rel_orbital,
        state=state,
        components=(kinetic, u_rep, v_ext),
    )
    if with_density:
        if density_grid is None:
            r_max = 0.52 * rel_orbital.grid.r_max
            # resolve the orbital scale 1/sqrt(omega) well enough that a
            # later single-particle eigensolve on this grid is h^2-accurate
            n = max(1601, int(math.ceil(r_max * math.sqrt(spec.omega) / 0.03)))
            density_grid = uniform_grid(n, r_max)
        density = compute_density(solution, density_grid)
        solution = HookeSolution(
            **{**solution.__dict__, "density": density}
        )
    return solution


def compute_density(solution: HookeSolution, r_grid: RadialGrid) -> RadialField:
    """rho(r1) = 2 pi int int |psi(r1, r2, t)|^2 r2^2 dr2 dt on a uniform grid."""
    r_grid.spacing()  # contract: uniform grid
    state = solution.state
    u_max = solution.rel_orbital.grid.r_max

    # panel Gauss-Legendre in r2, refined panels in t toward the coalescence point
    from .states import _t_panels
    from .grids import geometric_panel_grid

    r2_grid = geometric_panel_grid(state.r_scale / 8.0, 0.55 * u_max, points_per_panel=14)
    t_nodes, t_weights = _t_panels(20)

    rho = np.empty(r_grid.n)
    w2 = r2_grid.weights * r2_grid.nodes**2
    chunk = 128
    for lo in range(0, r_grid.n, chunk):
        r1 = r_grid.nodes[lo : lo + chunk]
        psi = state.value_grid(r1, r2_grid.nodes, t_nodes)
        rho[lo : lo + chunk] = 2.0 * np.pi * np.einsum("abc,b,c->a", psi * psi, w2, t_weights)

    field = RadialField(r_grid, rho)
    miss = abs(field.integrate_d3r() - 2.0)
    if miss > 1e-6:
        raise QuadratureResolutionError(f"density normalization miss {miss:.2e} exceeds 1e-6")
    return field


def record(solution: HookeSolution, label: str | None = None) -> SystemRecord:
    if solution.density is None:
        raise ContractViolation("solution has no density; assemble with with_density=True")
    spec = solution.spec
    return SystemRecord(
        kind="hooke",
        label=label or f"hooke omega={spec.omega:g}",
        params={"omega": spec.omega, "lambda": spec.lam},
        e_total=solution.e_total,
        ionization=solution.ionization,
        density=solution.density,
        state=solution.state,
        v_ext=lambda r: 0.5 * spec.omega**2 * np.asarray(r, dtype=float) ** 2,
        lam=spec.lam,
        components=solution.components,
        e_remnant=solution.e_com,
    )
