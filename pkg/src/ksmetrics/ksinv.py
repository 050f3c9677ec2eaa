"""Reverse-engineering the exact single-particle picture from a density.

Given the ground-state density of a two-electron system, the doubly occupied
orbital is phi = sqrt(rho/2), its eigenvalue is the total-energy difference
to the one-electron remnant, and the potential that makes phi its ground
state follows pointwise from v(r) = eps + (1/2) laplacian(phi)/phi.

Sign convention (deliberate): eps_ks = E(N) - E(N-1). This is the negative
of the usual ionization energy for Coulomb systems (eps_ks < 0 for bound
atoms) and positive for harmonically confined ones; it is the choice under
which the non-interacting identities v_ks = v_ext and eps_ks = single-particle
ground energy hold exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from scipy.interpolate import CubicSpline

from .errors import ContractViolation, NumericalError
from .grids import RadialField, second_derivative
from .numerics import eig_sym_tridiag
from .records import SystemRecord
from .states import ProductState

__all__ = [
    "KsSystem",
    "ks_orbital",
    "ks_eigenvalue",
    "ks_potential",
    "ks_two_electron",
    "invert",
    "round_trip_check",
    "ks_record",
]

# Densities are tabulated with absolute errors near machine epsilon times the
# peak; below this relative level the second derivative of phi is noise and
# the pointwise inversion would manufacture spurious potential wells.
DENSITY_FLOOR = 1e-8


@dataclass(frozen=True)
class KsSystem:
    """The non-interacting system sharing a ground-state density."""

    orbital: RadialField
    eps_ks: float
    v_ks: RadialField
    e_ks_total: float
    state: ProductState
    density: RadialField
    #: last radius where the density sits above the floor; v_ks beyond it is
    #: tail-extrapolated, not differentiated
    valid_r_max: float
    tail: str

    def potential(self, r):
        """v_ks at arbitrary radii: spline on the grid, tail formula beyond."""
        r = np.asarray(r, dtype=float)
        inside = CubicSpline(self.v_ks.grid.nodes, self.v_ks.values)(
            np.clip(r, self.v_ks.grid.nodes[0], self.v_ks.grid.r_max)
        )
        out = np.where(r <= self.v_ks.grid.r_max, inside, _tail_value(self, r))
        return out if out.ndim else float(out)


def _tail_value(system: KsSystem, r):
    a, b = system._tail_coeffs  # type: ignore[attr-defined]
    if system.tail == "coulomb":
        return a + b / np.maximum(r, 1e-300)
    return a + b * r**2


def ks_orbital(density: RadialField) -> RadialField:
    """phi = sqrt(rho/2), with tiny negative samples clamped to zero."""
    rho = np.asarray(density.values, dtype=float)
    floor = -1e-12 * max(np.max(rho), 0.0)
    if np.min(rho) < floor:
        raise ContractViolation(
            f"density has significant negative samples (min {np.min(rho):.3e})"
        )
    total = density.integrate_d3r()
    if abs(total - 2.0) > 1e-6:
        raise ContractViolation(f"density integrates to {total}, expected 2")
    return RadialField(density.grid, np.sqrt(np.maximum(rho, 0.0) / 2.0))


def ks_eigenvalue(system: SystemRecord) -> float:
    """eps_ks = E(N) - E(N-1); see the module note on the sign convention."""
    if system.e_remnant is None:
        raise ContractViolation("system record lacks the one-electron remnant energy")
    return system.e_total - system.e_remnant


def ks_potential(
    orbital: RadialField, eps_ks: float, tail: str = "coulomb"
) -> tuple[RadialField, float]:
    """Pointwise inversion v = eps + (1/2) laplacian(phi)/phi on a uniform grid.

    The radial Laplacian is (1/r)(r phi)'' via 5-point stencils. Where the
    density falls below the noise floor the division is meaningless; those
    radii get a smooth tail instead: a Coulomb form a + b/r or a harmonic
    form a + b r^2, matched by least squares to the outer valid region.
    """
    if tail not in ("coulomb", "harmonic"):
        raise ContractViolation(f"tail must be 'coulomb' or 'harmonic', got {tail!r}")
    grid = orbital.grid
    grid.spacing()  # contract: uniform
    phi = orbital.values
    rho = 2.0 * phi**2
    valid = rho > DENSITY_FLOOR * np.max(rho)
    if not np.any(valid):
        raise ContractViolation("density is below the floor everywhere; nothing to invert")
    last = int(np.max(np.flatnonzero(valid)))
    valid_r_max = float(grid.nodes[last])

    r = grid.nodes
    lap_num = second_derivative(RadialField(grid, r * phi)).values
    v = np.full(grid.n, np.nan)
    inner = valid.copy()
    inner[0] = False  # r = 0 handled by extrapolation below
    v[inner] = eps_ks + 0.5 * lap_num[inner] / (r[inner] * phi[inner])
    # origin: quadratic continuation from the first interior nodes
    v[0] = 3.0 * v[1] - 3.0 * v[2] + v[3]

    # tail fit over the outermost decade of the valid region
    fit_lo = int(np.searchsorted(r, 0.85 * valid_r_max))
    fit_lo = max(1, min(fit_lo, last - 4))
    rs, vs = r[fit_lo : last + 1], v[fit_lo : last + 1]
    if tail == "coulomb":
        design = np.column_stack([np.ones_like(rs), 1.0 / rs])
    else:
        design = np.column_stack([np.ones_like(rs), rs**2])
    coeffs, *_ = np.linalg.lstsq(design, vs, rcond=None)
    beyond = ~valid | np.isnan(v)
    beyond[: last + 1] &= False
    if tail == "coulomb":
        v[beyond] = coeffs[0] + coeffs[1] / r[beyond]
    else:
        v[beyond] = coeffs[0] + coeffs[1] * r[beyond] ** 2

    field = RadialField(grid, v)
    object.__setattr__(field, "_tail_coeffs", tuple(coeffs))
    return field, valid_r_max


def ks_two_electron(
    orbital: RadialField,
    v_ks: RadialField,
    eps_ks: float,
    density: RadialField,
    valid_r_max: float,
    tail: str = "coulomb",
) -> KsSystem:
    """Assemble the two-electron picture: product state and summed potential."""
    system = KsSystem(
        orbital=orbital,
        eps_ks=eps_ks,
        v_ks=v_ks,
        e_ks_total=2.0 * eps_ks,
        state=ProductState(density),
        density=density,
        valid_r_max=valid_r_max,
        tail=tail,
    )
    object.__setattr__(system, "_tail_coeffs", getattr(v_ks, "_tail_coeffs", (0.0, 0.0)))
    return system


def round_trip_check(
    system: KsSystem, eps_tol: float = 1e-4, overlap_tol: float = 1e-6
) -> tuple[float, float]:
    """Re-solve the single-particle problem in the inverted potential.

    Returns (eigenvalue, orbital overlap); raises if the lowest eigenvalue
    strays from eps_ks or the ground orbital from phi.
    """
    grid = system.v_ks.grid
    h = grid.spacing()
    r = grid.nodes[1:-1]
    diag = 1.0 / h**2 + system.v_ks.values[1:-1]
    off = np.full(r.size - 1, -0.5 / h**2)
    vals, vecs = eig_sym_tridiag(diag, off, n_lowest=1)
    eps = float(vals[0])

    u = np.zeros(grid.n)
    u[1:-1] = vecs[:, 0]
    phi_rt = np.zeros(grid.n)
    phi_rt[1:] = u[1:] / grid.nodes[1:]
    phi_rt[0] = phi_rt[1]
    norm = grid.integrate_d3r(phi_rt**2)
    phi_rt /= np.sqrt(norm)
    ov = abs(grid.integrate_d3r(phi_rt * system.orbital.values))

    if abs(eps - system.eps_ks) > eps_tol * max(1.0, abs(system.eps_ks)):
        raise NumericalError(
            f"round-trip eigenvalue {eps} disagrees with eps_ks {system.eps_ks}"
        )
    if ov < 1.0 - overlap_tol:
        raise NumericalError(f"round-trip orbital overlap {ov} below {1 - overlap_tol}")
    return eps, ov


def invert(source: SystemRecord, check: bool = True) -> KsSystem:
    """Full inversion of a solved system's density, with self-consistency check."""
    tail = "harmonic" if source.kind.startswith("hooke") else "coulomb"
    orbital = ks_orbital(source.density)
    eps = ks_eigenvalue(source)
    v_ks, valid_r_max = ks_potential(orbital, eps, tail=tail)
    system = ks_two_electron(orbital, v_ks, eps, source.density, valid_r_max, tail=tail)
    if check:
        round_trip_check(system)
    return system


def ks_record(system: KsSystem, source: SystemRecord) -> SystemRecord:
    """Wrap a KsSystem as a SystemRecord for the distance machinery."""
    return SystemRecord(
        kind=source.kind + "-ks",
        label=source.label + " (ks)",
        params=dict(source.params),
        e_total=system.e_ks_total,
        ionization=system.eps_ks,
        density=system.density,
        state=system.state,
        v_ext=system.potential,
        lam=0.0,
        components=None,
        e_remnant=None,
    )
