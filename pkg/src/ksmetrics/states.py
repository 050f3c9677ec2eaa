"""Evaluatable two-electron s-states and the shared (r1, r2, angle) quadrature.

All states are normalized to the particle number: <psi|psi> = 2. A state is
a real function psi(r1, r2, t) of the two radii and t = cos of the
inter-electron angle; the physical inner product is

    <a|b> = 8 pi^2 int int int a b r1^2 r2^2 dr1 dr2 dt.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.interpolate import CubicSpline, PchipInterpolator

from .errors import ContractViolation
from .grids import RadialField, RadialGrid, geometric_panel_grid
from .numerics import gauss_rule, laguerre_gen, legendre

__all__ = [
    "CorrelatedState",
    "HookeState",
    "HeliumState",
    "ProductState",
    "PairQuadrature",
    "pair_quadrature",
    "overlap",
    "state_norm",
]


class CorrelatedState:
    """Interface of an evaluatable singlet two-electron spatial state."""

    #: radius beyond which the state is negligible (guides quadrature builds)
    r_extent: float
    #: smallest radial feature scale (guides quadrature grading)
    r_scale: float

    def value(self, r1, r2, t) -> NDArray[np.float64]:
        """psi(r1, r2, t) with numpy broadcasting over the arguments."""
        raise NotImplementedError

    def value_grid(self, r1, r2, t) -> NDArray[np.float64]:
        """psi on the tensor grid r1 x r2 x t, shape (n1, n2, nt)."""
        return self.value(
            np.asarray(r1)[:, None, None], np.asarray(r2)[None, :, None], np.asarray(t)[None, None, :]
        )


class HookeState(CorrelatedState):
    """Harmonically confined pair: psi = Phi_cm(R) * chi(u)/u, u = |r1 - r2|."""

    def __init__(self, omega: float, u_grid: NDArray[np.float64], chi: NDArray[np.float64]):
        if omega <= 0:
            raise ContractViolation("omega must be positive")
        self.omega = float(omega)
        self.u_max = float(u_grid[-1])
        # chi/u is regular at u=0 (chi ~ u); take the limit from the first interior node
        ratio = np.empty_like(chi)
        nz = u_grid > 0
        ratio[nz] = chi[nz] / u_grid[nz]
        if not nz[0]:
            ratio[0] = chi[1] / u_grid[1] if u_grid.size > 1 else 0.0
        self._rel = CubicSpline(u_grid, ratio, bc_type="natural")
        self._cm_norm = (2.0 * omega / np.pi) ** 0.75
        # overall factor for <psi|psi> = 2 given unit-normalized chi and Phi_cm
        self._amp = 1.0 / np.sqrt(2.0 * np.pi)
        sigma = 1.0 / np.sqrt(omega)
        self.r_scale = sigma
        self.r_extent = self.u_max / 2.0

    def _rel_part(self, u):
        out = np.where(u < self.u_max, self._rel(np.minimum(u, self.u_max)), 0.0)
        return out

    def value(self, r1, r2, t):
        r1 = np.asarray(r1, dtype=float)
        r2 = np.asarray(r2, dtype=float)
        t = np.asarray(t, dtype=float)
        rr = 2.0 * r1 * r2 * t
        u = np.sqrt(np.maximum(r1 * r1 + r2 * r2 - rr, 0.0))
        r_cm_sq = 0.25 * np.maximum(r1 * r1 + r2 * r2 + rr, 0.0)
        cm = self._cm_norm * np.exp(-self.omega * r_cm_sq)
        return self._amp * cm * self._rel_part(u)


# radial/angular factors of the ion basis are shared with the solver module
def ion_radial_basis(z: float, orders, r) -> NDArray[np.float64]:
    """Orthonormal radial factors: sqrt((2z)^3/((i+1)(i+2))) e^(-z r) L_i^(2)(2 z r).

    Returns array of shape r.shape + (len(orders),).
    """
    r = np.asarray(r, dtype=float)
    x = 2.0 * z * r
    out = np.empty(r.shape + (len(orders),))
    for col, i in enumerate(orders):
        norm = np.sqrt((2.0 * z) ** 3 / ((i + 1) * (i + 2)))
        out[..., col] = norm * np.exp(-0.5 * x) * laguerre_gen(i, 2, x)
    return out


def angular_basis(orders, t) -> NDArray[np.float64]:
    """Orthonormal angular factors sqrt((2k+1)/2) P_k(t), shape t.shape + (len(orders),)."""
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape + (len(orders),))
    for col, k in enumerate(orders):
        out[..., col] = np.sqrt((2 * k + 1) / 2.0) * legendre(k, t)
    return out


class HeliumState(CorrelatedState):
    """Expansion state of a two-electron ion over the Laguerre x Legendre basis."""

    def __init__(self, z: float, coeff_cube: NDArray[np.float64]):
        if z <= 0:
            raise ContractViolation("nuclear charge must be positive")
        self.z = float(z)
        cube = np.asarray(coeff_cube, dtype=float)
        if cube.ndim != 3:
            raise ContractViolation("coefficient cube must be 3-dimensional (i, j, k)")
        norm = np.sqrt(np.sum(cube**2))
        if abs(norm - 1.0) > 1e-8:
            raise ContractViolation(f"coefficient cube norm {norm} != 1")
        self.cube = cube
        self._amp = np.sqrt(2.0 / (8.0 * np.pi**2))
        n_rad = max(cube.shape[0], cube.shape[1])
        deg = n_rad - 1 + 2  # polynomial degree + exponential tail margin
        self.r_scale = 1.0 / (2.0 * z)
        self.r_extent = (22.0 + 5.0 * deg) / (2.0 * z)

    def value(self, r1, r2, t):
        r1, r2, t = np.broadcast_arrays(
            np.asarray(r1, dtype=float), np.asarray(r2, dtype=float), np.asarray(t, dtype=float)
        )
        ni, nj, nk = self.cube.shape
        b1 = ion_radial_basis(self.z, range(ni), r1)
        b2 = ion_radial_basis(self.z, range(nj), r2)
        bt = angular_basis(range(nk), t)
        return self._amp * np.einsum("...i,...j,...k,ijk->...", b1, b2, bt, self.cube, optimize=True)

    def value_grid(self, r1, r2, t):
        ni, nj, nk = self.cube.shape
        b1 = ion_radial_basis(self.z, range(ni), np.asarray(r1, dtype=float))
        b2 = ion_radial_basis(self.z, range(nj), np.asarray(r2, dtype=float))
        bt = angular_basis(range(nk), np.asarray(t, dtype=float))
        return self._amp * np.einsum("ai,bj,ck,ijk->abc", b1, b2, bt, self.cube, optimize=True)


class ProductState(CorrelatedState):
    """Non-interacting pair sharing one orbital: psi = sqrt(2) phi(r1) phi(r2).

    phi = sqrt(rho/2) is the doubly occupied orbital; the sqrt(2) prefactor
    keeps the state on the <psi|psi> = 2 convention.
    """

    def __init__(self, density: RadialField):
        rho = np.maximum(density.values, 0.0)
        self._sqrt_half_rho = PchipInterpolator(
            density.grid.nodes, np.sqrt(0.5 * rho), extrapolate=False
        )
        self._r_max = density.grid.r_max
        peak = density.values.max()
        above = density.grid.nodes[density.values > 1e-3 * peak]
        self.r_scale = float(above[-1] - above[0]) / 6.0 if above.size > 1 else self._r_max / 20.0
        self.r_scale = max(self.r_scale, density.grid.nodes[1] if density.grid.nodes[0] == 0 else density.grid.nodes[0])
        self.r_extent = self._r_max

    def orbital(self, r):
        """The unit-normalized orbital phi = sqrt(rho/2)."""
        r = np.asarray(r, dtype=float)
        out = self._sqrt_half_rho(np.clip(r, None, self._r_max))
        return np.nan_to_num(out, nan=0.0)

    def value(self, r1, r2, t):
        val = np.sqrt(2.0) * self.orbital(r1) * self.orbital(r2)
        # broadcast against t so output shapes match the interface
        return val * np.ones_like(np.asarray(t, dtype=float))

    def value_grid(self, r1, r2, t):
        o1 = self.orbital(np.asarray(r1, dtype=float))
        o2 = self.orbital(np.asarray(r2, dtype=float))
        nt = np.asarray(t).size
        return np.repeat((np.sqrt(2.0) * o1[:, None] * o2[None, :])[:, :, None], nt, axis=2)


@dataclass(frozen=True)
class PairQuadrature:
    """Tensor quadrature over (r1, r2, t) for two-electron matrix elements."""

    radial: RadialGrid
    t_nodes: NDArray[np.float64]
    t_weights: NDArray[np.float64]

    def integrate(self, values_grid: NDArray[np.float64]) -> float:
        """8 pi^2 int f r1^2 r2^2 dr1 dr2 dt of tabulated f(r1, r2, t)."""
        wr = self.radial.weights * self.radial.nodes**2
        return float(8.0 * np.pi**2 * np.einsum("a,b,c,abc->", wr, wr, self.t_weights, values_grid))

    def state_values(self, state: CorrelatedState) -> NDArray[np.float64]:
        return state.value_grid(self.radial.nodes, self.radial.nodes, self.t_nodes)


def _t_panels(points: int = 20):
    """Panels on [-1, 1], refined toward t=1 where |r1-r2| vanishes."""
    edges = [-1.0, 0.0, 0.7, 0.92, 0.99, 1.0]
    rule = gauss_rule("legendre", points)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        nodes.append(0.5 * (a + b) + half * rule.nodes)
        weights.append(half * rule.weights)
    return np.concatenate(nodes), np.concatenate(weights)


def pair_quadrature(
    states,
    points_per_panel: int = 12,
    panels_per_decade: int = 5,
    t_points: int = 20,
) -> PairQuadrature:
    """Build a quadrature resolving every state in `states`."""
    if not states:
        raise ContractViolation("need at least one state")
    extent = max(s.r_extent for s in states)
    scale = min(s.r_scale for s in states)
    radial = geometric_panel_grid(
        scale / 6.0, extent, points_per_panel=points_per_panel, panels_per_decade=panels_per_decade
    )
    t_nodes, t_weights = _t_panels(t_points)
    return PairQuadrature(radial, t_nodes, t_weights)


def overlap(a: CorrelatedState, b: CorrelatedState, quad: PairQuadrature | None = None) -> float:
    if quad is None:
        quad = pair_quadrature([a, b])
    return quad.integrate(quad.state_values(a) * quad.state_values(b))


def state_norm(state: CorrelatedState, quad: PairQuadrature | None = None) -> float:
    """<psi|psi>; should equal 2 for every state produced by this package."""
    if quad is None:
        quad = pair_quadrature([state])
    vals = quad.state_values(state)
    return quad.integrate(vals * vals)
