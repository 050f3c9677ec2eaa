"""Radial grids and tabulated radial fields.

A RadialGrid couples nodes with quadrature weights so that every consumer
integrates the same way. Uniform grids carry composite-Simpson weights
(O(h^4)); panel grids carry Gauss-Legendre weights per panel; half-line
grids carry generalized Gauss-Laguerre weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import ContractViolation
from .numerics import gauss_rule, stencil_second_derivative

__all__ = [
    "RadialGrid",
    "RadialField",
    "uniform_grid",
    "panel_grid",
    "geometric_panel_grid",
    "second_derivative",
]


@dataclass(frozen=True)
class RadialGrid:
    """Strictly increasing radial nodes (bohr) with quadrature weights."""

    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]
    kind: str

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ContractViolation("nodes and weights must be 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0) or nodes[0] < 0:
            raise ContractViolation("grid nodes must be non-negative and strictly increasing")
        if np.any(weights <= 0):
            raise ContractViolation("quadrature weights must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    def spacing(self) -> float:
        """Uniform spacing; raises for non-uniform grids."""
        d = np.diff(self.nodes)
        h = d[0]
        if np.max(np.abs(d - h)) > 1e-9 * h:
            raise ContractViolation(f"grid of kind {self.kind!r} is not uniform")
        return float(h)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    def integrate_d3r(self, values) -> float:
        """4 pi * integral of values(r) r^2 dr over the grid."""
        return float(4.0 * np.pi * np.dot(self.weights, values * self.nodes**2))


@dataclass(frozen=True)
class RadialField:
    """Real samples of a radial function on a fixed grid.

    Units are context dependent (density bohr^-3, potential hartree).
    """

    grid: RadialGrid
    values: NDArray[np.float64]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise ContractViolation("field values must match grid shape")
        if not np.all(np.isfinite(values)):
            raise ContractViolation("field values must be finite at every node")
        object.__setattr__(self, "values", values)

    @property
    def r(self) -> NDArray[np.float64]:
        return self.grid.nodes

    def integrate_dr(self) -> float:
        return self.grid.integrate(self.values)

    def integrate_d3r(self) -> float:
        return self.grid.integrate_d3r(self.values)


def _simpson_weights(n: int, h: float) -> NDArray[np.float64]:
    """Composite Simpson weights for n nodes spaced h; 3/8 tail if intervals are odd."""
    if n < 4:
        raise ContractViolation("uniform grid needs at least 4 nodes")
    w = np.zeros(n)
    intervals = n - 1
    if intervals % 2 == 0:
        w[0] = w[-1] = 1.0
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        w *= h / 3.0
    elif n == 4:
        w = np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    else:
        # Simpson over the first n-3 nodes, 3/8 rule over the last 3 intervals.
        m = n - 3
        w[0] = w[m - 1] = 1.0
        w[1:m - 1:2] = 4.0
        w[2:m - 1:2] = 2.0
        w *= h / 3.0
        w[m - 1:] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    return w


def uniform_grid(n: int, r_max: float) -> RadialGrid:
    """Uniform grid on [0, r_max] with composite Simpson weights."""
    if r_max <= 0:
        raise ContractViolation("r_max must be positive")
    nodes = np.linspace(0.0, r_max, n)
    h = nodes[1] - nodes[0]
    return RadialGrid(nodes, _simpson_weights(n, h), "uniform")


def panel_grid(edges, points_per_panel: int = 12) -> RadialGrid:
    """Composite Gauss-Legendre grid over contiguous panels given by edges."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ContractViolation("panel edges must be strictly increasing")
    base = gauss_rule("legendre", points_per_panel)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        half = 0.5 * (b - a)
        nodes.append(0.5 * (a + b) + half * base.nodes)
        weights.append(half * base.weights)
    return RadialGrid(np.concatenate(nodes), np.concatenate(weights), "gauss-legendre-panel")


def geometric_panel_grid(
    scale_min: float,
    r_max: float,
    points_per_panel: int = 12,
    panels_per_decade: int = 4,
) -> RadialGrid:
    """Panel grid graded geometrically from a smallest resolved scale to r_max.

    Suited to integrands whose features live on widely different length
    scales (e.g. densities of ions with very different nuclear charge).
    """
    if not (0 < scale_min < r_max):
        raise ContractViolation("need 0 < scale_min < r_max")
    decades = np.log10(r_max / scale_min)
    n_panels = max(2, int(np.ceil(decades * panels_per_decade)))
    edges = np.concatenate(
        ([0.0], np.geomspace(scale_min, r_max, n_panels + 1))
    )
    return panel_grid(edges, points_per_panel)


def second_derivative(field: RadialField) -> RadialField:
    """Second derivative of a field on a uniform grid (5-point stencils, O(h^4) interior)."""
    h = field.grid.spacing()
    if field.grid.n < 5:
        raise ContractViolation("second derivative needs >= 5 nodes")
    return RadialField(field.grid, stencil_second_derivative(field.values, h))
