"""Variational ground states of two-electron ions with nuclear charge z.

The trial space is spanned by products R_i(r1) R_j(r2) P_k(cos theta12) of
orthonormal Laguerre-type radial factors (fixed exponent e^{-z r}) and
Legendre angular factors, truncated at i + j + k <= omega_basis and
symmetrized under electron exchange. All radial one-body integrals reduce,
after x = 2 z r, to Gauss-Laguerre quadratures with weight x^alpha e^{-x},
alpha in {0, 1, 2}; the electron repulsion uses the terminating multipole
expansion of 1/r12 with its split radial integrals done on Gauss-Legendre
panels.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from numpy.typing import NDArray

from .errors import ContractViolation, NumericalError, QuadratureResolutionError
from .grids import RadialField, RadialGrid, uniform_grid
from .numerics import eig_sym_dense, gauss_rule, legendre
from .records import SystemRecord
from .states import HeliumState, ion_radial_basis

__all__ = [
    "HeliumSpec",
    "HeliumSolution",
    "build_hamiltonian",
    "build_matrices",
    "solve",
    "compute_density",
    "record",
]

OMEGA_CAP = 20
#: minimum basis cutoff for weakly bound anion-like systems (z <= 1)
OMEGA_MIN_ANION = 10


@dataclass(frozen=True)
class HeliumSpec:
    """Nuclear charge, basis cutoff (i+j+k <= omega_basis), interaction dial."""

    z: float
    omega_basis: int
    lam: float = 1.0

    def __post_init__(self):
        if self.z <= 0:
            raise ContractViolation(f"nuclear charge must be positive, got {self.z}")
        if self.omega_basis < 0:
            raise ContractViolation(f"omega_basis must be >= 0, got {self.omega_basis}")
        if self.omega_basis > OMEGA_CAP:
            raise ContractViolation(
                f"omega_basis capped at {OMEGA_CAP}, got {self.omega_basis}"
            )
        if not 0.0 <= self.lam <= 1.0:
            raise ContractViolation(f"lam must lie in [0, 1], got {self.lam}")


@dataclass(frozen=True)
class HeliumSolution:
    spec: HeliumSpec
    coeffs: NDArray[np.float64]
    coeff_cube: NDArray[np.float64]
    e_total: float
    ionization: float
    state: HeliumState
    components: tuple[float, float, float]
    density: Optional[RadialField] = None


# --------------------------------------------------------------------------
# basis bookkeeping


def _full_index_set(omega: int):
    """All (i, j, k) with i + j + k <= omega, lexicographic order."""
    idx = [
        (i, j, k)
        for i in range(omega + 1)
        for j in range(omega + 1 - i)
        for k in range(omega + 1 - i - j)
    ]
    return np.array(idx, dtype=int).reshape(-1, 3)


def _sym_index_set(omega: int):
    """Exchange-symmetrized labels: i <= j sector of the full set."""
    full = _full_index_set(omega)
    return full[full[:, 0] <= full[:, 1]]


def _projection(omega: int):
    """Rows map symmetrized labels onto the full product basis (orthonormal rows)."""
    full = _full_index_set(omega)
    sym = _sym_index_set(omega)
    pos = {tuple(row): n for n, row in enumerate(full)}
    proj = np.zeros((len(sym), len(full)))
    inv_rt2 = 1.0 / math.sqrt(2.0)
    for a, (i, j, k) in enumerate(sym):
        if i == j:
            proj[a, pos[(i, j, k)]] = 1.0
        else:
            proj[a, pos[(i, j, k)]] = inv_rt2
            proj[a, pos[(j, i, k)]] = inv_rt2
    return full, sym, proj


# --------------------------------------------------------------------------
# special-function tables


def _laguerre_table(alpha: int, n_max: int, x: NDArray[np.float64]):
    """L_n^(alpha)(x) for n = 0..n_max, shape x.shape + (n_max+1,)."""
    out = np.empty(x.shape + (n_max + 1,))
    out[..., 0] = 1.0
    if n_max >= 1:
        out[..., 1] = 1.0 + alpha - x
    for n in range(1, n_max):
        out[..., n + 1] = (
            (2 * n + 1 + alpha - x) * out[..., n] - (n + alpha) * out[..., n - 1]
        ) / (n + 1)
    return out


def _legendre_table(n_max: int, t: NDArray[np.float64]):
    out = np.empty(t.shape + (n_max + 1,))
    out[..., 0] = 1.0
    if n_max >= 1:
        out[..., 1] = t
    for n in range(1, n_max):
        out[..., n + 1] = ((2 * n + 1) * t * out[..., n] - n * out[..., n - 1]) / (n + 1)
    return out


def _mu(omega: int):
    """Per-order normalization 1/sqrt((i+1)(i+2)) of the radial factors."""
    i = np.arange(omega + 1)
    return 1.0 / np.sqrt((i + 1.0) * (i + 2.0))


def _checked_rule(alpha: int, n: int, omega: int):
    """Gauss-Laguerre rule with a highest-moment exactness check."""
    rule = gauss_rule("laguerre", n, alpha=alpha)
    m = 2 * omega + 2  # top monomial degree appearing in any one-body integrand
    got = rule.integrate(rule.nodes**m)
    want = math.gamma(alpha + m + 1)
    if abs(got - want) > 1e-10 * want:
        raise NumericalError(
            f"{n}-point alpha={alpha} rule misses moment {m}: {got} vs {want}"
        )
    return rule


# --------------------------------------------------------------------------
# one-body radial integrals (dimensionless x-space; physical scaling applied
# at assembly: kinetic/centrifugal carry (2z)^2/..., attraction carries 2z)


@lru_cache(maxsize=8)
def _one_body_tables(omega: int):
    """Overlap, kinetic, attraction, centrifugal x-space matrices over orders 0..omega."""
    n = 2 * omega + 16
    mu = _mu(omega)

    r2 = _checked_rule(2, n, omega)
    lag = _laguerre_table(2, omega, r2.nodes)
    overlap = np.einsum("xa,xb,x->ab", lag, lag, r2.weights)
    overlap *= np.outer(mu, mu)
    if np.max(np.abs(overlap - np.eye(omega + 1))) > 1e-9:
        raise ContractViolation(
            "radial overlap deviates from identity: normalization constants are off"
        )

    # d/dx factors: (L_n^(2))' = -L_{n-1}^(3); kinetic integrand (L' - L/2)^2 x^2 e^-x
    dlag = np.zeros_like(lag)
    if omega >= 1:
        dlag[:, 1:] = -_laguerre_table(3, omega - 1, r2.nodes)
    kin_factor = dlag - 0.5 * lag
    kinetic = 0.5 * np.einsum("xa,xb,x->ab", kin_factor, kin_factor, r2.weights)
    kinetic *= np.outer(mu, mu)

    r1 = _checked_rule(1, n, omega)
    lag1 = _laguerre_table(2, omega, r1.nodes)
    attraction = np.einsum("xa,xb,x->ab", lag1, lag1, r1.weights) * np.outer(mu, mu)

    r0 = _checked_rule(0, n, omega)
    lag0 = _laguerre_table(2, omega, r0.nodes)
    centrifugal = np.einsum("xa,xb,x->ab", lag0, lag0, r0.weights) * np.outer(mu, mu)

    return overlap, kinetic, attraction, centrifugal


# --------------------------------------------------------------------------
# multipole repulsion: angular couplings and split radial integrals


@lru_cache(maxsize=8)
def _angular_couplings(omega: int):
    """G[k, k', l] = int Theta_k Theta_k' P_l dt, exact Gauss-Legendre."""
    n = 2 * omega + 1  # exact through degree 4*omega + 1
    rule = gauss_rule("legendre", n)
    ptab = _legendre_table(2 * omega, rule.nodes)
    theta = ptab[:, : omega + 1] * np.sqrt((2 * np.arange(omega + 1) + 1) / 2.0)
    return np.einsum("xk,xK,xl,x->kKl", theta, theta, ptab, rule.weights)


@lru_cache(maxsize=4)
def _repulsion_radial(omega: int, n_panel: int = 32, n_inner: int = 24):
    """Split radial integrals of the multipole kernel over radial pair products.

    For every unordered order pair q = (a, b) let f_q(x) = e^{-x} L_a L_b x^2.
    Returns (pair_of, tensor) with tensor[l, p, q] =
    int int f_p(x1) f_q(x2) min(x1,x2)^l / max(x1,x2)^{l+1} dx1 dx2,
    computed on width-4 Gauss-Legendre panels; the inner (cumulative) pieces
    use dedicated sub-rules from each node to its panel edges so the kernel's
    kink at x1 = x2 never crosses a quadrature cell.
    """
    x_max = max(120.0, 40.0 + 6.0 * omega)
    n_panels = int(math.ceil(x_max / 4.0))
    edges = 4.0 * np.arange(n_panels + 1)

    base = gauss_rule("legendre", n_panel)
    half = 0.5 * np.diff(edges)
    x = (edges[:-1, None] + half[:, None] * (1.0 + base.nodes[None, :])).ravel()
    w = (half[:, None] * base.weights[None, :]).ravel()
    panel_of = np.repeat(np.arange(n_panels), n_panel)
    n_nodes = x.size

    orders = omega + 1
    pairs = [(a, b) for a in range(orders) for b in range(a, orders)]
    pair_of = np.empty((orders, orders), dtype=int)
    for q, (a, b) in enumerate(pairs):
        pair_of[a, b] = pair_of[b, a] = q

    def pair_values(points):
        lag = _laguerre_table(2, omega, points)
        out = np.empty(points.shape + (len(pairs),))
        damp = np.exp(-points) * points**2
        for q, (a, b) in enumerate(pairs):
            out[..., q] = lag[..., a] * lag[..., b] * damp
        return out

    f = pair_values(x)  # (n_nodes, n_pairs)
    wf = w[:, None] * f

    inner = gauss_rule("legendre", n_inner)
    left_lo = edges[panel_of]
    left_half = 0.5 * (x - left_lo)
    y_left = left_lo[:, None] + left_half[:, None] * (1.0 + inner.nodes[None, :])
    wf_left = (left_half[:, None] * inner.weights[None, :])[:, :, None] * pair_values(y_left)

    right_hi = edges[panel_of + 1]
    right_half = 0.5 * (right_hi - x)
    y_right = x[:, None] + right_half[:, None] * (1.0 + inner.nodes[None, :])
    wf_right = (right_half[:, None] * inner.weights[None, :])[:, :, None] * pair_values(y_right)

    inv_x = 1.0 / x
    inv_y_right = 1.0 / y_right
    pow_x = np.ones(n_nodes)  # x^l
    pow_inv_x = inv_x.copy()  # x^-(l+1)
    pow_left = np.ones_like(y_left)  # y^l
    pow_right = inv_y_right.copy()  # y^-(l+1)

    n_l = 2 * omega + 1
    tensor = np.empty((n_l, len(pairs), len(pairs)))
    for l in range(n_l):
        # panel-resolved moments feed exclusive prefix/suffix sums so only
        # strictly earlier/later panels enter; the home panel is covered by
        # the node-anchored inner rules
        mom_lo = np.zeros((n_panels + 1, len(pairs)))
        np.add.at(mom_lo, panel_of + 1, wf * pow_x[:, None])
        prefix = np.cumsum(mom_lo, axis=0)[panel_of]

        mom_hi = np.zeros((n_panels + 1, len(pairs)))
        np.add.at(mom_hi, panel_of, wf * pow_inv_x[:, None])
        suffix = np.cumsum(mom_hi[::-1], axis=0)[::-1][panel_of + 1]

        below = prefix + np.einsum("msq,ms->mq", wf_left, pow_left)
        above = suffix + np.einsum("msq,ms->mq", wf_right, pow_right)
        kernel = pow_inv_x[:, None] * below + pow_x[:, None] * above
        tensor[l] = wf.T @ kernel

        pow_x *= x
        pow_inv_x *= inv_x
        pow_left *= y_left
        pow_right *= inv_y_right

    return pair_of, tensor


# --------------------------------------------------------------------------
# assembly and solve


def build_matrices(spec: HeliumSpec):
    """Projected (symmetrized-basis) kinetic, external, and repulsion matrices."""
    omega, z = spec.omega_basis, spec.z
    full, sym, proj = _projection(omega)
    i1, j1, k1 = full.T
    same_i = i1[:, None] == i1[None, :]
    same_j = j1[:, None] == j1[None, :]
    same_k = k1[:, None] == k1[None, :]

    _, kin_x, att_x, cen_x = _one_body_tables(omega)
    scale2 = (2.0 * z) ** 2

    kin = scale2 * kin_x
    cen = scale2 * cen_x
    att = 2.0 * z * att_x

    ang = np.where(same_k, 0.5 * (k1 * (k1 + 1.0))[:, None], 0.0)
    t_full = np.where(same_k, same_j * kin[np.ix_(i1, i1)] + same_i * kin[np.ix_(j1, j1)], 0.0)
    t_full += ang * (same_j * cen[np.ix_(i1, i1)] + same_i * cen[np.ix_(j1, j1)])
    v_full = -z * np.where(
        same_k, same_j * att[np.ix_(i1, i1)] + same_i * att[np.ix_(j1, j1)], 0.0
    )

    pair_of, radial = _repulsion_radial(omega)
    mu = _mu(omega)
    pair_mu = np.array([mu[a] * mu[b] for a in range(omega + 1) for b in range(a, omega + 1)])
    couplings = _angular_couplings(omega)

    pi = pair_of[np.ix_(i1, i1)]
    pj = pair_of[np.ix_(j1, j1)]
    u_full = np.zeros_like(t_full)
    for l in range(2 * omega + 1):
        g_l = couplings[:, :, l][np.ix_(k1, k1)]
        if not np.any(g_l):
            continue
        w_l = 2.0 * z * np.outer(pair_mu, pair_mu) * radial[l]
        u_full += g_l * w_l[pi, pj]

    return {
        "kinetic": proj @ t_full @ proj.T,
        "external": proj @ v_full @ proj.T,
        "repulsion": proj @ u_full @ proj.T,
        "labels": sym,
        "projection": proj,
    }


def build_hamiltonian(spec: HeliumSpec):
    parts = build_matrices(spec)
    h = parts["kinetic"] + parts["external"] + spec.lam * parts["repulsion"]
    return h, parts


def _coeff_cube(labels, coeffs, omega: int):
    cube = np.zeros((omega + 1, omega + 1, omega + 1))
    inv_rt2 = 1.0 / math.sqrt(2.0)
    for c, (i, j, k) in zip(coeffs, labels):
        if i == j:
            cube[i, j, k] = c
        else:
            cube[i, j, k] = cube[j, i, k] = c * inv_rt2
    return cube


def solve(spec: HeliumSpec, with_density: bool = True) -> HeliumSolution:
    """Lowest variational state: diagonalize, assemble state/density/components."""
    if spec.z <= 1.0 and spec.omega_basis < OMEGA_MIN_ANION:
        spec = HeliumSpec(spec.z, OMEGA_MIN_ANION, spec.lam)
    h, parts = build_hamiltonian(spec)
    vals, vecs = eig_sym_dense(h)
    e_total = float(vals[0])
    c = vecs[:, 0]

    labels = parts["labels"]
    head = int(np.flatnonzero((labels == 0).all(axis=1))[0])
    if c[head] < 0:
        c = -c
    if abs(c[head]) < np.max(np.abs(c)) - 1e-12:
        raise NumericalError(
            "leading configuration is not dominant; basis or state is pathological"
        )

    e_remnant = -0.5 * spec.z**2
    if spec.z <= 1.0 and spec.lam == 1.0 and e_total > e_remnant:
        warnings.warn(
            f"z={spec.z}: variational energy {e_total:.6f} lies above the "
            f"one-electron remnant {e_remnant:.6f}; the second electron is unbound "
            "at this basis size",
            stacklevel=2,
        )

    cube = _coeff_cube(labels, c, spec.omega_basis)
    state = HeliumState(spec.z, cube)
    components = (
        float(c @ parts["kinetic"] @ c),
        float(spec.lam * (c @ parts["repulsion"] @ c)),
        float(c @ parts["external"] @ c),
    )
    solution = HeliumSolution(
        spec=spec,
        coeffs=c,
        coeff_cube=cube,
        e_total=e_total,
        ionization=e_total - e_remnant,
        state=state,
        components=components,
    )
    if with_density:
        density = compute_density(solution, uniform_grid(4001, state.r_extent))
        solution = HeliumSolution(**{**solution.__dict__, "density": density})
    return solution


def compute_density(solution: HeliumSolution, r_grid: RadialGrid) -> RadialField:
    """rho(r) from the coefficient cube.

    Orthonormality of the r2- and angle-factors collapses the two inner
    integrals, leaving rho(r) = (1/2pi) sum_{i i'} D_{i i'} R_i(r) R_i'(r)
    with D the cube contracted over its other two axes.
    """
    cube = solution.coeff_cube
    d_mat = np.einsum("ijk,pjk->ip", cube, cube)
    basis = ion_radial_basis(solution.spec.z, range(cube.shape[0]), r_grid.nodes)
    rho = np.einsum("ri,rp,ip->r", basis, basis, d_mat) / (2.0 * np.pi)
    field = RadialField(r_grid, rho)
    miss = abs(field.integrate_d3r() - 2.0)
    if miss > 1e-6:
        raise QuadratureResolutionError(
            f"density normalization miss {miss:.2e} exceeds 1e-6; grid too coarse or short"
        )
    return field


def record(solution: HeliumSolution, label: str | None = None) -> SystemRecord:
    if solution.density is None:
        raise ContractViolation("solution has no density; solve with with_density=True")
    spec = solution.spec

    def v_ext(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(r > 0, -spec.z / np.maximum(r, 1e-300), -np.inf)

    return SystemRecord(
        kind="helium",
        label=label or f"helium z={spec.z:g}",
        params={"z": spec.z, "omega_basis": spec.omega_basis, "lambda": spec.lam},
        e_total=solution.e_total,
        ionization=solution.ionization,
        density=solution.density,
        state=solution.state,
        v_ext=v_ext,
        lam=spec.lam,
        components=solution.components,
        e_remnant=-0.5 * spec.z**2,
    )
