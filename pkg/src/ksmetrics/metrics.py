"""Distances between two-electron systems derived from energy conservation.

Four distances are provided, all for N = 2:

    d_psi  = sqrt(2N - 2|<a|b>|)                       max 2
    d_rho  = int |rho_a - rho_b| d3r                   max 2N = 4
    d_v1   = int |(E_a+c)|psi_a|^2 - (E_b+c)|psi_b|^2| max (E_a+E_b+2c) N
    d_v2   = int |(E_a+c)rho_a - (E_b+c)rho_b| d3r     max (E_a+E_b+2c) N

c is a gauge constant shared by every system in a comparison set, chosen so
all gauged energies are non-negative. The general-form field

    h(r) = 2 [tau(r) + pair(r) + v(r) rho(r)] + c rho(r)

integrates to (E+c)N and backs both the conservation-law cross-check and the
h-based variant of d_v2. Component bookkeeping (norm-2 states): the kinetic
density tau integrates to the full kinetic energy T; the tabulated pair
component is reported at half weight (integral U/2, the per-electron share);
the potential component (v + c/2) rho integrates to V + c.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.interpolate import PchipInterpolator

from .errors import ContractViolation, NumericalError, QuadratureResolutionError
from .grids import RadialField, RadialGrid, uniform_grid
from .records import SystemRecord
from .states import CorrelatedState, PairQuadrature, pair_quadrature

__all__ = [
    "GaugeContext",
    "DistanceReport",
    "HField",
    "gauge_constant_eigen",
    "gauge_constant_h",
    "d_psi",
    "d_rho",
    "d_v1_eigen",
    "d_v2_eigen",
    "d_v2_general",
    "h_field",
    "kinetic_energy_gradient",
    "kinetic_energy_laplacian",
    "rescale",
    "distance_report",
    "energy_ratio",
]

N_PARTICLES = 2


@dataclass(frozen=True)
class GaugeContext:
    """A single additive potential constant shared by a comparison family."""

    c: float
    member_energies: tuple[float, ...]
    rule: str

    def __post_init__(self):
        if self.c < 0:
            raise ContractViolation(f"gauge constant must be >= 0, got {self.c}")
        for e in self.member_energies:
            if e + self.c < -1e-9:
                raise ContractViolation(
                    f"member energy {e} stays negative under gauge c={self.c}"
                )

    def gauged(self, energy: float) -> float:
        shifted = energy + self.c
        if shifted < -1e-9:
            raise ContractViolation(
                f"energy {energy} is not covered by gauge c={self.c}"
            )
        return max(shifted, 0.0)


@dataclass(frozen=True)
class DistanceReport:
    d_psi: float
    d_rho: float
    d_v1: float
    d_v2: float
    rescaled_d_psi: float
    rescaled_d_rho: float
    rescaled_d_v1: float
    rescaled_d_v2: float
    gauge: GaugeContext
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("rescaled_d_psi", "rescaled_d_rho", "rescaled_d_v1", "rescaled_d_v2"):
            value = getattr(self, name)
            if not -1e-9 <= value <= 2.0 + 1e-9:
                raise ContractViolation(f"{name} = {value} outside [0, 2]")
        if self.d_v2 > self.d_v1 + 1e-9 * max(1.0, abs(self.d_v1)):
            raise ContractViolation(
                f"d_v2 = {self.d_v2} exceeds d_v1 = {self.d_v1}; "
                "density-level distance cannot beat the wavefunction-level one"
            )


@dataclass(frozen=True)
class HField:
    """The radial conservation-law field and its tabulated components."""

    h: RadialField
    tau: RadialField
    pair: RadialField
    pot: RadialField
    c: float
    label: str

    def total(self) -> float:
        """int h d3r; equals (E + c) N up to quadrature error."""
        return self.h.integrate_d3r()


def gauge_constant_eigen(energies: Sequence[float]) -> GaugeContext:
    """Minimal shared constant making every member energy non-negative."""
    energies = tuple(float(e) for e in energies)
    if not energies:
        raise ContractViolation("gauge constant needs at least one member energy")
    if not all(np.isfinite(energies)):
        raise ContractViolation("member energies must be finite")
    return GaugeContext(max(0.0, -min(energies)), energies, "eigenstate-min")


# --------------------------------------------------------------------------
# wavefunction and density distances


def _check_norm(state: CorrelatedState, quad: PairQuadrature):
    vals = quad.state_values(state)
    norm = quad.integrate(vals * vals)
    if abs(norm - N_PARTICLES) > 1e-6 * N_PARTICLES:
        raise ContractViolation(f"state norm {norm} deviates from {N_PARTICLES}")
    return vals


def d_psi(
    a: CorrelatedState, b: CorrelatedState, quad: PairQuadrature | None = None
) -> float:
    """sqrt(2N - 2 |<a|b>|); phase-invariant, 0 for identical states, max 2."""
    if a is b:
        return 0.0
    if quad is None:
        quad = pair_quadrature([a, b])
    va = _check_norm(a, quad)
    vb = _check_norm(b, quad)
    ov = abs(quad.integrate(va * vb))
    if ov > N_PARTICLES + 1e-6:
        raise QuadratureResolutionError(f"overlap magnitude {ov} exceeds {N_PARTICLES}")
    return float(np.sqrt(max(2.0 * N_PARTICLES - 2.0 * min(ov, float(N_PARTICLES)), 0.0)))


def _common_grid(a: RadialField, b: RadialField, n: int = 8001) -> RadialGrid:
    return uniform_grid(n, max(a.grid.r_max, b.grid.r_max))


def _resample(density: RadialField, r: NDArray[np.float64]) -> NDArray[np.float64]:
    """Monotone interpolation onto r; beyond the stored domain the tail must be dead."""
    beyond = r > density.grid.r_max
    if np.any(beyond):
        edge = density.values[-1]
        if abs(edge) > 1e-9 * np.max(np.abs(density.values)):
            raise NumericalError(
                "density would need extrapolation beyond its grid "
                f"(edge value {edge:.3e} is not negligible)"
            )
    out = PchipInterpolator(density.grid.nodes, density.values, extrapolate=False)(r)
    return np.nan_to_num(out, nan=0.0)


def _check_density(density: RadialField):
    total = density.integrate_d3r()
    if abs(total - N_PARTICLES) > 1e-6:
        raise ContractViolation(f"density integrates to {total}, expected {N_PARTICLES}")


def d_rho(a: RadialField, b: RadialField) -> float:
    """L1 distance of densities, int |rho_a - rho_b| d3r; max 2N."""
    if a is b:
        return 0.0
    _check_density(a)
    _check_density(b)
    grid = _common_grid(a, b)
    diff = np.abs(_resample(a, grid.nodes) - _resample(b, grid.nodes))
    return float(grid.integrate_d3r(diff))


# --------------------------------------------------------------------------
# potential distances (eigenstate forms)


def d_v1_eigen(
    a: SystemRecord,
    b: SystemRecord,
    gauge: GaugeContext,
    quad: PairQuadrature | None = None,
) -> float:
    """int |(E_a+c)|psi_a|^2 - (E_b+c)|psi_b|^2| over both electron coordinates."""
    ea, eb = gauge.gauged(a.e_total), gauge.gauged(b.e_total)
    if a is b:
        return 0.0
    if quad is None:
        quad = pair_quadrature([a.state, b.state])
    va = quad.state_values(a.state)
    vb = quad.state_values(b.state)
    value = quad.integrate(np.abs(ea * va * va - eb * vb * vb))
    bound = (ea + eb) * N_PARTICLES
    if value > bound + max(1e-6, 1e-6 * bound):
        raise QuadratureResolutionError(
            f"d_v1 = {value} exceeds its theoretical bound {bound}"
        )
    return float(min(value, bound))


def d_v2_eigen(a: SystemRecord, b: SystemRecord, gauge: GaugeContext) -> float:
    """int |(E_a+c)rho_a - (E_b+c)rho_b| d3r."""
    ea, eb = gauge.gauged(a.e_total), gauge.gauged(b.e_total)
    if a is b:
        return 0.0
    if a.density is b.density:
        # shared storage (e.g. a system and its non-interacting twin)
        return float(N_PARTICLES * abs(a.e_total - b.e_total))
    grid = _common_grid(a.density, b.density)
    diff = np.abs(
        ea * _resample(a.density, grid.nodes) - eb * _resample(b.density, grid.nodes)
    )
    return float(grid.integrate_d3r(diff))


# --------------------------------------------------------------------------
# general-form h field


def _fd_steps(r: NDArray, t: NDArray, scale: float, step: float):
    """Per-node symmetric step sizes that keep the stencil inside the domain."""
    hr = np.minimum(step * scale, 0.5 * r)
    ht = np.minimum(step, 0.5 * np.minimum(1.0 - t, 1.0 + t))
    return np.maximum(hr, 1e-14 * scale), np.maximum(ht, 1e-14)


def kinetic_energy_gradient(
    state: CorrelatedState, quad: PairQuadrature | None = None, step: float = 1e-4
) -> float:
    """int |grad_1 psi|^2 by central differences; 2T on the norm-2 convention."""
    if quad is None:
        quad = pair_quadrature([state])
    r, t = quad.radial.nodes, quad.t_nodes
    hr, ht = _fd_steps(r, t, state.r_scale, step)
    dpsi_r = (state.value_grid(r + hr, r, t) - state.value_grid(r - hr, r, t)) / (
        2.0 * hr[:, None, None]
    )
    dpsi_t = (state.value_grid(r, r, t + ht) - state.value_grid(r, r, t - ht)) / (
        2.0 * ht[None, None, :]
    )
    grad_sq = dpsi_r**2 + (1.0 - t[None, None, :] ** 2) / r[:, None, None] ** 2 * dpsi_t**2
    return float(quad.integrate(grad_sq))


def kinetic_energy_laplacian(
    state: CorrelatedState, quad: PairQuadrature | None = None, step: float = 1e-3
) -> float:
    """-int psi lap_1 psi by central differences; 2T on the norm-2 convention."""
    if quad is None:
        quad = pair_quadrature([state])
    r, t = quad.radial.nodes, quad.t_nodes
    hr, ht = _fd_steps(r, t, state.r_scale, step)
    psi = quad.state_values(state)
    psi_hi = state.value_grid(r + hr, r, t)
    psi_lo = state.value_grid(r - hr, r, t)
    hr3 = hr[:, None, None]
    d1 = (psi_hi - psi_lo) / (2.0 * hr3)
    d2 = (psi_hi - 2.0 * psi + psi_lo) / hr3**2
    psi_thi = state.value_grid(r, r, t + ht)
    psi_tlo = state.value_grid(r, r, t - ht)
    ht3 = ht[None, None, :]
    dt1 = (psi_thi - psi_tlo) / (2.0 * ht3)
    dt2 = (psi_thi - 2.0 * psi + psi_tlo) / ht3**2
    rr = r[:, None, None]
    tt = t[None, None, :]
    lap = d2 + 2.0 / rr * d1 + ((1.0 - tt**2) * dt2 - 2.0 * tt * dt1) / rr**2
    return float(-quad.integrate(psi * lap))


def kinetic_identity(system: SystemRecord) -> tuple[float, float]:
    """Both sides of the integration-by-parts kinetic identity for one system.

    Returns (gradient form, laplacian form) of the kinetic energy. The
    evaluation coordinates are chosen per state family: states with an
    electron-coalescence cusp make the laplacian-form integrand singular like
    1/|r1 - r2| in the generic (r1, r2, angle) quadrature, so separable states
    are checked in the coordinates where both integrands are smooth.
    """
    from scipy.interpolate import CubicSpline

    from .states import HookeState, ProductState

    state = system.state
    if isinstance(state, HookeState):
        # relative coordinate: the inter-electron cusp is a regular point of
        # chi(u), and chi(0) = chi(u_max) = 0 kills the boundary terms. The
        # center-of-mass oscillator contributes (3/4) omega to both sides.
        grid = uniform_grid(16001, state.u_max)
        u = grid.nodes
        chi = u * state._rel_part(u)
        chi /= np.sqrt(grid.integrate(chi**2))
        s = CubicSpline(u, chi)
        t_cm = 0.75 * state.omega
        grad = grid.integrate(s(u, 1) ** 2)
        lap = -grid.integrate(chi * s(u, 2))
        return float(t_cm + grad), float(t_cm + lap)
    if isinstance(state, ProductState):
        # doubly occupied orbital: T = 2 * (1/2) int |grad phi|^2 d3r, with
        # the laplacian written as (1/r)(r phi)'' so r = 0 is regular
        density = system.density
        coarse = density.grid.nodes
        phi_spline = CubicSpline(coarse, np.sqrt(np.maximum(density.values, 0.0) / 2.0))
        refine = 4
        grid = uniform_grid(refine * (coarse.size - 1) + 1, density.grid.r_max)
        r = grid.nodes
        phi, dphi, d2phi = phi_spline(r), phi_spline(r, 1), phi_spline(r, 2)
        grad = 2.0 * 0.5 * grid.integrate_d3r(dphi**2)
        lap = -2.0 * 0.5 * 4.0 * np.pi * grid.integrate(phi * (2.0 * r * dphi + r**2 * d2phi))
        return float(grad), float(lap)
    quad = pair_quadrature([state])
    # the raw integrals over the norm-2 state are twice the kinetic energy
    return (
        0.5 * kinetic_energy_gradient(state, quad),
        0.5 * kinetic_energy_laplacian(state, quad),
    )


def _multipole_kernel_sum(r: float, r1: NDArray, moments: NDArray):
    ratio = np.minimum(r, r1) / np.maximum(np.maximum(r, r1), 1e-300)
    inv_big = 1.0 / np.maximum(np.maximum(r, r1), 1e-300)
    # sum_l ratio^l * inv_big * moments_l  (moments already t-integrated)
    n_l = moments.shape[-1]
    powers = ratio[:, None] ** np.arange(n_l)[None, :]
    return inv_big * np.einsum("al,al->a", powers, moments)


def h_field(
    system: SystemRecord,
    gauge: GaugeContext,
    r_grid: RadialGrid | None = None,
    l_max: int = 48,
    quad: PairQuadrature | None = None,
) -> HField:
    """The conservation-law field h(r) = 2[tau + pair + v rho] + c rho.

    tau and the pair term come from one (r1, t) quadrature of the state and
    its finite-difference radial/angular derivatives; the Coulomb kernel of
    the pair term is multipole-expanded up to l_max.
    """
    state = system.state
    if quad is None:
        quad = pair_quadrature([state])
    if r_grid is None:
        # graded toward the origin: v rho is 1/r-like for Coulomb systems and
        # a uniform grid would dominate the integration error of the total
        from .grids import geometric_panel_grid

        r_grid = geometric_panel_grid(
            state.r_scale / 20.0, state.r_extent, points_per_panel=12, panels_per_decade=5
        )
    r1 = quad.radial.nodes
    w1 = quad.radial.weights * r1**2
    t = quad.t_nodes
    wt = quad.t_weights
    c = gauge.c

    # Legendre table on the angular nodes for the multipole projection
    n_l = l_max + 1
    p_table = np.empty((t.size, n_l))
    p_table[:, 0] = 1.0
    if n_l > 1:
        p_table[:, 1] = t
    for l in range(1, n_l - 1):
        p_table[:, l + 1] = ((2 * l + 1) * t * p_table[:, l] - l * p_table[:, l - 1]) / (
            l + 1
        )
    wp = wt[:, None] * p_table

    h_step = 1e-4 * state.r_scale
    ht = 1e-5
    t_hi, t_lo = np.minimum(t + ht, 1.0), np.maximum(t - ht, -1.0)
    dt_span = (t_hi - t_lo)[None, None, :]

    r = r_grid.nodes
    r_safe = np.maximum(r, 1e-6 * state.r_scale)
    tau = np.empty(r.size)
    pair2 = np.empty(r.size)  # the full-weight pair field (integral U)
    rho = np.empty(r.size)
    chunk = 64
    for lo_i in range(0, r.size, chunk):
        rc = r[lo_i : lo_i + chunk]
        rc_safe = r_safe[lo_i : lo_i + chunk]
        psi = state.value_grid(rc, r1, t)
        psisq = psi * psi
        rho[lo_i : lo_i + chunk] = 2.0 * np.pi * np.einsum("abc,b,c->a", psisq, w1, wt)

        lo_r = np.maximum(rc - h_step, 0.0)
        dpsi_r = (state.value_grid(rc + h_step, r1, t) - state.value_grid(lo_r, r1, t)) / (
            (rc + h_step - lo_r)[:, None, None]
        )
        dpsi_t = (state.value_grid(rc, r1, t_hi) - state.value_grid(rc, r1, t_lo)) / dt_span
        grad_sq = dpsi_r**2 + (1.0 - t[None, None, :] ** 2) / rc_safe[
            :, None, None
        ] ** 2 * dpsi_t**2
        tau[lo_i : lo_i + chunk] = np.pi * np.einsum("abc,b,c->a", grad_sq, w1, wt)

        # moments[a, b, l] = int psi^2 P_l dt, then kernel-sum over l and r1
        moments = np.einsum("abc,cl->abl", psisq, wp)
        for n, rv in enumerate(rc):
            ksum = _multipole_kernel_sum(float(rv), r1, moments[n])
            pair2[lo_i + n] = np.pi * np.dot(w1, ksum)

    # the pair field carries the system's interaction strength (zero for the
    # non-interacting counterparts)
    pair2 *= system.lam
    v_vals = np.asarray(system.v_ext(r_safe), dtype=float)
    tau_f = RadialField(r_grid, tau)
    pair_f = RadialField(r_grid, 0.5 * pair2)
    pot_f = RadialField(r_grid, (v_vals + 0.5 * c) * rho)
    h_vals = 2.0 * (tau + pair2 + v_vals * rho) + c * rho
    return HField(
        h=RadialField(r_grid, h_vals),
        tau=tau_f,
        pair=pair_f,
        pot=pot_f,
        c=c,
        label=system.label,
    )


def d_v2_general(
    a: SystemRecord,
    b: SystemRecord,
    gauge: GaugeContext,
    l_max: int = 48,
    check_norm_identity: bool = True,
) -> float:
    """int |h_a - h_b| d3r from the general-form fields."""
    if a is b:
        return 0.0
    grid = _common_grid(a.density, b.density, n=601)
    ha = h_field(a, gauge, r_grid=grid, l_max=l_max)
    hb = h_field(b, gauge, r_grid=grid, l_max=l_max)
    if check_norm_identity:
        for system, hf in ((a, ha), (b, hb)):
            want = (system.e_total + gauge.c) * N_PARTICLES
            got = hf.total()
            if abs(got - want) > 5e-3 * max(abs(want), 1.0):
                raise NumericalError(
                    f"h-field norm {got} of {system.label} misses (E+c)N = {want}"
                )
    return float(grid.integrate_d3r(np.abs(ha.h.values - hb.h.values)))


def gauge_constant_h(
    systems: Sequence[SystemRecord], step: float = 1e-3, l_max: int = 48
) -> GaugeContext:
    """Smallest constant (on a 1e-3 grid) making every member's h non-negative.

    h is affine in c with slope rho, so the minimum is read off directly from
    the ungauged field; the result depends on the evaluation grid's smallest
    radius for bare Coulomb potentials, where no finite constant works in the
    continuum limit.
    """
    if not systems:
        raise ContractViolation("gauge constant needs at least one system")
    zero = GaugeContext(0.0, (), "h-field-min")
    c_req = 0.0
    for system in systems:
        hf = h_field(system, zero, l_max=l_max)
        rho = _resample(system.density, hf.h.grid.nodes)
        mask = rho > 1e-12 * np.max(rho)
        need = np.max(-hf.h.values[mask] / rho[mask])
        c_req = max(c_req, need)
    if c_req > 1e9:
        raise NumericalError(f"h-positivity requires a diverging constant ({c_req:.3e})")
    c = 0.0 if c_req <= 0 else float(np.ceil(c_req / step) * step)
    return GaugeContext(c, tuple(s.e_total for s in systems), "h-field-min")


# --------------------------------------------------------------------------
# rescaling and reports


def rescale(
    d_psi_val: float,
    d_rho_val: float,
    d_v1_val: float,
    d_v2_val: float,
    e_a: float,
    e_b: float,
    gauge: GaugeContext,
) -> tuple[float, float, float, float]:
    """Map raw distances onto the common [0, 2] scale."""
    denom = N_PARTICLES * (gauge.gauged(e_a) + gauge.gauged(e_b))
    if denom <= 0:
        raise ContractViolation("gauged energies sum to zero; cannot rescale d_v")
    return (
        2.0 * d_psi_val / np.sqrt(2.0 * N_PARTICLES),
        2.0 * d_rho_val / (2.0 * N_PARTICLES),
        2.0 * d_v1_val / denom,
        2.0 * d_v2_val / denom,
    )


def distance_report(
    a: SystemRecord,
    b: SystemRecord,
    gauge: GaugeContext,
    quad: PairQuadrature | None = None,
) -> DistanceReport:
    """All four distances plus their rescaled forms for one pair of systems."""
    if quad is None:
        quad = pair_quadrature([a.state, b.state])
    raw_psi = d_psi(a.state, b.state, quad)
    raw_rho = d_rho(a.density, b.density)
    raw_v1 = d_v1_eigen(a, b, gauge, quad)
    raw_v2 = d_v2_eigen(a, b, gauge)
    rs = rescale(raw_psi, raw_rho, raw_v1, raw_v2, a.e_total, b.e_total, gauge)
    return DistanceReport(
        d_psi=raw_psi,
        d_rho=raw_rho,
        d_v1=raw_v1,
        d_v2=raw_v2,
        rescaled_d_psi=rs[0],
        rescaled_d_rho=rs[1],
        rescaled_d_v1=rs[2],
        rescaled_d_v2=rs[3],
        gauge=gauge,
        metadata={
            "radial_nodes": int(quad.radial.n),
            "angular_nodes": int(quad.t_nodes.size),
            "labels": (a.label, b.label),
        },
    )


def energy_ratio(system: SystemRecord) -> float:
    """|<U>/<V>|: electron repulsion relative to the external potential."""
    if system.components is None:
        raise ContractViolation(f"{system.label} carries no (T, U, V) components")
    _, u, v = system.components
    if v == 0:
        raise ContractViolation("external-potential expectation is zero")
    return abs(u / v)
