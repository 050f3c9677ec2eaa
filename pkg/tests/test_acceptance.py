"""Acceptance criteria: one test per criterion, each a single pass/fail.

The two desk-scale scans (one per family) are solved once per session and
shared across criteria; everything else derives from them or from small
dedicated solves.
"""

import math

import numpy as np
import pytest

from ksmetrics.helium import HeliumSpec
from ksmetrics.helium import record as helium_record
from ksmetrics.helium import solve as helium_solve
from ksmetrics.hooke import HookeSpec, assemble_solution
from ksmetrics.hooke import record as hooke_record
from ksmetrics.ksinv import invert, round_trip_check
from ksmetrics.metrics import (
    d_rho,
    d_v2_eigen,
    gauge_constant_eigen,
    h_field,
    kinetic_identity,
)
from ksmetrics.scans import scan_family, summarize, write_scan
from ksmetrics.states import pair_quadrature
from ksmetrics.figures import emit_fig1, emit_fig2, emit_fig3

HOOKE_PARAMS = (0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0)
HELIUM_PARAMS = (1.0, 1.5, 2.0, 5.0, 10.0, 50.0, 100.0, 200.0)
RESCALED = ("rescaled_d_psi", "rescaled_d_rho", "rescaled_d_v1", "rescaled_d_v2")


@pytest.fixture(scope="module")
def hooke_scan():
    return scan_family("hooke", HOOKE_PARAMS, reference_param=0.5)


@pytest.fixture(scope="module")
def helium_scan():
    return scan_family("helium", HELIUM_PARAMS, reference_param=50.0)


# --------------------------------------------------------------------------
# 1. harmonically confined pair at the analytically solvable frequency


def test_acceptance_1_hooke_closed_form_energy():
    solution = assemble_solution(HookeSpec(0.5))
    assert solution.e_total == pytest.approx(2.0, abs=1e-5)
    assert solution.ionization == pytest.approx(1.25, abs=1e-5)


# --------------------------------------------------------------------------
# 2. helium ground state: exact non-interacting limit, variational quality,
#    basis convergence, virial balance


def test_acceptance_2_helium_ground_state():
    free = helium_solve(HeliumSpec(2.0, 10, lam=0.0), with_density=False)
    assert free.e_total == pytest.approx(-4.0, abs=1e-9)

    s10 = helium_solve(HeliumSpec(2.0, 10), with_density=False)
    assert s10.e_total <= -2.847656  # beats the best single-determinant energy

    s12 = helium_solve(HeliumSpec(2.0, 12), with_density=False)
    s14 = helium_solve(HeliumSpec(2.0, 14), with_density=False)
    assert s14.e_total <= s12.e_total <= s10.e_total  # variational ordering
    assert abs(s12.e_total - s14.e_total) < 1e-3

    t, u, v = s14.components
    assert abs(2.0 * t + u + v) < 1e-3 * abs(t)


# --------------------------------------------------------------------------
# 3. single-particle inversion: exact in the non-interacting limit, and
#    self-consistent (eigenvalue + orbital round trip) for every interacting
#    member of both scans


def test_acceptance_3_inversion(hooke_scan, helium_scan):
    # lam = 0: the inverted potential must reproduce the external one
    for rec, v_ref in (
        (
            hooke_record(assemble_solution(HookeSpec(0.5, lam=0.0))),
            lambda r: 0.125 * r**2,
        ),
        (
            helium_record(helium_solve(HeliumSpec(2.0, 10, lam=0.0))),
            lambda r: -2.0 / r,
        ),
    ):
        ks = invert(rec)
        r = ks.v_ks.grid.nodes
        mask = (r >= 0.1) & (r <= ks.valid_r_max)
        assert np.max(np.abs(ks.v_ks.values[mask] - v_ref(r[mask]))) <= 1e-5

    # interacting members: eigenvalue within 1e-4 relative, orbital overlap
    # within 1e-6 of unity when the inverted potential is re-solved
    for scan in (hooke_scan, helium_scan):
        for row in scan.rows:
            assert row.ok, f"{scan.family} param {row.param}: {row.error}"
            eps, ov = round_trip_check(row.ks, eps_tol=1e-4, overlap_tol=1e-6)
            assert ov >= 1.0 - 1e-6


# --------------------------------------------------------------------------
# 4. pointwise conservation field and kinetic identity


def test_acceptance_4_h_field_and_kinetic_identity(hooke_scan, helium_scan):
    pools = (
        (hooke_scan, (0.1, 0.5, 2.0)),
        (helium_scan, (1.0, 2.0, 50.0)),
    )
    for scan, params in pools:
        rows = [scan.row(p) for p in params]
        gauge = gauge_constant_eigen([r.system.e_total for r in rows])
        for row in rows:
            hf = h_field(row.system, gauge)
            want = (row.system.e_total + gauge.c) * 2.0
            scale = max(abs(want), 2.0 * abs(row.system.e_total))
            assert abs(hf.total() - want) <= 5e-3 * scale, row.system.label

    twins = [
        hooke_scan.row(0.5).system,
        hooke_scan.row(0.5).ks_system,
        helium_scan.row(2.0).system,
        helium_scan.row(2.0).ks_system,
        hooke_scan.row(2.0).system,
        helium_scan.row(50.0).ks_system,
    ]
    for system in twins:
        grad, lap = kinetic_identity(system)
        assert abs(grad - lap) <= 1e-6 * max(1.0, abs(grad)), system.label


# --------------------------------------------------------------------------
# 5. metric axioms on a mixed pool of >= 10 systems


def test_acceptance_5_metric_axioms(hooke_scan, helium_scan):
    recs = [hooke_scan.row(p).system for p in (0.2, 0.5, 1.0, 2.0)]
    recs += [helium_scan.row(p).system for p in (1.5, 2.0, 5.0, 10.0)]
    recs += [hooke_scan.row(0.5).ks_system, helium_scan.row(2.0).ks_system]
    assert len(recs) == 10

    states = [r.state for r in recs]
    quad = pair_quadrature(states)
    vals = [quad.state_values(s) for s in states]
    for v in vals:
        assert abs(quad.integrate(v * v) - 2.0) <= 1e-6

    gauge = gauge_constant_eigen([r.e_total for r in recs])
    gauged = [gauge.gauged(r.e_total) for r in recs]
    n = len(recs)
    mats = {name: np.zeros((n, n)) for name in ("psi", "rho", "v1", "v2")}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            ov = abs(quad.integrate(vals[i] * vals[j]))
            mats["psi"][i, j] = math.sqrt(max(4.0 - 2.0 * min(ov, 2.0), 0.0))
            mats["rho"][i, j] = d_rho(recs[i].density, recs[j].density)
            mats["v1"][i, j] = quad.integrate(
                np.abs(gauged[i] * vals[i] ** 2 - gauged[j] * vals[j] ** 2)
            )
            mats["v2"][i, j] = d_v2_eigen(recs[i], recs[j], gauge)

    # a system and its non-interacting twin share one density, so the density
    # distance separates densities, not systems
    same_density = np.array(
        [[recs[i].density is recs[j].density for j in range(n)] for i in range(n)]
    )
    for name, d in mats.items():
        scale = max(1.0, float(d.max()))
        # non-negativity and identity of indiscernibles (diagonal is exact)
        assert np.all(d >= 0.0) and np.all(np.diag(d) == 0.0), name
        distinct = ~np.eye(n, dtype=bool)
        if name == "rho":
            assert np.all(d[same_density] == 0.0)
            distinct &= ~same_density
        assert np.all(d[distinct] > 0.0), name
        # symmetry: both orders evaluated independently above
        assert np.max(np.abs(d - d.T)) <= 1e-12 * scale, name
        # triangle inequality over all ordered triples
        for j in range(n):
            slack = 1e-8 * scale
            assert np.all(d <= d[:, j, None] + d[None, j, :] + slack), name

    # the density-level potential distance never beats the wavefunction-level
    # one, and is strictly below it for distinct gauged interacting pairs
    for i in range(n):
        for j in range(i + 1, n):
            margin = mats["v1"][i, j] - mats["v2"][i, j]
            assert margin >= -1e-8 * max(1.0, mats["v1"][i, j]), (i, j)
            if recs[i].lam == recs[j].lam == 1.0 and min(gauged[i], gauged[j]) > 1.0:
                assert margin > 1e-3, (i, j)


# --------------------------------------------------------------------------
# 6. scan shape: rescaled distances grow monotonically away from the
#    reference and saturate in the extreme order D_v1 >= D_psi >= D_rho


def _branch_rows(scan, increasing):
    ref = scan.reference_param
    rows = [r for r in scan.rows if r.ok]
    if increasing:
        return [r for r in rows if r.param >= ref]
    return [r for r in rows if r.param <= ref][::-1]


def test_acceptance_6_scan_monotonicity_and_ordering(hooke_scan, helium_scan):
    for scan in (hooke_scan, helium_scan):
        for increasing in (False, True):
            branch = _branch_rows(scan, increasing)
            for attr in ("vs_reference", "vs_reference_ks"):
                for name in RESCALED:
                    seq = [getattr(getattr(r, attr), name) for r in branch]
                    diffs = np.diff(seq)
                    assert np.all(diffs >= -1e-6), (scan.family, attr, name, seq)

        for row in (scan.rows[0], scan.rows[-1]):
            for attr in ("vs_reference", "vs_reference_ks"):
                rep = getattr(row, attr)
                assert rep.rescaled_d_v1 >= rep.rescaled_d_psi >= rep.rescaled_d_rho, (
                    scan.family,
                    row.param,
                    attr,
                )


# --------------------------------------------------------------------------
# 7. interacting-vs-non-interacting gap: size at the anion end, the
#    parameter where it crosses 0.2, its decay, and the repulsion ratio


def _crossing(scan, level=0.2):
    """Log-parameter interpolation of where rescaled D_psi(MB, KS) hits level."""
    rows = [r for r in scan.rows if r.ok]
    pts = [(math.log(r.param), r.mb_vs_ks.rescaled_d_psi) for r in rows]
    for (xa, ya), (xb, yb) in zip(pts[:-1], pts[1:]):
        if (ya - level) * (yb - level) <= 0.0 and ya != yb:
            return math.exp(xa + (level - ya) * (xb - xa) / (yb - ya))
    raise AssertionError(f"no {level} crossing in {[p[1] for p in pts]}")


def test_acceptance_7_interaction_gap(hooke_scan, helium_scan):
    for scan in (hooke_scan, helium_scan):
        gaps = [r.mb_vs_ks.rescaled_d_psi for r in scan.rows]
        ratios = [r.interaction_ratio for r in scan.rows]
        # the gap and the repulsion ratio decay together toward zero
        assert np.all(np.diff(gaps) < 0.0), scan.family
        assert np.all(np.diff(ratios) < 0.0), scan.family
        assert gaps[-1] < gaps[0] / 3.0, scan.family
    assert helium_scan.rows[-1].mb_vs_ks.rescaled_d_psi < 0.02

    anion_gap = helium_scan.row(1.0).mb_vs_ks.rescaled_d_psi
    assert 0.30 <= anion_gap <= 0.40

    z_cross = _crossing(helium_scan)
    assert 1.2 <= z_cross <= 2.0

    omega_cross = _crossing(hooke_scan)
    assert 0.9 <= omega_cross <= 1.7, (
        f"rescaled D_psi(MB, KS) crosses 0.2 at omega = {omega_cross:.3f}, "
        "outside the claimed window [0.9, 1.7]"
    )


# --------------------------------------------------------------------------
# 8. determinism: independent serial and threaded runs produce byte-identical
#    artifacts


def test_acceptance_8_determinism(tmp_path):
    params, ref = (2.0, 3.0, 5.0), 3.0
    scan_a = scan_family("helium", params, ref, omega_basis=6, threads=1)
    scan_b = scan_family("helium", params, ref, omega_basis=6, threads=2)
    assert summarize(scan_a) == summarize(scan_b)

    outputs = []
    for tag, scan in (("a", scan_a), ("b", scan_b)):
        out = tmp_path / tag
        write_scan(scan, out / "scan")
        emit_fig1(scan, out / "fig1")
        emit_fig2([scan], out / "fig2")
        emit_fig3(scan, out / "fig3")
        files = sorted(p for p in out.rglob("*") if p.is_file())
        outputs.append({p.relative_to(out): p.read_bytes() for p in files})
    assert list(outputs[0]) == list(outputs[1])
    assert outputs[0] == outputs[1]
