"""Command-line interface: solve, invert, measure, scan, and plot.

Exit codes: 0 success, 2 contract violation (bad inputs), 3 numerical
failure, 4 storage/I-O failure. An optional plain-text config file of
``key=value`` lines supplies defaults; explicit flags always win.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import ContractViolation, KsmetricsError, NumericalError, StorageError
from .helium import HeliumSpec
from .helium import solve as helium_solve
from .hooke import HookeSpec, assemble_solution
from .ksinv import invert
from .metrics import GaugeContext, distance_report, gauge_constant_eigen
from .scans import HELIUM_WINDOW, HOOKE_WINDOW, scan_family, write_scan
from .figures import emit_fig1, emit_fig2, emit_fig3

__all__ = ["main"]

_PROVENANCE = {"tool": "ksmetrics", "schema": io.SCHEMA_VERSION}


def _parse_config(path: str) -> dict[str, str]:
    config = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ContractViolation(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        config[key.strip().replace("-", "_")] = value.strip()
    return config


def _setting(args, config, name, cast, default=None, required=False):
    """Flag value if given, else config value, else default."""
    value = getattr(args, name, None)
    if value is None:
        value = config.get(name)
    if value is None:
        if required:
            raise ContractViolation(f"missing required setting --{name.replace('_', '-')}")
        return default
    return cast(value)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ksmetrics",
        description="Exactly solvable two-electron systems and natural metric distances",
    )
    parser.add_argument("--config", help="plain-text key=value defaults file")
    sub = parser.add_subparsers(dest="verb", required=True)

    solve = sub.add_parser("solve", help="solve a system and store the solution file")
    solve_sub = solve.add_subparsers(dest="family", required=True)
    hooke = solve_sub.add_parser("hooke", help="harmonically confined electron pair")
    hooke.add_argument("--omega", type=float)
    hooke.add_argument("--lambda", dest="lam", type=float)
    hooke.add_argument("--grid-n", dest="grid_n", type=int)
    hooke.add_argument("--out")
    helium = solve_sub.add_parser("helium", help="two-electron ion, variational basis")
    helium.add_argument("--z", type=float)
    helium.add_argument("--omega-basis", dest="omega_basis", type=int)
    helium.add_argument("--lambda", dest="lam", type=float)
    helium.add_argument("--out")

    invert_p = sub.add_parser("invert-ks", help="attach the inverted system to a solution file")
    invert_p.add_argument("--in", dest="infile")
    invert_p.add_argument("--out")

    dist = sub.add_parser("distance", help="all four distances between two solution files")
    dist.add_argument("--a")
    dist.add_argument("--b")
    dist.add_argument("--gauge-c", dest="gauge_c", type=float)

    scan = sub.add_parser("scan", help="solve, invert, and measure a parameter sweep")
    scan.add_argument("--family", choices=["hooke", "helium"])
    scan.add_argument("--params", help="comma-separated parameter list")
    scan.add_argument("--reference", type=float)
    scan.add_argument("--out-dir", dest="out_dir")
    scan.add_argument(
        "--full",
        action="store_true",
        help="sample 12 log-spaced params per side over the full supported window "
        "(minutes of runtime; --params is then ignored)",
    )
    scan.add_argument("--threads", type=int)
    scan.add_argument("--omega-basis", dest="omega_basis", type=int)

    figure = sub.add_parser("figure", help="emit CSV + SVG from a stored scan")
    figure.add_argument("fig", choices=["fig1", "fig2", "fig3"])
    figure.add_argument(
        "--scan",
        action="append",
        help="scan directory (or scan.json); repeat for multi-scan figures",
    )
    figure.add_argument("--out", help="output path prefix")
    return parser


def _cmd_solve(args, config) -> int:
    out = _setting(args, config, "out", str, required=True)
    lam = _setting(args, config, "lam", float, default=1.0)
    if args.family == "hooke":
        omega = _setting(args, config, "omega", float, required=True)
        grid_n = _setting(args, config, "grid_n", int)
        solution = assemble_solution(HookeSpec(omega, lam), grid_n=grid_n)
        sf = io.from_hooke(solution, provenance=dict(_PROVENANCE, grid_n=grid_n))
    else:
        z = _setting(args, config, "z", float, required=True)
        omega_basis = _setting(args, config, "omega_basis", int, default=10)
        solution = helium_solve(HeliumSpec(z, omega_basis, lam))
        sf = io.from_helium(solution, provenance=dict(_PROVENANCE))
    io.store(sf, out)
    print(f"stored {args.family} solution (e_total={solution.e_total:.12g}) -> {out}")
    return 0


def _cmd_invert(args, config) -> int:
    infile = _setting(args, config, "infile", str, required=True)
    out = _setting(args, config, "out", str, required=True)
    sf = io.load(infile)
    rec = io.to_record(sf)
    ks = invert(rec)
    io.store(io.with_ks(sf, ks), out)
    print(f"inverted {rec.label} (eps_ks={ks.eps_ks:.12g}) -> {out}")
    return 0


def _cmd_distance(args, config) -> int:
    path_a = _setting(args, config, "a", str, required=True)
    path_b = _setting(args, config, "b", str, required=True)
    rec_a = io.to_record(io.load(path_a))
    rec_b = io.to_record(io.load(path_b))
    gauge_c = _setting(args, config, "gauge_c", float)
    if gauge_c is None:
        gauge = gauge_constant_eigen([rec_a.e_total, rec_b.e_total])
    else:
        gauge = GaugeContext(gauge_c, (rec_a.e_total, rec_b.e_total), "cli-override")
    report = distance_report(rec_a, rec_b, gauge)
    print(f"a={rec_a.label}")
    print(f"b={rec_b.label}")
    print(f"gauge_c={gauge.c:.17g}")
    for name in ("d_psi", "d_rho", "d_v1", "d_v2"):
        print(f"{name}={getattr(report, name):.17g}")
        print(f"rescaled_{name}={getattr(report, 'rescaled_' + name):.17g}")
    return 0


def _full_params(family: str, reference: float) -> list[float]:
    lo, hi = HELIUM_WINDOW if family == "helium" else HOOKE_WINDOW
    below = np.geomspace(lo, reference, 13)[:-1]
    above = np.geomspace(reference, hi, 13)[1:]
    return [float(p) for p in below] + [reference] + [float(p) for p in above]


def _cmd_scan(args, config) -> int:
    family = _setting(args, config, "family", str, required=True)
    reference = _setting(args, config, "reference", float, required=True)
    out_dir = _setting(args, config, "out_dir", str, required=True)
    threads = _setting(args, config, "threads", int, default=1)
    omega_basis = _setting(args, config, "omega_basis", int, default=10)
    if args.full:
        params = _full_params(family, reference)
    else:
        raw = _setting(args, config, "params", str, required=True)
        params = [float(p) for p in raw.split(",") if p.strip()]
        if reference not in params:
            params.append(reference)
    scan = scan_family(
        family, params, reference, omega_basis=omega_basis, threads=threads
    )
    path = write_scan(scan, out_dir)
    n_ok = sum(1 for r in scan.rows if r.ok)
    print(f"scanned {family}: {n_ok}/{len(scan.rows)} members ok, gauge c={scan.gauge.c:g}")
    print(f"digest -> {path}")
    return 0


def _cmd_figure(args, config) -> int:
    scan_dirs = args.scan or ([config["scan"]] if "scan" in config else None)
    if not scan_dirs:
        raise ContractViolation("missing required setting --scan")
    out = _setting(args, config, "out", str, required=True)
    from .scans import load_summary

    summaries = [load_summary(d) for d in scan_dirs]
    if args.fig == "fig1":
        paths = emit_fig1(summaries[0], out)
    elif args.fig == "fig2":
        paths = emit_fig2(summaries, out)
    else:
        paths = emit_fig3(summaries[0], out)
    for p in paths:
        print(f"wrote {p}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _parse_config(args.config) if args.config else {}
        if args.verb == "solve":
            return _cmd_solve(args, config)
        if args.verb == "invert-ks":
            return _cmd_invert(args, config)
        if args.verb == "distance":
            return _cmd_distance(args, config)
        if args.verb == "scan":
            return _cmd_scan(args, config)
        if args.verb == "figure":
            return _cmd_figure(args, config)
        raise ContractViolation(f"unknown verb {args.verb!r}")
    except ContractViolation as exc:
        print(f"error (contract): {exc}", file=sys.stderr)
        return 2
    except StorageError as exc:
        print(f"error (storage): {exc}", file=sys.stderr)
        return 4
    except NumericalError as exc:
        print(f"error (numerical): {exc}", file=sys.stderr)
        return 3
    except KsmetricsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error (i/o): {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
