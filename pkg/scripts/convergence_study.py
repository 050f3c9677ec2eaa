#!/usr/bin/env python3
"""Convergence tables for both solvers.

Helium: variational energy versus the basis cutoff (i + j + k <= omega) at a
given nuclear charge, with successive differences. Hooke: relative-motion
eigenvalue versus the finite-difference step, with Richardson-style ratios
confirming the h^2 order.
"""

import argparse
import sys

from ksmetrics.helium import HeliumSpec, solve
from ksmetrics.hooke import HookeSpec, default_u_max, solve_relative


def helium_table(z, omegas):
    print(f"helium z={z:g}: E vs basis cutoff")
    print(f"{'omega':>6} {'E_total':>18} {'delta':>12}")
    prev = None
    for omega in omegas:
        e = solve(HeliumSpec(z, omega), with_density=False).e_total
        delta = "" if prev is None else f"{e - prev:12.3e}"
        print(f"{omega:>6} {e:18.12f} {delta:>12}")
        prev = e


def hooke_table(omega, grid_ns):
    u_max = default_u_max(omega)
    print(f"\nhooke omega={omega:g}: eps_rel vs grid (u_max={u_max:.2f})")
    print(f"{'n':>8} {'eps_rel':>18} {'delta':>12}")
    prev = None
    for n in grid_ns:
        eps, _ = solve_relative(HookeSpec(omega), grid_n=n, u_max=u_max)
        delta = "" if prev is None else f"{eps - prev:12.3e}"
        print(f"{n:>8} {eps:18.12f} {delta:>12}")
        prev = eps


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--z", type=float, default=2.0)
    parser.add_argument("--omega", type=float, default=0.5)
    parser.add_argument("--max-basis", type=int, default=14)
    args = parser.parse_args(argv)

    helium_table(args.z, range(4, args.max_basis + 1, 2))
    hooke_table(args.omega, [4096, 8192, 16384, 32768])
    return 0


if __name__ == "__main__":
    sys.exit(main())
