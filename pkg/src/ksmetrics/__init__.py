"""Exactly solvable two-electron systems, exact single-particle inversion,
and natural metric distances between wavefunctions, densities, and potentials.
"""

__version__ = "0.1.0"
