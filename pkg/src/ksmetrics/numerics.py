"""Special functions, Gauss quadrature rules, stencils, and eigensolvers.

Everything here is pure: rules and tables are immutable after construction
and safe to share between concurrent scan workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import NDArray
from scipy import linalg as sla
from scipy.special import roots_genlaguerre

from .errors import ContractViolation, NumericalError

__all__ = [
    "QuadratureRule1D",
    "laguerre_gen",
    "laguerre_gen_deriv",
    "legendre",
    "legendre_deriv",
    "gauss_rule",
    "stencil_second_derivative",
    "eig_sym_tridiag",
    "eig_sym_dense",
]

SUPPORTED_ALPHAS = (0, 1, 2)


@dataclass(frozen=True)
class QuadratureRule1D:
    """Gauss rule: nodes/weights for weight function 1 on [-1,1] or x^alpha e^-x on [0,inf).

    An n-point rule integrates polynomials of degree <= 2n-1 exactly
    against its weight function.
    """

    kind: str
    n: int
    nodes: NDArray[np.float64]
    weights: NDArray[np.float64]
    alpha: int = 0

    def integrate(self, values: NDArray[np.float64]) -> float:
        return float(np.dot(self.weights, values))


def laguerre_gen(n: int, alpha: int, x):
    """Generalized Laguerre polynomial L_n^(alpha)(x) by the three-term recurrence."""
    if n < 0:
        raise ContractViolation(f"polynomial order must be >= 0, got {n}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ContractViolation("Laguerre polynomials evaluated for x >= 0 only")
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = 1.0 + alpha - x
    for k in range(1, n):
        p, p_prev = ((2 * k + 1 + alpha - x) * p - (k + alpha) * p_prev) / (k + 1), p
    return p if p.ndim else float(p)


def laguerre_gen_deriv(n: int, alpha: int, x):
    """First derivative d/dx L_n^(alpha)(x) = -L_{n-1}^(alpha+1)(x)."""
    if n < 0:
        raise ContractViolation(f"polynomial order must be >= 0, got {n}")
    if n == 0:
        x = np.asarray(x, dtype=float)
        z = np.zeros_like(x)
        return z if z.ndim else 0.0
    out = laguerre_gen(n - 1, alpha + 1, x)
    return -out if np.ndim(out) else -float(out)


def legendre(k: int, t):
    """Legendre polynomial P_k(t) on [-1, 1] by the Bonnet recurrence."""
    if k < 0:
        raise ContractViolation(f"polynomial order must be >= 0, got {k}")
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + 1e-12):
        raise ContractViolation("Legendre argument outside [-1, 1]")
    p_prev = np.ones_like(t)
    if k == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = t.copy()
    for m in range(1, k):
        p, p_prev = ((2 * m + 1) * t * p - m * p_prev) / (m + 1), p
    return p if p.ndim else float(p)


def legendre_deriv(k: int, t):
    """First derivative P_k'(t), regularized at |t| = 1 via the recurrence form."""
    if k == 0:
        t = np.asarray(t, dtype=float)
        z = np.zeros_like(t)
        return z if z.ndim else 0.0
    t = np.asarray(t, dtype=float)
    pk = np.asarray(legendre(k, t))
    pk1 = np.asarray(legendre(k - 1, t))
    denom = 1.0 - t * t
    # (1-t^2) P_k' = k (P_{k-1} - t P_k); use the limit value k(k+1)/2 * P_k at t=+-1
    with np.errstate(divide="ignore", invalid="ignore"):
        out = k * (pk1 - t * pk) / denom
    edge = np.abs(denom) < 1e-12
    if np.any(edge):
        lim = 0.5 * k * (k + 1) * np.where(t > 0, 1.0, (-1.0) ** (k + 1))
        out = np.where(edge, lim, out)
    return out if out.ndim else float(out)


def gauss_rule(kind: str, n: int, alpha: int = 0) -> QuadratureRule1D:
    """Build an n-point Gauss rule.

    kind="legendre": weight 1 on [-1, 1].
    kind="laguerre": weight x^alpha e^-x on [0, inf), alpha in {0, 1, 2}.
    """
    if n < 1:
        raise ContractViolation(f"rule size must be >= 1, got {n}")
    if kind == "legendre":
        nodes, weights = leggauss(n)
        return QuadratureRule1D("legendre", n, nodes, weights)
    if kind == "laguerre":
        if alpha not in SUPPORTED_ALPHAS:
            raise ContractViolation(f"laguerre alpha must be one of {SUPPORTED_ALPHAS}")
        nodes, weights = roots_genlaguerre(n, alpha)
        if not (np.all(np.isfinite(nodes)) and np.all(weights > 0)):
            raise NumericalError(f"gauss-laguerre rule of order {n} failed to build")
        return QuadratureRule1D("laguerre", n, nodes, weights, alpha=alpha)
    raise ContractViolation(f"unknown quadrature kind {kind!r}")


# 5-point stencil coefficients: interior central plus one-sided rows for the
# first/last two nodes, all O(h^4) except the outermost rows which are the
# standard 5-point forward/backward second-derivative formulas (O(h^3)).
_CENTRAL = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_EDGE0 = np.array([35.0, -104.0, 114.0, -56.0, 11.0]) / 12.0
_EDGE1 = np.array([11.0, -20.0, 6.0, 4.0, -1.0]) / 12.0


def stencil_second_derivative(values: NDArray[np.float64], h: float) -> NDArray[np.float64]:
    """Second derivative of uniformly sampled values via 5-point stencils."""
    y = np.asarray(values, dtype=float)
    if y.size < 5:
        raise ContractViolation("second derivative needs at least 5 nodes")
    out = np.empty_like(y)
    out[2:-2] = np.convolve(y, _CENTRAL[::-1], mode="valid")
    out[0] = np.dot(_EDGE0, y[:5])
    out[1] = np.dot(_EDGE1, y[:5])
    out[-1] = np.dot(_EDGE0, y[-1:-6:-1])
    out[-2] = np.dot(_EDGE1, y[-1:-6:-1])
    return out / (h * h)


def _fix_signs(vectors: NDArray[np.float64]) -> NDArray[np.float64]:
    """Deterministic sign convention: first non-negligible component positive."""
    vectors = np.array(vectors, copy=True)
    for j in range(vectors.shape[1]):
        col = vectors[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12 * np.max(np.abs(col)))[0]
        if nz.size and col[nz[0]] < 0:
            vectors[:, j] = -col
    return vectors


def eig_sym_tridiag(diag, offdiag, vectors: bool = False, n_lowest: int | None = None):
    """Eigenvalues (ascending) of a symmetric tridiagonal matrix.

    Returns (values,) or (values, vectors). Vectors have unit Euclidean norm
    and a deterministic sign (first nonzero component positive).
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    if diag.size < 2 or offdiag.size != diag.size - 1:
        raise ContractViolation("tridiagonal matrix must have dimension >= 2")
    try:
        if n_lowest is not None:
            vals, vecs = sla.eigh_tridiagonal(
                diag, offdiag, select="i", select_range=(0, n_lowest - 1)
            )
        elif vectors:
            vals, vecs = sla.eigh_tridiagonal(diag, offdiag)
        else:
            vals = sla.eigh_tridiagonal(diag, offdiag, eigvals_only=True)
            return (vals,)
    except (sla.LinAlgError, ValueError) as exc:
        raise NumericalError(f"tridiagonal eigensolve failed: {exc}") from exc
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = _fix_signs(vecs[:, order])
    return vals, vecs


def eig_sym_dense(matrix, asym_tol: float = 1e-10):
    """Eigendecomposition of a symmetric dense matrix, ascending eigenvalues."""
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractViolation("matrix must be square")
    scale = max(np.max(np.abs(a)), 1e-300)
    asym = np.max(np.abs(a - a.T)) / scale
    if asym > asym_tol:
        raise ContractViolation(f"matrix asymmetry {asym:.3e} exceeds {asym_tol:.1e}")
    a = 0.5 * (a + a.T)
    try:
        vals, vecs = sla.eigh(a)
    except sla.LinAlgError as exc:
        raise NumericalError(f"dense eigensolve failed: {exc}") from exc
    return vals, _fix_signs(vecs)
