"""Gaussian quadrature from Jacobi matrices, classical and modified."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import ConvergenceError, DomainError
from .recurrence import SymBanded, jacobi_matrix

__all__ = ["QuadratureRule", "golub_welsch", "modified_rule", "gauss_rule"]

MAX_SWEEPS = 50


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    mass: float

    def __len__(self):
        return self.nodes.size

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def golub_welsch(X: SymBanded, mass: float) -> QuadratureRule:
    """Nodes and weights from a symmetric tridiagonal Jacobi section."""
    if X.bandwidth > 1:
        raise DomainError("golub_welsch needs a tridiagonal matrix")
    if not mass > 0:
        raise DomainError("mass must be positive")
    n = X.size
    if n < 1:
        raise DomainError("empty Jacobi matrix")
    d = X.bands[0].copy()
    e = np.zeros(n)
    if X.bandwidth == 1:
        e[: n - 1] = X.bands[1, : n - 1]
    lam, z, info = K.tql_first(d, e, MAX_SWEEPS)
    if info >= 0:
        raise ConvergenceError(f"QL iteration did not converge for eigenvalue {info}")
    order = np.argsort(lam, kind="stable")
    # first components of an orthonormal eigenbasis; renormalized so the
    # weights sum to the mass up to rounding
    z2 = z[order] ** 2
    w = mass * (z2 / z2.sum())
    return QuadratureRule(lam[order].copy(), w, float(mass))


def gauss_rule(family, n: int) -> QuadratureRule:
    """Classical n-point Gauss rule of a family."""
    return golub_welsch(jacobi_matrix(family, n), family.mass)


def modified_rule(family, u_coeffs, v_coeffs, n: int, eps: float = 1e-14, case="auto",
                  nmax: int = 2 ** 20) -> QuadratureRule:
    """n-point Gauss rule for ``(u/v) dmu`` via the connection problem."""
    from .modify import connect, modified_jacobi

    cf = connect(family, u_coeffs, v_coeffs, n + 1, eps=eps, case=case, nmax=nmax)
    XQ = modified_jacobi(cf, jacobi_matrix(family, n + 1), n + 1)
    return golub_welsch(XQ, cf.modified_mass(family.mass))
