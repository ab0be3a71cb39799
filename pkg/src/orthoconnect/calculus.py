"""Banded differentiation, integration and weak-form matrices.

Weights are labelled by exponent triples ``(a_u, a_v, b)`` standing for
``u^a_u v^a_v sigma^b w``; for example ``(1, -1, 0)`` is the rational
modification ``(u/v) w`` and ``(2, 0, 1)`` is ``u^2 sigma w``.  A
:class:`DiffMatrix` maps coefficients in the source basis to coefficients of
the derivative in the target basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from numba import njit

from .errors import BandwidthError, DomainError, SingularError
from .modify import ConnectionFactors, connect, connect_poly, connect_sqrt_poly, modified_family
from .recurrence import (SymBanded, TriBanded, _leading_signs, _trim, clenshaw_eval,
                         coeffs_of_polynomial)

__all__ = ["DiffMatrix", "Antiderivative", "classical_diff", "modified_diff", "higher_diff_chain",
           "integration_pinv", "weak_laplacian"]

TAIL_TOL = 1e-10


@dataclass
class DiffMatrix:
    """Strictly upper banded n x n section: ``bands[d-1, i] = D[i, i+d]``."""

    bands: np.ndarray
    source: tuple = (0, 0, 0)
    target: tuple = (0, 0, 1)
    source_family: object = None
    target_family: object = None
    tail: float = field(default=0.0, repr=False)

    @property
    def upper_bandwidth(self) -> int:
        return self.bands.shape[0]

    @property
    def size(self) -> int:
        return self.bands.shape[1]

    def section(self, n: int) -> "DiffMatrix":
        if n > self.size:
            raise DomainError(f"section {n} exceeds size {self.size}")
        b = self.bands[:, :n].copy()
        for d in range(1, self.upper_bandwidth + 1):
            b[d - 1, max(n - d, 0):] = 0.0
        return DiffMatrix(b, self.source, self.target, self.source_family, self.target_family, self.tail)

    def to_sparse(self) -> sp.csr_matrix:
        n = self.size
        data = [self.bands[d - 1, : n - d] for d in range(1, self.upper_bandwidth + 1)]
        offs = list(range(1, self.upper_bandwidth + 1))
        return sp.diags(data, offs, shape=(n, n), format="csr") if data else sp.csr_matrix((n, n))

    def todense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def matvec(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        m = c.shape[0]
        return self.section(m).to_sparse() @ c if m < self.size else self.to_sparse() @ c


@dataclass
class Antiderivative:
    """Right inverse of a DiffMatrix: first row zero, then the shifted block inverse.

    ``block`` is the upper triangular ``D[0:n, 1:n+1]``; applying the
    antiderivative to ``g`` (length n) gives ``[0, block^{-1} g]``.
    """

    block: TriBanded

    @property
    def size(self) -> int:
        return self.block.size

    def apply(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        n = g.shape[0]
        x = self.block.section(n).solve(g)
        return np.concatenate([np.zeros((1,) + g.shape[1:]), x])

    def todense(self) -> np.ndarray:
        """The (n+1) x n matrix."""
        return self.apply(np.eye(self.size))


# ---------------------------------------------------------------------------


def classical_diff(family, n: int) -> DiffMatrix:
    """``D P = P' D`` for a classical family, with ``P'`` orthonormal in sigma w."""
    if n < 1:
        raise DomainError("n must be positive")
    raised = family.raised()
    k = np.arange(1, n)
    lam = np.asarray(family.eigenvalue(k), dtype=float)
    if np.any(lam < 0):
        raise DomainError("negative Sturm-Liouville eigenvalue; invalid classical data")
    sgn = _leading_signs(family, n)[1:] * _leading_signs(raised, n)[: n - 1]
    bands = np.zeros((1, n))
    bands[0, : n - 1] = sgn * np.sqrt(lam)
    return DiffMatrix(bands, (0, 0, 0), (0, 0, 1), family, raised)


@njit(cache=True)
def _solve_rows_upper(yw, sb, n, width):
    """Rows of ``Z = Y S^{-1}`` for strictly upper Y and upper banded S.

    ``yw[i, t] = Y[i, i+t]``; the result ``zw[i, t] = Z[i, i+t]`` is computed
    for ``t < width`` only, which is exact when Z has upper bandwidth below it.
    """
    nb = sb.shape[0]
    zw = np.zeros((n, width))
    for i in range(n):
        for t in range(1, width):
            k = i + t
            if k >= n:
                break
            acc = yw[i, t] if t < yw.shape[1] else 0.0
            for d in range(1, nb):
                if t - d < 1:
                    break
                acc -= sb[d, k - d] * zw[i, t - d]
            zw[i, t] = acc / sb[0, k]
    return zw


def _upper_csr(T: TriBanded, n: int) -> sp.csr_matrix:
    T = T.section(n)
    data = [T.bands[d, : n - d] for d in range(T.bandwidth + 1)]
    return sp.diags(data, list(range(T.bandwidth + 1)), shape=(n, n), format="csr")


def _r_factor_csr(cf: ConnectionFactors, n: int) -> sp.csr_matrix:
    """R = scale * S for connections without a lower factor."""
    if cf.L is not None:
        raise DomainError("target connection must be polynomial")
    S = _upper_csr(cf.S, n) if cf.S is not None else sp.identity(n, format="csr")
    return cf.scale * S


def _compose(cf_target: ConnectionFactors, D: DiffMatrix, cf_source: ConnectionFactors, n: int,
             band: int, what: str) -> np.ndarray:
    """Bands of ``R_target D R_source^{-1}`` on the n x n section."""
    Y = _r_factor_csr(cf_target, n) @ D.section(n).to_sparse()
    if cf_source.L is not None:
        L = cf_source.L.section(n)
        data = [L.bands[d, : n - d] for d in range(L.bandwidth + 1)]
        Y = Y @ sp.diags(data, list(range(L.bandwidth + 1)), shape=(n, n), format="csr")
    Y = (Y / cf_source.scale).tocoo()
    width = band + 3
    wy = int(max(Y.col - Y.row, default=0)) + 1
    yw = np.zeros((n, max(wy, 1)))
    np.add.at(yw, (Y.row, Y.col - Y.row), Y.data)
    if np.any((Y.col <= Y.row) & (Y.data != 0)):
        raise BandwidthError(f"{what}: product is not strictly upper triangular")
    if cf_source.S is not None:
        sb = np.ascontiguousarray(cf_source.S.section(n).bands)
        zw = _solve_rows_upper(yw, sb, n, width)
    else:
        zw = np.zeros((n, width))
        m = min(width, yw.shape[1])
        zw[:, :m] = yw[:, :m]
        if yw.shape[1] > width and np.any(yw[:, width:]):
            raise BandwidthError(f"{what}: product exceeds the working window")
    scale = np.abs(zw).max()
    scale = scale if scale > 0 else 1.0
    tail = np.abs(zw[:, band + 1:]).max(initial=0.0) / scale
    if tail > TAIL_TOL:
        raise BandwidthError(f"{what}: relative entry {tail:.3e} beyond upper bandwidth {band}")
    out = np.ascontiguousarray(zw[:, 1: band + 1].T)
    for d in range(1, band + 1):
        out[d - 1, max(n - d, 0):] = 0.0
    return out, tail


def _coeffs_in(family_to, base_family, u, extra_mono=None) -> np.ndarray:
    deg = len(u) - 1 + (len(extra_mono) - 1 if extra_mono is not None else 0)

    def f(x):
        y = clenshaw_eval(base_family, u, x)
        if extra_mono is not None:
            y = y * np.polynomial.polynomial.polyval(x, extra_mono)
        return y

    return _trim(coeffs_of_polynomial(family_to, f, deg))


def modified_diff(family, u_coeffs=(1.0,), v_coeffs=(1.0,), n: int = 32, eps: float = 1e-14,
                  case="auto", nmax: int = 2 ** 20) -> DiffMatrix:
    """Derivative of the ``(u/v) w`` family into the ``u^2 sigma w`` family.

    Computed as ``R_sq D_classical R_rat^{-1}`` where ``R_rat`` connects to
    the rational modification and ``R_sq`` is the QR connection of the
    raised family under ``u^2``.
    """
    u, v = _trim(u_coeffs), _trim(v_coeffs)
    m = n + 1
    cf_s = connect(family, u, v, m, eps=eps, case=case, nmax=nmax)
    raised = family.raised()
    cf_t = connect_sqrt_poly(raised, _coeffs_in(raised, family, u), m, eps)
    band = (len(u) - 1) + (len(v) - 1) + 1
    bands, tail = _compose(cf_t, classical_diff(family, m), cf_s, m, band, "modified derivative")
    D = DiffMatrix(bands, (1, -1, 0), (2, 0, 1), modified_family(cf_s, family, m),
                   modified_family(cf_t, raised, m), tail)
    return D.section(n) if n < D.size else D


def higher_diff_chain(family, u_coeffs, n: int, k: int, eps: float = 1e-14) -> list:
    """``k`` successive derivative factors starting from the ``u w`` family.

    Entry ``j`` maps the ``u^{j+1} sigma^j w`` basis to the
    ``u^{j+2} sigma^{j+1} w`` basis; all connections are polynomial.
    """
    if k < 1:
        raise DomainError("k must be at least 1")
    u = _trim(u_coeffs)
    sigma = family.sigma
    deg = (len(u) - 1) + (len(sigma) - 1)
    M = n + 2 + (k + 1) * (deg + 2)
    raised = family.raised()
    band = len(u)
    cf_prev = connect_poly(family, u, M, eps)
    G_prev = modified_family(cf_prev, family, M)
    cf_next = connect_sqrt_poly(raised, _coeffs_in(raised, family, u), M, eps)
    G_next = modified_family(cf_next, raised, M)
    m = n + 1
    bands, tail = _compose(cf_next, classical_diff(family, m), cf_prev, m, band, "derivative 0")
    chain = [DiffMatrix(bands, (1, 0, 0), (2, 0, 1), G_prev, G_next, tail)]
    for j in range(1, k):
        # source G_j = G_next; its predecessor G_{j-1} = G_prev
        size_prev = G_prev.size - deg - 1
        cf_prev = connect_poly(G_prev, _coeffs_in(G_prev, family, u, sigma), size_prev, eps)
        size_next = G_next.size - deg - 1
        cf_next = connect_poly(G_next, _coeffs_in(G_next, family, u, sigma), size_next, eps)
        if min(size_prev, size_next) < m:
            raise DomainError("insufficient guard size for the derivative chain")
        bands, tail = _compose(cf_next, chain[-1], cf_prev, m, band, f"derivative {j}")
        G_new = modified_family(cf_next, G_next, size_next)
        chain.append(DiffMatrix(bands, (j + 1, 0, j), (j + 2, 0, j + 1), G_next, G_new, tail))
        G_prev, G_next = G_next, G_new
    return [D.section(n) for D in chain]


def integration_pinv(D: DiffMatrix, n: Optional[int] = None) -> Antiderivative:
    """Right inverse of the first n rows of D (needs D of size n+1)."""
    n = D.size - 1 if n is None else n
    if n + 1 > D.size:
        raise DomainError(f"need D of size {n + 1}, have {D.size}")
    ub = D.upper_bandwidth
    block = np.zeros((ub, n))
    for d in range(1, ub + 1):
        # block[i, i+d-1] = D[i, i+d]
        block[d - 1, : n - d + 1] = D.bands[d - 1, : n - d + 1]
    if np.any(block[0] == 0):
        raise SingularError("shifted derivative block is singular")
    return Antiderivative(TriBanded(block, "upper"))


def weak_laplacian(D: DiffMatrix, n: Optional[int] = None) -> SymBanded:
    """``D^T D`` on the n x n section, a symmetric positive semidefinite band."""
    n = D.size if n is None else n
    S = D.section(n).to_sparse()
    G = (S.T @ S).tocsr()
    b = max(D.upper_bandwidth - 1, 0)
    bands = np.zeros((b + 1, n))
    for d in range(b + 1):
        bands[d, : n - d] = G.diagonal(d)[: n - d]
    return SymBanded(bands)
