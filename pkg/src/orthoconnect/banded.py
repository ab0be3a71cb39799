"""Finite banded factorizations: Cholesky, reverse Cholesky, QR and QL.

Rotation convention: ``G_i(c, s)`` acts in the ``(i, i+1)`` plane with block
``[[c, s], [-s, c]]``.  A :class:`GivensSeq` with rotations ``G_1..G_K`` and
signs ``D`` stands for ``Q = G_1 G_2 ... G_K D``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as K
from .errors import DomainError, NotPositiveDefiniteError, RankDeficientError, SingularError
from .recurrence import SymBanded, TriBanded

__all__ = [
    "GivensSeq", "cholesky_banded", "reverse_cholesky_banded", "qr_banded",
    "ql_banded", "solve_tri", "apply_givens", "flip_bands",
]


@dataclass
class GivensSeq:
    idx: np.ndarray
    c: np.ndarray
    s: np.ndarray
    dimension: int
    signs: Optional[np.ndarray] = None

    def __post_init__(self):
        self.idx = np.asarray(self.idx, dtype=np.int64)
        self.c = np.asarray(self.c, dtype=float)
        self.s = np.asarray(self.s, dtype=float)
        if self.signs is None:
            self.signs = np.ones(0)
        if self.idx.size and (self.idx.min() < 0 or self.idx.max() + 1 >= self.dimension):
            raise DomainError("rotation plane outside the dimension")

    @classmethod
    def from_list(cls, rotations, dimension):
        rot = list(rotations)
        if not rot:
            return cls(np.zeros(0, np.int64), np.zeros(0), np.zeros(0), dimension)
        i, c, s = zip(*rot)
        return cls(np.array(i), np.array(c), np.array(s), dimension)

    @property
    def rotations(self):
        return list(zip(self.idx.tolist(), self.c.tolist(), self.s.tolist()))

    def __len__(self):
        return self.idx.size

    def apply(self, B, transpose: bool = False) -> np.ndarray:
        return apply_givens(self, transpose, B)

    def todense(self) -> np.ndarray:
        return self.apply(np.eye(self.dimension))


def apply_givens(Q: GivensSeq, transpose: bool, B) -> np.ndarray:
    """``Q @ B`` (or ``Q.T @ B``) for a column block ``B``."""
    B = np.asarray(B, dtype=float)
    flat = B.ndim == 1
    B2 = np.ascontiguousarray(B[:, None] if flat else B)
    if B2.shape[0] != Q.dimension:
        raise DomainError(f"block has {B2.shape[0]} rows, rotations act on {Q.dimension}")
    out = K.apply_rotations(Q.idx, Q.c, Q.s, Q.signs, B2, bool(transpose))
    return out[:, 0] if flat else out


def flip_bands(bands: np.ndarray) -> np.ndarray:
    """Bands of ``J A J`` (J the reversal) for diagonal-major storage."""
    n = bands.shape[1]
    out = np.zeros_like(bands)
    for d in range(bands.shape[0]):
        out[d, : n - d] = bands[d, : n - d][::-1]
    return out


def _sym_section(A, n: int) -> np.ndarray:
    if isinstance(A, SymBanded):
        if n > A.size:
            A = A.section(n)
        bands = A.bands[:, :n].copy()
        for d in range(1, bands.shape[0]):
            bands[d, max(n - d, 0):] = 0.0
        return np.ascontiguousarray(bands)
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("expected a SymBanded or a square array")
    A = A[:n, :n]
    b = _bandwidths(A)[1]
    out = np.zeros((b + 1, n))
    for d in range(b + 1):
        out[d, : n - d] = np.diagonal(A, d)
    return out


def _bandwidths(A: np.ndarray):
    nz = np.argwhere(A != 0)
    if nz.size == 0:
        return 0, 0
    diff = nz[:, 1] - nz[:, 0]
    return int(max(0, -diff.min())), int(max(0, diff.max()))


def cholesky_banded(A, n: Optional[int] = None) -> TriBanded:
    """Upper ``R`` with ``R^T R = A`` on the leading n x n section."""
    n = A.size if n is None and isinstance(A, SymBanded) else (n or np.shape(A)[0])
    bands = _sym_section(A, n)
    R, info = K.chol_upper(bands)
    if info >= 0:
        raise NotPositiveDefiniteError(info)
    return TriBanded(R, "upper")


def reverse_cholesky_banded(A, n: Optional[int] = None) -> TriBanded:
    """Lower ``L`` with ``L^T L = A``, eliminating from the bottom-right corner."""
    n = A.size if n is None and isinstance(A, SymBanded) else (n or np.shape(A)[0])
    bands = flip_bands(_sym_section(A, n))
    R, info = K.chol_upper(np.ascontiguousarray(bands))
    if info >= 0:
        raise NotPositiveDefiniteError(n - 1 - info,
                                       f"not positive definite: reverse pivot at index {n - 1 - info} "
                                       f"is not positive")
    return TriBanded(flip_bands(R), "lower")


def _window_from_sym(bands: np.ndarray, rows: int, cols: int, b: int) -> np.ndarray:
    """Row window (p = q = b) of the rows x cols slab of a symmetric band."""
    N = bands.shape[1]
    w = np.zeros((rows, 3 * b + 1))
    for k in range(2 * b + 1):
        d = k - b
        i = np.arange(rows)
        j = i + d
        ok = (j >= 0) & (j < cols) & (j < N) & (i < N)
        lo = np.minimum(i, j)[ok]
        w[i[ok], k] = bands[abs(d), lo]
    return w


def _window_from_dense(A: np.ndarray, p: int, q: int) -> np.ndarray:
    m, n = A.shape
    w = np.zeros((m, 2 * p + q + 1))
    for k in range(p + q + 1):
        i = np.arange(m)
        j = i - p + k
        ok = (j >= 0) & (j < n)
        w[i[ok], k] = A[i[ok], j[ok]]
    return w


def qr_banded(A, n: Optional[int] = None, rows: Optional[int] = None):
    """Givens QR of a banded section; returns ``(GivensSeq, TriBanded upper)``.

    ``A`` is a :class:`SymBanded` (factorizing its ``rows x n`` slab, default
    square) or a dense array whose band structure is detected.  With
    ``rows = n + bandwidth`` the factor equals the section of the factor of
    the infinite operator.
    """
    if isinstance(A, SymBanded):
        n = A.size if n is None else n
        rows = n if rows is None else rows
        if rows < n:
            raise DomainError("QR needs at least as many rows as columns")
        b = A.bandwidth
        src = A.section(max(rows, n)) if max(rows, n) > A.size else A
        w = _window_from_sym(src.bands, rows, n, b)
        p = q = b
    else:
        A = np.asarray(A, dtype=float)
        if n is not None:
            A = A[: (rows or A.shape[0]), :n]
        rows, n = A.shape
        if rows < n:
            raise DomainError("QR needs at least as many rows as columns")
        p, q = _bandwidths(A)
        w = _window_from_dense(A, p, q)
    R, idx, cs, sn, signs, info = K.qr_window(np.ascontiguousarray(w), p, q, rows, n)
    if info >= 0:
        raise RankDeficientError(info)
    sg = np.ones(rows)
    sg[:n] = signs
    Q = GivensSeq(idx.copy(), cs.copy(), sn.copy(), rows, sg if np.any(sg < 0) else None)
    return Q, TriBanded(R, "upper")


def ql_banded(A, n: Optional[int] = None):
    """QL of a symmetric banded section; returns ``(GivensSeq, TriBanded lower)``.

    Computed as the QR factorization of the reversed matrix, so rotations are
    generated bottom-up: the first recorded rotation acts in the last plane.
    """
    n = A.size if n is None and isinstance(A, SymBanded) else (n or np.shape(A)[0])
    bands = flip_bands(_sym_section(A, n))
    b = bands.shape[0] - 1
    w = _window_from_sym(bands, n, n, b)
    R, idx, cs, sn, signs, info = K.qr_window(np.ascontiguousarray(w), b, b, n, n)
    if info >= 0:
        raise SingularError(f"singular section: column {n - 1 - info} has no pivot")
    Q = GivensSeq(n - 2 - idx, cs.copy(), -sn, n, signs[::-1].copy() if np.any(signs < 0) else None)
    return Q, TriBanded(flip_bands(R), "lower")


def solve_tri(T: TriBanded, rhs, transpose: bool = False) -> np.ndarray:
    """Solve ``T x = rhs`` (or ``T^T x = rhs``) by banded substitution."""
    if not isinstance(T, TriBanded):
        raise DomainError("solve_tri expects a TriBanded")
    return T.solve(rhs, transpose=transpose)
