"""Connection coefficients for polynomial, reciprocal and rational modifications.

Every connection matrix is stored in factored form ``R = S L^{-T}`` with ``S``
upper banded (or the identity) and ``L`` lower banded (or absent):

=============  ================================  ==========================
case           factorization                     S, L
=============  ================================  ==========================
poly           ``U = R^T R``                     R, none
sqrt_poly      ``sqrt(U) = Q R``                 R, none
reciprocal_rc  ``V = L^T L``                     I, L
reciprocal_ql  ``sqrt(V) = Q L``                 I, L
rational1      ``V = Q L``, ``Q^T U L^T = S^T S``  S, L
rational2      ``V = L^T L``, ``L U L^{-1} = S^T S``  S, L
=============  ================================  ==========================
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.sparse as sp
from numba import njit

from . import _kernels as K
from .banded import GivensSeq, cholesky_banded, qr_banded
from .errors import BandwidthError, DomainError, NumericalError
from .infdim import NMAX_DEFAULT, adaptive_ql, adaptive_reverse_cholesky
from .recurrence import SymBanded, TriBanded, _trim, jacobi_matrix, op_poly

__all__ = [
    "ConnectionFactors", "connect", "connect_poly", "connect_sqrt_poly", "connect_reciprocal",
    "connect_rational_case1", "connect_rational_case2", "connection_diagonals",
    "modified_jacobi", "modified_family", "convert_coeffs", "is_m_matrix", "evaluate_modified",
]

CASES = ("poly", "sqrt_poly", "reciprocal_rc", "reciprocal_ql", "rational1", "rational2", "constant")
ASYM_TOL = 1e-8
BAND_TOL = 1e-10


@dataclass
class ConnectionFactors:
    """Factored connection ``P = Q R`` with ``R = S L^{-T}``.

    ``S`` is None for the reciprocal cases and ``L`` is None for the polynomial
    ones.  ``scale`` multiplies ``R`` (used by the constant short-circuit).
    ``extra`` keeps diagnostics: window factors, the Cholesky input, etc.
    """

    case: str
    n: int
    eps: float
    S: Optional[TriBanded] = None
    L: Optional[TriBanded] = None
    Q: Optional[GivensSeq] = None
    window: int = 0
    criterion: float = 0.0
    scale: float = 1.0
    extra: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.case not in CASES:
            raise DomainError(f"unknown connection case {self.case!r}")

    def _sections(self, m: int):
        if m > self.n:
            raise DomainError(f"requested size {m} exceeds certified size {self.n}")
        S = self.S.section(m) if self.S is not None else None
        L = self.L.section(m) if self.L is not None else None
        return S, L

    def apply_R(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        S, L = self._sections(f.shape[0])
        y = L.solve(f, transpose=True) if L is not None else f.copy()
        y = S.matvec(y) if S is not None else y
        return self.scale * y

    def apply_Rinv(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=float)
        S, L = self._sections(g.shape[0])
        y = S.solve(g) if S is not None else g.copy()
        y = L.matvec(y, transpose=True) if L is not None else y
        return y / self.scale

    def dense_R(self, m: Optional[int] = None) -> np.ndarray:
        m = self.n if m is None else m
        return self.apply_R(np.eye(m))

    def dense_Rinv(self, m: Optional[int] = None) -> np.ndarray:
        m = self.n if m is None else m
        return self.apply_Rinv(np.eye(m))

    def modified_mass(self, mass: float) -> float:
        """Total mass of the modified measure, ``mu_0 R_00^2``."""
        r0 = connection_diagonals(self)[0][0]
        return mass * r0 * r0


# ---------------------------------------------------------------------------
# helpers


def _value_of_constant(family, c) -> float:
    return float(c[0]) / math.sqrt(family.mass)


def _csr_section(A: SymBanded, rows: int, cols: int) -> sp.csr_matrix:
    N = max(rows, cols)
    return A.section(N).to_sparse()[:rows, :cols]


def _lower_csr(L: TriBanded, rows: int, cols: int) -> sp.csr_matrix:
    n = L.size
    data, offs = [], []
    for d in range(L.bandwidth + 1):
        data.append(L.bands[d, : n - d])
        offs.append(-d)
    M = sp.diags(data, offs, shape=(n, n), format="csr")
    return M[:rows, :cols]


def _to_window(X: sp.spmatrix, rows: int, lo: int, hi: int) -> np.ndarray:
    X = X.tocoo()
    w = np.zeros((rows, lo + hi + 1))
    k = X.col - X.row + lo
    ok = (X.row < rows) & (k >= 0) & (k <= lo + hi)
    if np.any(~ok & (X.data != 0)):
        raise BandwidthError("operand exceeds the working window")
    np.add.at(w, (X.row[ok], k[ok]), X.data[ok])
    return w


def _symmetric_bands(w: np.ndarray, lo: int, n: int, band: int, what: str):
    """Symmetrize the n x n section stored in a row window and trim its band."""
    width = w.shape[1]
    scale = np.abs(w[:n]).max() if n else 0.0
    scale = scale if scale > 0 else 1.0
    asym = 0.0
    out = np.zeros((band + 1, n))
    out[0] = w[:n, lo]
    for d in range(1, min(lo, width - 1 - lo, n - 1) + 1):
        up = w[: n - d, lo + d] if lo + d < width else np.zeros(n - d)
        dn = w[d:n, lo - d]
        if d <= band:
            out[d, : n - d] = 0.5 * (up + dn)
            asym = max(asym, np.abs(up - dn).max(initial=0.0))
        else:
            tail = max(np.abs(up).max(initial=0.0), np.abs(dn).max(initial=0.0))
            if tail > BAND_TOL * scale:
                raise BandwidthError(f"{what}: entry {tail:.3e} outside band {band} "
                                     f"(scale {scale:.3e})")
    if asym > ASYM_TOL * scale:
        raise NumericalError(f"{what}: asymmetry {asym:.3e} exceeds {ASYM_TOL:g} relative; "
                             "window insufficient")
    return out, asym / scale


@njit(cache=True)
def _right_solve_rows(lb, yw, lo, hi, n, margin):
    """Rows of ``Z = Y L^{-1}`` for a row-windowed ``Y`` (width lo+hi+1).

    Each row is back-substituted from its last nonzero down to ``margin``
    entries below the expected band; the result uses the window
    ``zw[i, t] = Z[i, i - (lo + margin) + t]`` truncated to columns < n.
    """
    nb, size = lb.shape
    zl = lo + margin
    width = zl + hi + 1
    zw = np.zeros((n, width))
    for i in range(n):
        top = min(i + hi, size - 1)
        bottom = max(0, i - zl)
        for k in range(top, bottom - 1, -1):
            t = k - i + lo
            acc = yw[i, t] if 0 <= t < yw.shape[1] else 0.0
            for d in range(1, nb):
                if k + d <= top:
                    acc -= lb[d, k] * zw[i, k + d - i + zl]
            zw[i, k - i + zl] = acc / lb[0, k]
    return zw


# ---------------------------------------------------------------------------
# the six connection problems


def connect_poly(family, u_coeffs, n: int, eps: float = 1e-14) -> ConnectionFactors:
    """Christoffel modification ``u dmu`` via Cholesky of ``u(X_P)``."""
    U = op_poly(family, u_coeffs, n)
    R = cholesky_banded(U, n)
    return ConnectionFactors("poly", n, eps, S=R, extra={"U": U})


def connect_sqrt_poly(family, sqrt_u_coeffs, n: int, eps: float = 1e-14) -> ConnectionFactors:
    """Modification by ``u = (sqrt u)^2`` via QR of ``sqrt(u)(X_P)``."""
    c = _trim(sqrt_u_coeffs)
    b = len(c) - 1
    A = op_poly(family, c, n + b)
    Q, R = qr_banded(A, n, rows=n + b)
    return ConnectionFactors("sqrt_poly", n, eps, S=R, Q=Q, extra={"sqrtU": A})


def connect_reciprocal(family, v_coeffs, n: int, eps: float = 1e-14, method: str = "reverse_cholesky",
                       nmax: int = NMAX_DEFAULT) -> ConnectionFactors:
    """Geronimus-type modification ``dmu / v``.

    ``method="reverse_cholesky"`` factors ``V = L^T L``; ``method="ql"``
    expects the coefficients of ``sqrt(v)`` and factors ``sqrt(V) = Q L``.
    """
    V = op_poly(family, v_coeffs, n)
    if method in ("reverse_cholesky", "rc"):
        res = adaptive_reverse_cholesky(V, n, eps, nmax)
        case = "reciprocal_rc"
    elif method == "ql":
        res = adaptive_ql(V, n, eps, nmax)
        case = "reciprocal_ql"
    else:
        raise DomainError(f"unknown method {method!r}")
    return ConnectionFactors(case, n, eps, L=res.factor_n, Q=res.q_window, window=res.window,
                             criterion=res.criterion_value,
                             extra={"V": V, "L_window": res.factor_window, "history": res.history})


def connect_rational_case1(family, u_coeffs, v_coeffs, n: int, eps: float = 1e-14,
                           nmax: int = NMAX_DEFAULT) -> ConnectionFactors:
    """``r = u/v`` through ``V = Q L`` and the Cholesky of ``Q^T U L^T``."""
    u = _trim(u_coeffs)
    du, dv = len(u) - 1, len(_trim(v_coeffs)) - 1
    V = op_poly(family, v_coeffs, n)
    res = adaptive_ql(V, n, eps, nmax)
    try:
        M, asym = _case1_cholesky_input(family, u, du, dv, n, res)
    except NumericalError:
        # one more doubling before giving up
        from .banded import ql_banded
        N2 = 2 * res.window
        if N2 > nmax:
            raise
        Q2, L2 = ql_banded(V.section(N2))
        res.q_window, res.factor_window, res.window = Q2, L2, N2
        res.factor_n = L2.section(n)
        M, asym = _case1_cholesky_input(family, u, du, dv, n, res)
    S = cholesky_banded(SymBanded(M), n)
    return ConnectionFactors("rational1", n, eps, S=S, L=res.factor_n, Q=res.q_window,
                             window=res.window, criterion=res.criterion_value,
                             extra={"M": M, "asymmetry": asym, "V": V,
                                    "L_window": res.factor_window, "history": res.history})


def _case1_cholesky_input(family, u, du, dv, n, res):
    N = res.window
    rows = min(N, n + du + dv + 1)
    U = op_poly(family, u, rows)
    Lw = res.factor_window
    X = _csr_section(U, rows, n) @ _lower_csr(Lw, n, n).T
    lo = hi = du + 2 * dv + 1
    w = _to_window(X, rows, lo, hi)
    Q = res.q_window
    K.apply_rotations_window(Q.idx, Q.c, Q.s, Q.signs, w, lo, n)
    return _symmetric_bands(w, lo, n, du + dv, "rational case 1")


def connect_rational_case2(family, u_coeffs, v_coeffs, n: int, eps: float = 1e-14,
                           nmax: int = NMAX_DEFAULT) -> ConnectionFactors:
    """``r = u/v`` through ``V = L^T L`` and the Cholesky of ``L U L^{-1}``."""
    u = _trim(u_coeffs)
    du, dv = len(u) - 1, len(_trim(v_coeffs)) - 1
    V = op_poly(family, v_coeffs, n + du)
    res = adaptive_reverse_cholesky(V, n + du, eps, nmax)
    L = res.factor_n
    U = op_poly(family, u, n + du)
    Y = _lower_csr(L, n, n) @ _csr_section(U, n, n + du)
    lo, hi = du + dv, du
    yw = _to_window(Y, n, lo, hi)
    margin = dv + 1
    zw = _right_solve_rows(np.ascontiguousarray(L.bands), yw, lo, hi, n, margin)
    M, asym = _symmetric_bands(zw, lo + margin, n, du, "rational case 2")
    S = cholesky_banded(SymBanded(M), n)
    return ConnectionFactors("rational2", n, eps, S=S, L=L.section(n), window=res.window,
                             criterion=res.criterion_value,
                             extra={"M": M, "asymmetry": asym, "V": V,
                                    "L_window": res.factor_window, "history": res.history})


def connect(family, u_coeffs=(1.0,), v_coeffs=(1.0,), n: int = 64, eps: float = 1e-14,
            case="auto", nmax: int = NMAX_DEFAULT, sqrt_u=None, sqrt_v=None) -> ConnectionFactors:
    """Dispatch ``r = u/v`` (or square roots thereof) to the appropriate case.

    ``u_coeffs``/``v_coeffs`` are expansion coefficients in the family's
    basis; ``sqrt_u``/``sqrt_v`` instead supply ``sqrt(u)``/``sqrt(v)`` and
    select the QR/QL rows.  ``case`` picks the rational variant: 1, 2 or auto
    (which means 2).
    """
    if sqrt_u is not None and sqrt_v is not None:
        raise DomainError("supply at most one of sqrt_u, sqrt_v")
    if sqrt_u is not None:
        if len(_trim(v_coeffs)) != 1:
            raise DomainError("sqrt_u is only supported with constant v")
        vc = _value_of_constant(family, _trim(v_coeffs))
        return connect_sqrt_poly(family, np.asarray(_trim(sqrt_u)) / math.sqrt(vc), n, eps)
    if sqrt_v is not None:
        if len(_trim(u_coeffs)) != 1:
            raise DomainError("sqrt_v is only supported with constant u")
        uc = _value_of_constant(family, _trim(u_coeffs))
        return connect_reciprocal(family, np.asarray(_trim(sqrt_v)) / math.sqrt(uc), n, eps,
                                  method="ql", nmax=nmax)
    u, v = _trim(u_coeffs), _trim(v_coeffs)
    if len(u) == 1 and len(v) == 1:
        ratio = _value_of_constant(family, u) / _value_of_constant(family, v)
        if not ratio > 0:
            raise NumericalError("constant modification must be positive")
        return ConnectionFactors("constant", n, eps, scale=math.sqrt(ratio))
    if len(v) == 1:
        return connect_poly(family, u / _value_of_constant(family, v), n, eps)
    if len(u) == 1:
        return connect_reciprocal(family, v / _value_of_constant(family, u), n, eps, nmax=nmax)
    case = str(case)
    if case in ("1", "rational1"):
        return connect_rational_case1(family, u, v, n, eps, nmax)
    if case in ("2", "auto", "rational2"):
        return connect_rational_case2(family, u, v, n, eps, nmax)
    raise DomainError(f"unknown rational case {case!r}")


# ---------------------------------------------------------------------------
# downstream


def connection_diagonals(cf: ConnectionFactors):
    """Main and first super-diagonal of the full connection matrix R."""
    n = cf.n
    s0 = cf.S.bands[0, :n] if cf.S is not None else np.ones(n)
    s1 = cf.S.diagonal(1)[: n - 1] if cf.S is not None else np.zeros(n - 1)
    if cf.L is None:
        return cf.scale * s0.copy(), cf.scale * np.asarray(s1, dtype=float)
    l0 = cf.L.bands[0, :n]
    l1 = cf.L.diagonal(1)[: n - 1]
    rd = s0 / l0
    rs = (s1 - rd[:-1] * l1) / l0[1:]
    return cf.scale * rd, cf.scale * rs


def modified_jacobi(cf: ConnectionFactors, X_P: SymBanded, n: Optional[int] = None) -> SymBanded:
    """(n-1) x (n-1) Jacobi matrix of the modified family from R's diagonals."""
    n = cf.n if n is None else n
    if n < 2:
        raise DomainError("need n >= 2 to recover a Jacobi matrix")
    rd, rs = connection_diagonals(cf)
    rd, rs = rd[:n], rs[: n - 1]
    X = X_P.section(n)
    a = X.bands[0, :n]
    b = X.bands[1, : n - 1]
    m = n - 1
    # written as corrections to X_P so a scalar R reproduces X_P exactly
    off = (rd[1:m] / rd[: m - 1]) * b[: m - 1]
    diag = a[:m].copy()
    diag[0] += rs[0] * b[0] / rd[0]
    for i in range(1, m):
        diag[i] += (rs[i] * b[i] - off[i - 1] * rs[i - 1]) / rd[i]
    bands = np.zeros((2, m))
    bands[0] = diag
    bands[1, : m - 1] = off
    return SymBanded(bands)


def modified_family(cf: ConnectionFactors, family, n: Optional[int] = None):
    """The modified family as tabulated recurrence data of size n-1."""
    from .recurrence import TabulatedFamily

    X = modified_jacobi(cf, jacobi_matrix(family, cf.n if n is None else n), n)
    m = X.size
    return TabulatedFamily(X.bands[0].copy(), X.bands[1, : m - 1].copy(),
                           cf.modified_mass(family.mass), label=f"modified {family}")


def convert_coeffs(cf: ConnectionFactors, coeffs, direction: str = "original_to_modified") -> np.ndarray:
    """Map expansion coefficients between the two bases.

    ``original_to_modified`` applies R (``f = P c = Q (R c)``) and
    ``modified_to_original`` applies R^{-1}.
    """
    if direction == "original_to_modified":
        return cf.apply_R(coeffs)
    if direction == "modified_to_original":
        return cf.apply_Rinv(coeffs)
    raise DomainError(f"unknown direction {direction!r}")


def is_m_matrix(T, tol: float = 1e-14):
    """``(True, None)`` if diagonal > 0 and off-diagonal <= tol, else the violation.

    Accepts a TriBanded, SymBanded or dense array; the violation is reported
    as ``(False, (i, j))``.
    """
    if isinstance(T, (TriBanded, SymBanded)):
        A = T.todense()
    else:
        A = np.asarray(T, dtype=float)
    d = np.diagonal(A)
    bad = np.flatnonzero(~(d > 0))
    if bad.size:
        return False, (int(bad[0]), int(bad[0]))
    off = A - np.diag(d)
    pos = np.argwhere(off > tol)
    if pos.size:
        i, j = pos[0]
        return False, (int(i), int(j))
    return True, None


def evaluate_modified(family, cf: ConnectionFactors, coeffs, points) -> np.ndarray:
    """Evaluate ``sum_k coeffs[k] q_k`` through ``Q g = P (R^{-1} g)``."""
    from .recurrence import clenshaw_eval

    return clenshaw_eval(family, cf.apply_Rinv(np.asarray(coeffs, dtype=float)), points)
