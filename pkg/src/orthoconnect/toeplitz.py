"""Closed forms for the tridiagonal Toeplitz operator ``v(x) = alpha + 2 beta x``.

On second-kind Chebyshev polynomials ``v(X)`` is the symmetric tridiagonal
Toeplitz operator with diagonal ``alpha`` and off-diagonal ``beta``.  Infinite
and finite QL and reverse Cholesky factors are available explicitly, together
with truncation sizes that certify the leading section.  Negative ``beta`` is
reduced to positive ``beta`` by conjugation with ``diag((-1)^i)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "ToeplitzModel", "InfiniteQL", "FiniteQL", "infinite_ql", "finite_ql",
    "infinite_reverse_cholesky", "finite_reverse_cholesky", "ql_window_bound",
    "rc_window_bound", "finite_ql_explicit",
]


@dataclass(frozen=True)
class ToeplitzModel:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.beta != 0 and self.alpha > 2 * abs(self.beta)):
            raise DomainError(f"need alpha > 2|beta| > 0 (got alpha={self.alpha}, beta={self.beta}); "
                              "no orthogonal QL exists otherwise")

    @property
    def disc(self) -> float:
        return math.sqrt(self.alpha ** 2 - 4 * self.beta ** 2)

    @property
    def rho(self) -> float:
        return (self.alpha + self.disc) / (2 * abs(self.beta))

    @property
    def norm_L(self) -> float:
        """Two-norm of either infinite factor, sqrt(alpha + 2|beta|)."""
        return math.sqrt(self.alpha + 2 * abs(self.beta))

    def section(self, N: int) -> np.ndarray:
        """Bands of the N x N section in diagonal-major storage."""
        out = np.zeros((2, N))
        out[0] = self.alpha
        out[1, : N - 1] = self.beta
        return out

    def _flip(self) -> float:
        return 1.0 if self.beta > 0 else -1.0


@dataclass(frozen=True)
class InfiniteQL:
    s: float
    c: float
    corner: float
    diag: float
    sub1: float
    sub2: float


@dataclass(frozen=True)
class FiniteQL:
    """Rotations ``s[i], c[i]`` act in plane ``(i, i+1)``; ``bands`` is L_N."""
    s: np.ndarray
    c: np.ndarray
    bands: np.ndarray


def infinite_ql(model: ToeplitzModel) -> InfiniteQL:
    a, b, D = model.alpha, abs(model.beta), model.disc
    A = a + D
    sg = model._flip()
    return InfiniteQL(s=sg * 2 * b / A, c=math.sqrt(2 * D / A), corner=math.sqrt(A * D / 2),
                      diag=A / 2, sub1=sg * 2 * b, sub2=2 * b * b / A)


def _ratio_sequences(alpha: float, beta: float, kmax: int):
    """r_k = a_{k+1}/a_k and q_k = (sum_{j<=k} a_j^2)/a_k^2 for k = 1..kmax."""
    r = np.empty(kmax + 1)
    q = np.empty(kmax + 1)
    r[1] = alpha / beta
    q[1] = 1.0
    for k in range(2, kmax + 1):
        r[k] = alpha / beta - 1.0 / r[k - 1]
        q[k] = q[k - 1] / r[k - 1] ** 2 + 1.0
    return r, q


def finite_ql(model: ToeplitzModel, N: int) -> FiniteQL:
    """QL factors of the N x N section from the closed-form rotations."""
    if N < 2:
        raise DomainError("N must be at least 2")
    a, b = model.alpha, abs(model.beta)
    r, q = _ratio_sequences(a, b, N)
    # 1-based rotation index N-k for k = 1..N-1; stored 0-based at plane N-1-k
    s = np.zeros(N)
    c = np.ones(N)
    for k in range(1, N):
        den = q[k] + r[k] ** 2
        s[N - 1 - k] = math.sqrt(q[k] / den)
        c[N - 1 - k] = math.sqrt(r[k] ** 2 / den)
    # s[N-1] = 0, c[N-1] = 1 play the role of s_N, c_N
    bands = _finite_ql_bands(a, b, s, c, N)
    sg = model._flip()
    bands[1] *= sg
    return FiniteQL(sg * s[: N - 1], c[: N - 1], bands)


def _finite_ql_bands(a, b, s, c, N):
    # 1-based formulas with s_k -> s[k-1]
    L = np.zeros((3, N))
    cc = np.r_[c, 1.0]
    L[0, 0] = c[0] * a - s[0] * cc[1] * b
    for k in range(2, N + 1):
        L[0, k - 1] = math.hypot(cc[k - 1] * a - s[k - 1] * cc[k] * b if k < N else a, b)
    for k in range(1, N):
        L[1, k - 1] = s[k - 1] * a + c[k - 1] * cc[k] * b
    for k in range(1, N - 1):
        L[2, k - 1] = s[k] * b
    return L


def finite_ql_explicit(model: ToeplitzModel, N: int) -> FiniteQL:
    """Same as :func:`finite_ql` but with a_j from explicit rho powers (small N)."""
    a, b = model.alpha, abs(model.beta)
    rho = model.rho
    j = np.arange(1, N + 1, dtype=float)
    aj = b * b / model.disc * (rho ** j - rho ** -j)
    S = np.cumsum(aj ** 2)
    s = np.zeros(N)
    c = np.ones(N)
    for k in range(1, N):
        s[N - 1 - k] = math.sqrt(S[k - 1] / S[k])
        c[N - 1 - k] = math.sqrt(aj[k] ** 2 / S[k])
    bands = _finite_ql_bands(a, b, s, c, N)
    sg = model._flip()
    bands[1] *= sg
    return FiniteQL(sg * s[: N - 1], c[: N - 1], bands)


def infinite_reverse_cholesky(model: ToeplitzModel):
    """``(l_d, l_o)`` of the bidiagonal reverse Cholesky factor."""
    A = model.alpha + model.disc
    return math.sqrt(A / 2), model.beta * math.sqrt(2 / A)


def finite_reverse_cholesky(model: ToeplitzModel, N: int):
    """Diagonal and sub-diagonal of ``L_N`` with ``V_N = L_N^T L_N``.

    Returned arrays are in row order (top to bottom); ``d_k`` is indexed from
    the bottom-right corner.
    """
    a, b = model.alpha, model.beta
    d = np.empty(N)
    d[0] = a
    for k in range(1, N):
        d[k] = a - b * b / d[k - 1]
    diag = np.sqrt(d)[::-1].copy()
    sub = (b / np.sqrt(d[: N - 1]))[::-1].copy()
    return diag, sub


def d_sequence(model: ToeplitzModel, kmax: int) -> np.ndarray:
    a, b = model.alpha, model.beta
    d = np.empty(kmax + 1)
    d[0] = a
    for k in range(1, kmax + 1):
        d[k] = a - b * b / d[k - 1]
    return d


def ql_window_bound(model: ToeplitzModel, n: int, eps: float) -> int:
    """Smallest integer N certifying the QL criterion for the leading n rows."""
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    rho = model.rho
    x = (rho - 1 / rho) / (2 * eps)
    bound = n + math.asinh(x) / math.log(rho) - 1
    return int(math.floor(bound)) + 1


def rc_window_bound(model: ToeplitzModel, n: int, eps: float) -> int:
    """Smallest integer N giving an eps-accurate reverse Cholesky section."""
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    rho = model.rho
    b = abs(model.beta)
    bound = n + math.log(2 / eps * math.sqrt(b / (model.alpha + 2 * b))) / math.log(rho) - 0.5
    return int(math.floor(bound)) + 1
