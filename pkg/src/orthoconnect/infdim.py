"""Adaptive finite-window QL and reverse Cholesky of banded operators.

A window of size N = 2n is factorized and doubled until the coupling block
``V_b`` between the window and its complement no longer influences the
leading n rows, measured by the perturbation criteria below.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .banded import GivensSeq, apply_givens, ql_banded, reverse_cholesky_banded
from .errors import ConvergenceError, DomainError
from .recurrence import SymBanded, TriBanded

__all__ = ["AdaptiveResult", "adaptive_ql", "adaptive_reverse_cholesky", "slab_two_norm",
           "coupling_slab", "ql_criterion", "rc_criterion"]

NMAX_DEFAULT = 2 ** 20


@dataclass
class AdaptiveResult:
    factor_n: TriBanded
    window: int
    criterion_value: float
    factor_window: TriBanded
    q_window: Optional[GivensSeq] = None
    history: tuple = ()


def slab_two_norm(B, tol: float = 1e-11, maxiter: int = 200) -> float:
    """Largest singular value of a thin slab by power iteration on B^T B.

    Iterates until the eigen-residual of the Rayleigh quotient is below
    ``tol`` relative, which bounds the eigenvalue error by the same amount.
    The iterate is advanced with repeated squares of the small b x b Gram
    matrix, so step k applies 2^k power steps; nearly equal leading singular
    values (symmetric weights give these) then cost a few dozen steps.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if B.size == 0:
        return 0.0
    scale = np.abs(B).max()
    if scale == 0.0:
        return 0.0
    Bs = B / scale
    G = Bs.T @ Bs
    k = G.shape[0]
    x = np.linspace(1.0, 2.0, k)
    x /= np.linalg.norm(x)
    step = G.copy()
    lam = 0.0
    for _ in range(maxiter):
        y = G @ x
        lam = float(x @ y)
        if lam <= 0.0:
            return 0.0
        if np.linalg.norm(y - lam * x) <= tol * lam:
            break
        z = step @ x
        nz = np.linalg.norm(z)
        if nz == 0.0:
            break
        x = z / nz
        step = step @ step
        step /= np.abs(step).max()
    return scale * float(np.sqrt(max(lam, 0.0)))


def coupling_slab(V: SymBanded, N: int) -> np.ndarray:
    """The N x b slab of V_b: rows N-b..N-1 against columns N..N+b-1."""
    b = V.bandwidth
    full = V.section(N + b)
    slab = np.zeros((N, b))
    for r in range(b):
        i = N - b + r
        for k in range(b):
            d = N + k - i
            if 0 < d <= b:
                slab[i, k] = full.bands[d, i]
    return slab


def ql_criterion(Q: GivensSeq, slab: np.ndarray, n: int) -> float:
    nb = slab_two_norm(slab)
    if nb == 0.0:
        return 0.0
    return slab_two_norm(apply_givens(Q, True, slab)[:n]) / nb


def rc_criterion(L: TriBanded, slab: np.ndarray, n: int) -> float:
    nb = slab_two_norm(slab)
    if nb == 0.0:
        return 0.0
    y = L.solve(slab, transpose=True)
    y[n:] = 0.0
    z = L.matvec(y, transpose=True)
    return slab_two_norm(z[:n]) / nb


def _run(V, n, eps, nmax, factor, criterion, want_q):
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    if n < 1:
        raise DomainError("n must be positive")
    N = 2 * n
    history = []
    while True:
        if N > nmax:
            raise ConvergenceError(
                f"window {N} exceeds nmax = {nmax} (criterion history {history}); "
                "a pole is too close to the support or V is not invertible")
        sec = V.section(N)
        out = factor(sec)
        Q, L = out if want_q else (None, out)
        slab = coupling_slab(V, N)
        crit = criterion(Q, L, slab, n)
        history.append(crit)
        if crit < eps:
            return AdaptiveResult(L.section(n), N, crit, L, Q, tuple(history))
        N *= 2


def adaptive_ql(V: SymBanded, n: int, eps: float = 1e-14, nmax: int = NMAX_DEFAULT) -> AdaptiveResult:
    """Certified n x n section of the lower factor in ``V = Q L``."""
    return _run(V, n, eps, nmax, ql_banded, lambda Q, L, B, n: ql_criterion(Q, B, n), True)


def adaptive_reverse_cholesky(V: SymBanded, n: int, eps: float = 1e-14,
                              nmax: int = NMAX_DEFAULT) -> AdaptiveResult:
    """Certified n x n section of the lower factor in ``V = L^T L``."""
    return _run(V, n, eps, nmax, reverse_cholesky_banded,
                lambda Q, L, B, n: rc_criterion(L, B, n), False)
