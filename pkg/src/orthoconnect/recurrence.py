"""Classical orthonormal families, Jacobi matrices and Clenshaw summation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from . import _kernels as K
from .errors import DomainError, SingularError

__all__ = [
    "OrthonormalFamily", "TabulatedFamily", "SymBanded", "TriBanded",
    "jacobi", "legendre", "chebyshev_t", "chebyshev_u", "laguerre", "hermite",
    "family_from_name", "jacobi_matrix", "op_poly", "coeffs_of_polynomial",
    "clenshaw_eval", "eval_basis",
]


# ---------------------------------------------------------------------------
# band containers


@dataclass
class SymBanded:
    """Symmetric banded matrix, ``bands[d, i] = A[i, i+d]`` for ``d >= 0``.

    Entries of diagonal ``d`` beyond index ``size - d`` are stored as zero.
    ``generator(N)`` must return the bands of the ``N x N`` section.
    """

    bands: np.ndarray
    generator: Optional[Callable[[int], np.ndarray]] = field(default=None, repr=False)

    def __post_init__(self):
        self.bands = np.atleast_2d(np.asarray(self.bands, dtype=float))

    @property
    def bandwidth(self) -> int:
        return self.bands.shape[0] - 1

    @property
    def size(self) -> int:
        return self.bands.shape[1]

    def extend(self, n: int) -> "SymBanded":
        """Grow in place to size ``n``; existing entries are kept verbatim."""
        if n <= self.size:
            return self
        if self.generator is None:
            raise DomainError(f"cannot extend a SymBanded of size {self.size} without a generator")
        new = np.array(self.generator(n), dtype=float)
        if new.shape[0] < self.bands.shape[0]:
            new = np.vstack([new, np.zeros((self.bands.shape[0] - new.shape[0], n))])
        old = self.size
        for d in range(self.bands.shape[0]):
            new[d, : max(old - d, 0)] = self.bands[d, : max(old - d, 0)]
        self.bands = new
        return self

    def section(self, n: int) -> "SymBanded":
        """The leading ``n x n`` section (extending lazily when needed)."""
        if n > self.size:
            self.extend(n)
        b = self.bands[:, :n].copy()
        for d in range(1, b.shape[0]):
            b[d, max(n - d, 0):] = 0.0
        return SymBanded(b, self.generator)

    def diagonal(self, d: int = 0) -> np.ndarray:
        d = abs(d)
        if d > self.bandwidth:
            return np.zeros(max(self.size - d, 0))
        return self.bands[d, : self.size - d].copy()

    def todense(self, n: Optional[int] = None) -> np.ndarray:
        n = self.size if n is None else n
        A = np.zeros((n, n))
        for d in range(min(self.bandwidth, n - 1) + 1):
            v = self.section(n).bands[d, : n - d] if n > self.size else self.bands[d, : n - d]
            A[np.arange(n - d), np.arange(d, n)] = v
            if d:
                A[np.arange(d, n), np.arange(n - d)] = v
        return A

    def to_sparse(self, n: Optional[int] = None) -> sp.csr_matrix:
        n = self.size if n is None else n
        offs, data = [], []
        for d in range(min(self.bandwidth, n - 1) + 1):
            v = self.bands[d, : n - d]
            offs.append(d)
            data.append(v)
            if d:
                offs.append(-d)
                data.append(v)
        return sp.diags(data, offs, shape=(n, n), format="csr")


@dataclass
class TriBanded:
    """Triangular banded matrix with diagonal-major storage.

    ``bands[d, i]`` is ``T[i, i+d]`` when ``orientation == "upper"`` and
    ``T[i+d, i]`` when ``orientation == "lower"``.
    """

    bands: np.ndarray
    orientation: str = "upper"

    def __post_init__(self):
        self.bands = np.atleast_2d(np.asarray(self.bands, dtype=float))
        if self.orientation not in ("upper", "lower"):
            raise DomainError(f"unknown orientation {self.orientation!r}")

    @property
    def bandwidth(self) -> int:
        return self.bands.shape[0] - 1

    @property
    def size(self) -> int:
        return self.bands.shape[1]

    @property
    def T(self) -> "TriBanded":
        return TriBanded(self.bands, "lower" if self.orientation == "upper" else "upper")

    def diagonal(self, d: int = 0) -> np.ndarray:
        """Main diagonal (d=0) or the d-th off-diagonal on the stored side."""
        if d > self.bandwidth:
            return np.zeros(max(self.size - d, 0))
        return self.bands[d, : self.size - d].copy()

    def section(self, n: int) -> "TriBanded":
        if n > self.size:
            raise DomainError(f"section {n} exceeds stored size {self.size}")
        b = self.bands[:, :n].copy()
        for d in range(1, b.shape[0]):
            b[d, max(n - d, 0):] = 0.0
        return TriBanded(b, self.orientation)

    def todense(self) -> np.ndarray:
        n = self.size
        A = np.zeros((n, n))
        for d in range(min(self.bandwidth, n - 1) + 1):
            rows, cols = np.arange(n - d), np.arange(d, n)
            if self.orientation == "lower":
                rows, cols = cols, rows
            A[rows, cols] = self.bands[d, : n - d]
        return A

    def _as2d(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.size:
            raise DomainError(f"operand has {x.shape[0]} rows, expected {self.size}")
        return (x[:, None] if x.ndim == 1 else x), x.ndim == 1

    def matvec(self, x, transpose: bool = False) -> np.ndarray:
        X, flat = self._as2d(x)
        X = np.ascontiguousarray(X)
        upper = (self.orientation == "upper") != transpose
        y = K.mul_upper(self.bands, X) if upper else K.mul_upper_t(self.bands, X)
        return y[:, 0] if flat else y

    def solve(self, rhs, transpose: bool = False) -> np.ndarray:
        if np.any(self.bands[0] == 0.0):
            i = int(np.flatnonzero(self.bands[0] == 0.0)[0])
            raise SingularError(f"zero diagonal entry at index {i}")
        X, flat = self._as2d(rhs)
        X = np.ascontiguousarray(X)
        upper = (self.orientation == "upper") != transpose
        y = K.solve_upper(self.bands, X) if upper else K.solve_upper_t(self.bands, X)
        return y[:, 0] if flat else y


# ---------------------------------------------------------------------------
# families


def _sign_of(v):
    return np.where(np.asarray(v) < 0, -1.0, 1.0)


@dataclass(frozen=True)
class OrthonormalFamily:
    """A classical orthonormal family identified by ``kind`` and parameters.

    ``kind`` is one of ``jacobi``, ``legendre``, ``chebyshev_t``,
    ``chebyshev_u``, ``laguerre`` and ``hermite``.  Jacobi-type families carry
    the exponents ``(a, b)`` of ``(1-x)^a (1+x)^b``; Laguerre carries ``a`` of
    ``x^a e^{-x}``.  Laguerre off-diagonals are negative.
    """

    kind: str
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in ("jacobi", "legendre", "chebyshev_t", "chebyshev_u", "laguerre", "hermite"):
            raise DomainError(f"unknown family kind {self.kind!r}")
        if self.kind in ("jacobi", "laguerre") and not self.a > -1:
            raise DomainError(f"parameter a = {self.a} must exceed -1")
        if self.kind == "jacobi" and not self.b > -1:
            raise DomainError(f"parameter b = {self.b} must exceed -1")

    @property
    def is_jacobi_type(self) -> bool:
        return self.kind in ("jacobi", "legendre", "chebyshev_t", "chebyshev_u")

    def __str__(self):
        if self.kind == "jacobi":
            return f"jacobi({self.a:g},{self.b:g})"
        if self.kind == "laguerre":
            return f"laguerre({self.a:g})"
        return self.kind

    def diag(self, n):
        n = np.asarray(n, dtype=float)
        if self.kind == "laguerre":
            return 2 * n + self.a + 1
        if self.kind in ("hermite", "legendre", "chebyshev_t", "chebyshev_u"):
            return np.zeros_like(n)
        a, b = self.a, self.b
        s = 2 * n + a + b
        with np.errstate(divide="ignore", invalid="ignore"):
            gen = (b * b - a * a) / (s * (s + 2))
        return np.where(n == 0, (b - a) / (a + b + 2), gen)

    def offdiag(self, n):
        n = np.asarray(n, dtype=float)
        k = self.kind
        if k == "laguerre":
            return -np.sqrt((n + 1) * (n + self.a + 1))
        if k == "hermite":
            return np.sqrt((n + 1) / 2)
        if k == "legendre":
            return (n + 1) / np.sqrt((2 * n + 1) * (2 * n + 3))
        if k == "chebyshev_t":
            return np.where(n == 0, math.sqrt(0.5), 0.5)
        if k == "chebyshev_u":
            return np.full_like(n, 0.5)
        a, b = self.a, self.b
        s = 2 * n + a + b
        with np.errstate(divide="ignore", invalid="ignore"):
            gen = 2 / (s + 2) * np.sqrt((n + 1) * (n + a + 1) * (n + b + 1) * (n + a + b + 1)
                                        / ((s + 1) * (s + 3)))
        first = 2 / (a + b + 2) * math.sqrt((a + 1) * (b + 1) / (a + b + 3))
        return np.where(n == 0, first, gen)

    def coefficients(self, n: int):
        k = np.arange(n)
        return np.asarray(self.diag(k), dtype=float), np.asarray(self.offdiag(k), dtype=float)

    @property
    def mass(self) -> float:
        k = self.kind
        if k == "laguerre":
            return math.gamma(self.a + 1)
        if k == "hermite":
            return math.sqrt(math.pi)
        if k == "legendre":
            return 2.0
        if k == "chebyshev_t":
            return math.pi
        if k == "chebyshev_u":
            return math.pi / 2
        a, b = self.a, self.b
        return math.exp((a + b + 1) * math.log(2) + math.lgamma(a + 1) + math.lgamma(b + 1)
                        - math.lgamma(a + b + 2))

    @property
    def jacobi_params(self):
        return {"legendre": (0.0, 0.0), "chebyshev_t": (-0.5, -0.5),
                "chebyshev_u": (0.5, 0.5)}.get(self.kind, (self.a, self.b))

    @property
    def sigma(self) -> np.ndarray:
        """Pearson sigma, ascending monomial coefficients."""
        if self.is_jacobi_type:
            return np.array([1.0, 0.0, -1.0])
        if self.kind == "laguerre":
            return np.array([0.0, 1.0])
        return np.array([1.0])

    @property
    def tau(self) -> np.ndarray:
        if self.is_jacobi_type:
            a, b = self.jacobi_params
            return np.array([b - a, -(a + b + 2)])
        if self.kind == "laguerre":
            return np.array([self.a + 1, -1.0])
        return np.array([0.0, -2.0])

    @property
    def support(self):
        if self.is_jacobi_type:
            return (-1.0, 1.0)
        if self.kind == "laguerre":
            return (0.0, math.inf)
        return (-math.inf, math.inf)

    def eigenvalue(self, n):
        """Sturm-Liouville eigenvalue lambda_n from the Pearson pair."""
        n = np.asarray(n, dtype=float)
        s2 = 2 * self.sigma[2] if self.sigma.size > 2 else 0.0
        t1 = self.tau[1]
        return -(n / 2) * ((n - 1) * s2 + 2 * t1)

    def raised(self) -> "OrthonormalFamily":
        """The family orthonormal with respect to sigma times the weight."""
        if self.is_jacobi_type:
            a, b = self.jacobi_params
            return OrthonormalFamily("jacobi", a + 1, b + 1)
        if self.kind == "laguerre":
            return OrthonormalFamily("laguerre", self.a + 1)
        return self

    def weight(self, x):
        x = np.asarray(x, dtype=float)
        if self.is_jacobi_type:
            a, b = self.jacobi_params
            return (1 - x) ** a * (1 + x) ** b
        if self.kind == "laguerre":
            return x ** self.a * np.exp(-x)
        return np.exp(-x * x)


@dataclass(frozen=True)
class TabulatedFamily:
    """Orthonormal family given by finitely many recurrence coefficients."""

    alphas: np.ndarray
    betas: np.ndarray
    mass: float
    label: str = "tabulated"

    def coefficients(self, n: int):
        if n > len(self.alphas) or n > len(self.betas) + 1:
            raise DomainError(f"{self.label}: {n} coefficients requested, "
                              f"{len(self.alphas)} available")
        b = np.zeros(n)
        m = min(n, len(self.betas))
        b[:m] = self.betas[:m]
        return np.asarray(self.alphas[:n], dtype=float), b

    def diag(self, n):
        return np.asarray(self.alphas)[n]

    def offdiag(self, n):
        return np.asarray(self.betas)[n]

    @property
    def size(self) -> int:
        return len(self.alphas)

    def __str__(self):
        return self.label


def jacobi(a: float, b: float) -> OrthonormalFamily:
    return OrthonormalFamily("jacobi", float(a), float(b))


def legendre() -> OrthonormalFamily:
    return OrthonormalFamily("legendre")


def chebyshev_t() -> OrthonormalFamily:
    return OrthonormalFamily("chebyshev_t")


def chebyshev_u() -> OrthonormalFamily:
    return OrthonormalFamily("chebyshev_u")


def laguerre(a: float = 0.0) -> OrthonormalFamily:
    return OrthonormalFamily("laguerre", float(a))


def hermite() -> OrthonormalFamily:
    return OrthonormalFamily("hermite")


_ALIASES = {"chebyshevt": "chebyshev_t", "chebyshevu": "chebyshev_u",
            "chebt": "chebyshev_t", "chebu": "chebyshev_u"}


def family_from_name(name: str, params=()) -> OrthonormalFamily:
    """Build a family from a name such as ``"jacobi"`` and its parameters."""
    key = _ALIASES.get(name.lower().replace("-", "_").replace(" ", ""), name.lower().replace("-", "_"))
    params = [float(p) for p in params]
    if key == "jacobi":
        if len(params) != 2:
            raise DomainError("jacobi needs two parameters a,b")
        return jacobi(*params)
    if key == "laguerre":
        return laguerre(params[0] if params else 0.0)
    if params:
        raise DomainError(f"{key} takes no parameters")
    return OrthonormalFamily(key)


def _leading_signs(family, n: int) -> np.ndarray:
    """Signs of the leading coefficients of p_0..p_{n-1}."""
    _, b = family.coefficients(max(n, 1))
    out = np.ones(n)
    if n > 1:
        out[1:] = np.cumprod(_sign_of(b[: n - 1]))
    return out


# ---------------------------------------------------------------------------
# operations


def jacobi_matrix(family, n: int) -> SymBanded:
    """Jacobi matrix section of size ``n`` (lazily extendable)."""
    if n < 1:
        raise DomainError("n must be at least 1")

    def gen(N):
        a, b = family.coefficients(N)
        out = np.zeros((2, N))
        out[0] = a
        out[1, : N - 1] = b[: N - 1]
        return out

    return SymBanded(gen(n), gen)


def _trim(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if c.size == 0:
        raise DomainError("empty coefficient list")
    if not np.all(np.isfinite(c)):
        raise DomainError("coefficients must be finite")
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if nz.size else c[:1]


def degree_of(coeffs) -> int:
    return len(_trim(coeffs)) - 1


def _op_poly_bands(family, c: np.ndarray, n: int) -> np.ndarray:
    deg = len(c) - 1
    N = n + deg
    alphas, betas = family.coefficients(N)
    B = K.clenshaw_bands(np.ascontiguousarray(alphas, dtype=float),
                         np.ascontiguousarray(betas, dtype=float), np.ascontiguousarray(c), N)
    out = B[:, :n] / math.sqrt(family.mass)
    for d in range(1, deg + 1):
        out[d, max(n - d, 0):] = 0.0
    return out


def op_poly(family, coeffs, n: int) -> SymBanded:
    """``u(X_P)`` for ``u = sum_k coeffs[k] p_k``, exact on the n x n section."""
    c = _trim(coeffs)
    if n < 1:
        raise DomainError("n must be at least 1")
    gen = lambda N: _op_poly_bands(family, c, N)
    return SymBanded(gen(n), gen)


def eval_basis(family, n: int, x) -> np.ndarray:
    """Matrix ``[p_0(x), ..., p_{n-1}(x)]`` by forward recurrence."""
    x = np.asarray(x, dtype=float)
    a, b = family.coefficients(max(n, 1))
    out = np.empty(x.shape + (n,))
    if n == 0:
        return out
    out[..., 0] = 1 / math.sqrt(family.mass)
    if n > 1:
        out[..., 1] = (x - a[0]) * out[..., 0] / b[0]
    for k in range(1, n - 1):
        out[..., k + 1] = ((x - a[k]) * out[..., k] - b[k - 1] * out[..., k - 1]) / b[k]
    return out


def clenshaw_eval(family, coeffs, points) -> np.ndarray:
    """Evaluate ``sum_k coeffs[k] p_k`` at ``points`` by backward recurrence."""
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    x = np.asarray(points, dtype=float)
    K_ = len(c)
    if K_ == 0:
        return np.zeros_like(x)
    a, b = family.coefficients(K_)
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    for k in range(K_ - 1, -1, -1):
        bk = c[k] + ((x - a[k]) * b1 / b[k] if k < K_ - 1 else 0.0)
        if k < K_ - 2:
            bk = bk - (b[k] / b[k + 1]) * b2
        b2, b1 = b1, bk
    return b1 / math.sqrt(family.mass)


def coeffs_of_polynomial(family, values_at: Callable, degree: int) -> np.ndarray:
    """Expansion coefficients of a polynomial via a (degree+1)-point Gauss rule."""
    from .quadrature import golub_welsch

    rule = golub_welsch(jacobi_matrix(family, degree + 1), family.mass)
    P = eval_basis(family, degree + 1, rule.nodes)
    f = np.asarray(values_at(rule.nodes), dtype=float) * np.ones_like(rule.nodes)
    return P.T @ (rule.weights * f)


def polynomial_from_roots(leading: float, roots) -> Callable:
    """Callable ``leading * prod (x - r)``; complex roots must come in pairs."""
    roots = np.asarray(roots, dtype=complex)

    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, leading, dtype=complex)
        for r in roots:
            out = out * (x - r)
        if np.max(np.abs(out.imag), initial=0.0) > 1e-10 * max(np.max(np.abs(out.real), initial=0.0), 1.0):
            raise DomainError("roots must be real or appear in conjugate pairs")
        return out.real

    return f


def coeffs_from_roots(family, leading: float, roots) -> np.ndarray:
    return coeffs_of_polynomial(family, polynomial_from_roots(leading, roots), len(roots))


def coeffs_from_monomials(family, mono) -> np.ndarray:
    """Family coefficients of ``sum_k mono[k] x^k`` (degree at most 30)."""
    mono = np.atleast_1d(np.asarray(mono, dtype=float))
    if len(mono) - 1 > 30:
        raise DomainError("monomial input is limited to degree 30")
    return coeffs_of_polynomial(family, lambda x: np.polynomial.polynomial.polyval(x, mono),
                                len(mono) - 1)
