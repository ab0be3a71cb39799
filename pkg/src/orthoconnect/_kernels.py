"""Compiled inner loops shared by the banded, infdim and quadrature modules.

Storage conventions
-------------------
* Triangular bands use diagonal-major storage: ``t[d, i]`` is ``T[i, i+d]`` for
  an upper factor and ``T[i+d, i]`` for a lower one.  The same array therefore
  describes a lower factor ``L`` and its transpose ``L^T`` (upper).
* The QR working array is row-windowed: ``W[i, k]`` holds ``A[i, i - p + k]``.

Rotations are recorded as ``(i, c, s)`` meaning ``G_i(c, s)`` acting in the
``(i, i+1)`` plane with 2x2 block ``[[c, s], [-s, c]]``.  A recorded sequence
``G_1, ..., G_K`` together with an optional sign vector ``D`` represents the
orthogonal matrix ``Q = G_1 G_2 ... G_K D``.
"""
import numpy as np
from numba import njit

TINY_PIVOT = 1e-300


@njit(cache=True)
def chol_upper(a):
    """Upper Cholesky of a symmetric band ``a[d, i] = A[i, i+d]``.

    Returns ``(r, info)`` with ``info = -1`` on success or the index of the
    first pivot that failed.
    """
    nb, n = a.shape
    b = nb - 1
    r = np.zeros((nb, n))
    for k in range(n):
        piv = a[0, k]
        for m in range(max(0, k - b), k):
            v = r[k - m, m]
            piv -= v * v
        if not piv > TINY_PIVOT:
            return r, k
        rkk = np.sqrt(piv)
        r[0, k] = rkk
        for j in range(k + 1, min(k + b, n - 1) + 1):
            acc = a[j - k, k]
            for m in range(max(0, j - b), k):
                acc -= r[k - m, m] * r[j - m, m]
            r[j - k, k] = acc / rkk
    return r, -1


@njit(cache=True)
def qr_window(w, p, q, m, n):
    """Givens QR of an m x n band held in a row window (modified in place).

    ``w`` has shape (m, 2p+q+1) with ``w[i, k] = A[i, i-p+k]``.  Returns
    ``(r, idx, cs, sn, signs, info)``; ``r`` stores the upper factor with
    bandwidth ``p+q`` and ``info`` is -1 or the first rank-deficient column.
    """
    width = 2 * p + q + 1
    maxrot = n * max(p, 1) + 1
    idx = np.empty(maxrot, dtype=np.int64)
    cs = np.empty(maxrot)
    sn = np.empty(maxrot)
    signs = np.ones(n)
    nrot = 0
    for j in range(n):
        last = min(j + p, m - 1)
        for i in range(last - 1, j - 1, -1):
            a = w[i, j - i + p]
            bb = w[i + 1, j - i - 1 + p]
            if bb == 0.0:
                if i > j or a > 0.0:
                    continue
                if a == 0.0:
                    return np.zeros((p + q + 1, n)), idx[:nrot], cs[:nrot], sn[:nrot], signs, j
                c = -1.0
                s = 0.0
            else:
                rr = np.hypot(a, bb)
                c = a / rr
                s = -bb / rr
            idx[nrot] = i
            cs[nrot] = c
            sn[nrot] = s
            nrot += 1
            hi = min(n - 1, j + p + q)
            for col in range(j, hi + 1):
                k0 = col - i + p
                k1 = col - i - 1 + p
                x0 = w[i, k0] if k0 < width else 0.0
                x1 = w[i + 1, k1] if k1 >= 0 else 0.0
                y0 = c * x0 - s * x1
                y1 = s * x0 + c * x1
                if k0 < width:
                    w[i, k0] = y0
                if k1 >= 0:
                    w[i + 1, k1] = y1
        djj = w[j, p]
        if djj < 0.0:
            signs[j] = -1.0
            for k in range(p, width):
                w[j, k] = -w[j, k]
            djj = -djj
        if not djj > TINY_PIVOT:
            return np.zeros((p + q + 1, n)), idx[:nrot], cs[:nrot], sn[:nrot], signs, j
    r = np.zeros((p + q + 1, n))
    for i in range(n):
        for d in range(p + q + 1):
            if i + d < n:
                r[d, i] = w[i, p + d]
    return r, idx[:nrot], cs[:nrot], sn[:nrot], signs, -1


@njit(cache=True)
def apply_rotations(idx, cs, sn, signs, b, transpose):
    """Return ``Q b`` or ``Q^T b`` for ``Q = G_1 ... G_K diag(signs)``."""
    out = b.copy()
    k = out.shape[1]
    nrot = idx.shape[0]
    if transpose:
        for t in range(nrot):
            i = idx[t]
            c = cs[t]
            s = sn[t]
            for col in range(k):
                x0 = out[i, col]
                x1 = out[i + 1, col]
                out[i, col] = c * x0 - s * x1
                out[i + 1, col] = s * x0 + c * x1
        for i in range(signs.shape[0]):
            if signs[i] < 0.0:
                for col in range(k):
                    out[i, col] = -out[i, col]
    else:
        for i in range(signs.shape[0]):
            if signs[i] < 0.0:
                for col in range(k):
                    out[i, col] = -out[i, col]
        for t in range(nrot - 1, -1, -1):
            i = idx[t]
            c = cs[t]
            s = sn[t]
            for col in range(k):
                x0 = out[i, col]
                x1 = out[i + 1, col]
                out[i, col] = c * x0 + s * x1
                out[i + 1, col] = -s * x0 + c * x1
    return out


@njit(cache=True)
def apply_rotations_window(idx, cs, sn, signs, w, lo, ncols):
    """Apply ``Q^T`` to a row-windowed matrix ``w[i, k] = X[i, i-lo+k]``.

    Rotations touching rows beyond ``w.shape[0]`` are skipped (those rows are
    known to be zero); entries falling outside a row's window are dropped.
    """
    rows, width = w.shape
    for t in range(idx.shape[0]):
        i = idx[t]
        if i + 1 >= rows:
            continue
        c = cs[t]
        s = sn[t]
        first = max(0, i - lo)
        last = min(ncols - 1, i + 1 - lo + width - 1)
        for col in range(first, last + 1):
            k0 = col - i + lo
            k1 = col - i - 1 + lo
            x0 = w[i, k0] if k0 < width else 0.0
            x1 = w[i + 1, k1] if k1 >= 0 else 0.0
            y0 = c * x0 - s * x1
            y1 = s * x0 + c * x1
            if k0 < width:
                w[i, k0] = y0
            if k1 >= 0:
                w[i + 1, k1] = y1
    for i in range(min(rows, signs.shape[0])):
        if signs[i] < 0.0:
            for k in range(width):
                w[i, k] = -w[i, k]
    return w


@njit(cache=True)
def solve_upper(u, rhs):
    """Back substitution with ``u[d, i] = U[i, i+d]``; rhs has shape (n, k)."""
    nb, n = u.shape
    x = rhs.copy()
    k = x.shape[1]
    for i in range(n - 1, -1, -1):
        for col in range(k):
            acc = x[i, col]
            for d in range(1, min(nb, n - i)):
                acc -= u[d, i] * x[i + d, col]
            x[i, col] = acc / u[0, i]
    return x


@njit(cache=True)
def solve_upper_t(u, rhs):
    """Forward substitution with ``U^T`` where ``u[d, i] = U[i, i+d]``."""
    nb, n = u.shape
    x = rhs.copy()
    k = x.shape[1]
    for i in range(n):
        for col in range(k):
            acc = x[i, col]
            for d in range(1, min(nb, i + 1)):
                acc -= u[d, i - d] * x[i - d, col]
            x[i, col] = acc / u[0, i]
    return x


@njit(cache=True)
def mul_upper(u, x):
    nb, n = u.shape
    y = np.zeros_like(x)
    k = x.shape[1]
    for i in range(n):
        for d in range(min(nb, n - i)):
            for col in range(k):
                y[i, col] += u[d, i] * x[i + d, col]
    return y


@njit(cache=True)
def mul_upper_t(u, x):
    nb, n = u.shape
    y = np.zeros_like(x)
    k = x.shape[1]
    for i in range(n):
        for d in range(min(nb, i + 1)):
            for col in range(k):
                y[i, col] += u[d, i - d] * x[i - d, col]
    return y


@njit(cache=True)
def tql_first(d, e, maxit):
    """Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal.

    ``d`` (diagonal) and ``e`` (off-diagonal, padded with a trailing zero) are
    overwritten.  Returns ``(eigenvalues, first_components, info)`` where
    ``info`` is -1 or the index whose iteration count exceeded ``maxit``.
    """
    n = d.shape[0]
    z = np.zeros(n)
    z[0] = 1.0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) + dd == dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > maxit:
                return d, z, l
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            early = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    early = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                f = z[i + 1]
                z[i + 1] = s * z[i] + c * f
                z[i] = c * z[i] - s * f
                i -= 1
            if early:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, z, -1


@njit(cache=True)
def clenshaw_bands(alphas, betas, c, N):
    """Upper bands of ``sum_k c_k p_k(X)`` on an N x N section times sqrt(mass).

    Clenshaw matrices are held as row windows ``w[i, t] = B[i, i - deg + t]``
    and swept as a wavefront: level k at row i needs level k+1 at rows
    i-1..i+1 and level k+2 at row i, so each level keeps a ring of four rows
    and only the final level is written out.  Only entries at least ``deg``
    rows from the end are exact.
    """
    deg = c.shape[0] - 1
    width = 2 * deg + 1
    ring = np.zeros((deg + 1, 4, width))
    out = np.zeros((deg + 1, N))
    for r in range(N + deg):
        for k in range(deg, -1, -1):
            i = r - (deg - k)
            if i < 0 or i >= N:
                continue
            row = ring[k, i % 4]
            for t in range(width):
                row[t] = 0.0
            row[deg] = c[k]
            if k < deg:
                up = ring[k + 1, (i - 1) % 4]
                mid = ring[k + 1, i % 4]
                dn = ring[k + 1, (i + 1) % 4]
                for t in range(width):
                    j = i - deg + t
                    if j < 0 or j >= N:
                        continue
                    # (X b1)[i, j] - alpha_k b1[i, j]
                    acc = (alphas[i] - alphas[k]) * mid[t]
                    if i > 0 and t + 1 < width:
                        acc += betas[i - 1] * up[t + 1]
                    if i + 1 < N and t >= 1:
                        acc += betas[i] * dn[t - 1]
                    row[t] += acc / betas[k]
            if k < deg - 1:
                q = betas[k] / betas[k + 1]
                prev = ring[k + 2, i % 4]
                for t in range(width):
                    row[t] -= q * prev[t]
            if k == 0:
                for d in range(deg + 1):
                    if i + d < N:
                        out[d, i] = row[deg + d]
    return out
