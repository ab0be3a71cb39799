import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from orthoconnect import DomainError, SymBanded, ql_banded, reverse_cholesky_banded
from orthoconnect import toeplitz as tp
from orthoconnect.infdim import coupling_slab, ql_criterion, rc_criterion

MODELS = [(3.0, 1.0), (2.2, 1.0), (10.0, 1.0), (5.0, 1.0), (3.0, -1.0)]


def test_infinite_ql_examples():
    q = tp.infinite_ql(tp.ToeplitzModel(3.0, 1.0))
    assert abs(q.diag - 2.6180339887498949) < 1e-15
    assert q.sub1 == 2.0
    assert abs(q.sub2 - 0.3819660112501051) < 1e-15
    assert abs(q.s - 0.3819660112501051) < 1e-15
    # frozen from sqrt(2 sqrt(5) / (3 + sqrt(5)))
    assert abs(q.c - 0.9241763718304448) < 1e-15
    assert abs(q.corner - math.sqrt((3 + math.sqrt(5)) * math.sqrt(5) / 2)) < 1e-15
    assert abs(tp.infinite_ql(tp.ToeplitzModel(5.0, 1.0)).s - 2 / (5 + math.sqrt(21))) < 1e-15
    assert abs(2 / (5 + math.sqrt(21)) - 0.2087121525) < 1e-10


@pytest.mark.parametrize("ab", MODELS)
def test_infinite_ql_reconstructs_interior(ab):
    """V^T V = L^T Q^T Q L = L^T L in the interior."""
    m = tp.ToeplitzModel(*ab)
    q = tp.infinite_ql(m)
    a, b = m.alpha, m.beta
    d, e, f = q.diag, q.sub1, q.sub2
    assert abs(d * d + e * e + f * f - (a * a + 2 * b * b)) < 1e-12
    assert abs(d * e + e * f - 2 * a * b) < 1e-12
    assert abs(d * f - b * b) < 1e-12
    assert abs(q.s ** 2 + q.c ** 2 - 1) < 1e-15
    Q, L = ql_banded(SymBanded(m.section(200)))
    assert abs(L.bands[0, 100] - d) < 1e-12
    assert abs(L.bands[1, 100] - e) < 1e-12
    assert abs(L.bands[2, 100] - f) < 1e-12


def test_finite_ql_first_rotation():
    f = tp.finite_ql(tp.ToeplitzModel(3.0, 1.0), 2)
    assert abs(f.s[0] - 1 / math.sqrt(10)) < 1e-15
    assert abs(f.c[0] - 3 / math.sqrt(10)) < 1e-15


@pytest.mark.parametrize("ab", MODELS)
@pytest.mark.parametrize("N", [2, 3, 7, 64, 400])
def test_finite_ql_matches_generic_kernel(ab, N):
    m = tp.ToeplitzModel(*ab)
    f = tp.finite_ql(m, N)
    Q, L = ql_banded(SymBanded(m.section(N)))
    s = np.zeros(N - 1)
    c = np.ones(N - 1)
    for i, ci, si in Q.rotations:
        s[i], c[i] = si, ci
    assert np.abs(s - f.s).max() < 1e-13
    assert np.abs(c - f.c).max() < 1e-13
    assert np.abs(L.bands - f.bands).max() < 1e-12


@pytest.mark.parametrize("ab", MODELS)
def test_explicit_and_recurrence_forms_agree(ab):
    m = tp.ToeplitzModel(*ab)
    a, b = tp.finite_ql(m, 30), tp.finite_ql_explicit(m, 30)
    assert np.abs(a.s - b.s).max() < 1e-14
    assert np.abs(a.bands - b.bands).max() < 1e-13


@pytest.mark.parametrize("ab", [(3.0, 1.0), (2.2, 1.0), (5.0, 1.0), (10.0, 1.0), (3.0, -1.0)])
def test_sine_decay_rate(ab):
    """|s_{N-k} - s_inf| ~ C k rho^{-2k}: fitted exponential rate within 5% of 2 log rho."""
    m = tp.ToeplitzModel(*ab)
    N = 400
    f = tp.finite_ql(m, N)
    k = np.arange(1, N)
    err = np.abs(f.s[N - 1 - k] - tp.infinite_ql(m).s)
    ok = err > 1e-13
    A = np.c_[np.ones(ok.sum()), np.log(k[ok]), -k[ok]]
    rate = np.linalg.lstsq(A, np.log(err[ok]), rcond=None)[0][2]
    assert abs(rate / (2 * math.log(m.rho)) - 1) < 0.05


def test_infinite_reverse_cholesky_identities():
    ld, lo = tp.infinite_reverse_cholesky(tp.ToeplitzModel(3.0, 1.0))
    assert abs(ld - 1.6180339887498949) < 1e-15
    assert abs(lo - 0.6180339887498949) < 1e-15
    for ab in MODELS:
        m = tp.ToeplitzModel(*ab)
        ld, lo = tp.infinite_reverse_cholesky(m)
        assert abs(ld * ld + lo * lo - m.alpha) < 1e-15 * m.alpha * 2
        assert abs(ld * lo - m.beta) < 1e-15 * 2
        L = reverse_cholesky_banded(SymBanded(m.section(400)))
        assert abs(L.bands[0, 0] - ld) < 1e-12 and abs(L.bands[1, 0] - lo) < 1e-12


@pytest.mark.parametrize("ab", MODELS)
def test_finite_reverse_cholesky(ab):
    m = tp.ToeplitzModel(*ab)
    diag, sub = tp.finite_reverse_cholesky(m, 64)
    assert diag[-1] == math.sqrt(m.alpha)
    L = reverse_cholesky_banded(SymBanded(m.section(64)))
    assert np.abs(L.bands[0] - diag).max() < 1e-14
    assert np.abs(L.bands[1, :63] - sub).max() < 1e-14
    d = tp.d_sequence(m, 60)
    ld2 = tp.infinite_reverse_cholesky(m)[0] ** 2
    assert np.all(np.diff(d) <= 0) and np.all(d >= ld2 - 1e-15)


def test_window_bound_limits_and_regression_constants():
    m = tp.ToeplitzModel(3.0, 1.0)
    assert tp.ql_window_bound(m, 50, 1e-12) == 79
    assert tp.rc_window_bound(m, 50, 1e-12) == 79
    big = tp.ToeplitzModel(101.0, 1.0)
    assert 50 <= tp.ql_window_bound(big, 50, 0.9) <= 52
    assert 50 <= tp.rc_window_bound(big, 50, 0.9) <= 52
    with pytest.raises(DomainError):
        tp.ql_window_bound(m, 50, 0.0)
    with pytest.raises(DomainError):
        tp.ToeplitzModel(2.0, 1.0)


@pytest.mark.parametrize("ab", [(3.0, 1.0), (5.0, 1.0), (2.2, -1.0)])
def test_proof_level_bounds_high_precision(ab):
    """|l_d - sqrt(d_k)| and |l_o - beta/sqrt(d_k)| below sqrt(beta) rho^{-k-1/2}, k <= 300."""
    with mp.workdps(400):
        a, b = mp.mpf(ab[0]), mp.mpf(abs(ab[1]))
        D = mp.sqrt(a * a - 4 * b * b)
        rho = (a + D) / (2 * b)
        ld = mp.sqrt((a + D) / 2)
        lo = b * mp.sqrt(2 / (a + D))
        d = a
        for k in range(301):
            bound = mp.sqrt(b) * rho ** (-k - mp.mpf(1) / 2)
            assert abs(ld - mp.sqrt(d)) < bound
            assert abs(lo - b / mp.sqrt(d)) < bound
            d = a - b * b / d


rho_values = st.floats(1.05, 10.0)


@given(rho_values, st.sampled_from([1.0, -1.0, 0.5]), st.sampled_from([10, 50]),
       st.sampled_from([1e-8, 1e-12]))
def test_window_bounds_certify_and_bound_error(rho, beta, n, eps):
    m = tp.ToeplitzModel(abs(beta) * (rho + 1 / rho) * (1 + 1e-12), beta)
    V = SymBanded(m.section(8), m.section)
    tol = eps * m.norm_L
    # QL: the bound certifies the criterion directly
    Nq = tp.ql_window_bound(m, n, eps)
    Q, L = ql_banded(V.section(Nq))
    assert ql_criterion(Q, coupling_slab(V, Nq), n) < eps
    q = tp.infinite_ql(m)
    ex = (np.diag(np.full(n, q.diag)) + np.diag(np.full(n - 1, q.sub1), -1)
          + np.diag(np.full(n - 2, q.sub2), -2))
    ex[0, 0] = q.corner
    assert np.linalg.norm(L.section(n).todense() - ex, 2) < tol
    # reverse Cholesky: the section error meets the guarantee at N; the slab
    # criterion needs one more row to be certified
    Nr = tp.rc_window_bound(m, n, eps)
    Lr = reverse_cholesky_banded(V.section(Nr))
    ld, lo = tp.infinite_reverse_cholesky(m)
    ex = np.diag(np.full(n, ld)) + np.diag(np.full(n - 1, lo), -1)
    assert np.linalg.norm(Lr.section(n).todense() - ex, 2) < tol
    W = Nr + 1
    assert rc_criterion(reverse_cholesky_banded(V.section(W)), coupling_slab(V, W), n) < eps


def test_rc_criterion_at_exact_bound_can_exceed_eps():
    """At exactly the bound the slab criterion can sit a small factor above eps."""
    m = tp.ToeplitzModel(5.2, 1.0)
    V = SymBanded(m.section(8), m.section)
    N = tp.rc_window_bound(m, 10, 1e-8)
    ratio = rc_criterion(reverse_cholesky_banded(V.section(N)), coupling_slab(V, N), 10) / 1e-8
    assert 1.0 < ratio < 5.0


def test_negative_beta_is_conjugation():
    mp_, mn = tp.ToeplitzModel(3.0, 1.0), tp.ToeplitzModel(3.0, -1.0)
    fp, fn = tp.finite_ql(mp_, 20), tp.finite_ql(mn, 20)
    assert np.allclose(fn.s, -fp.s) and np.allclose(fn.c, fp.c)
    assert np.allclose(fn.bands[0], fp.bands[0]) and np.allclose(fn.bands[1], -fp.bands[1])
    assert np.allclose(fn.bands[2], fp.bands[2])
    assert tp.infinite_reverse_cholesky(mn)[1] == -tp.infinite_reverse_cholesky(mp_)[1]
