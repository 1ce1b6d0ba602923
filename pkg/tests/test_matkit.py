from __future__ import annotations

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from almostrep import matkit as M
from almostrep.errors import BranchError, InputError, NotUnitary, SingularError, SpectralGapError

seeds = st.integers(0, 2**32 - 1)


def test_op_norm_is_largest_singular_value():
    A = np.array([[3, 0], [4, 5]], dtype=complex)
    assert M.op_norm(A) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0])
    with pytest.raises(InputError):
        M.op_norm(np.array([[np.nan]]))


@settings(max_examples=40)
@given(seeds, st.integers(1, 6))
def test_tr_log_matches_log_det(seed, n):
    rng = np.random.default_rng(seed)
    U = M.random_unitary(n, rng)
    lam = np.linalg.eigvals(U)
    if np.min(np.abs(lam + 1)) < 1e-3:
        return
    z = M.tr_log_unitary(U)
    assert abs(np.exp(z) - np.linalg.det(U)) < 1e-9
    assert abs(z.real) < 1e-9
    assert np.all(np.abs(z.imag) <= n * np.pi + 1e-9)


@settings(max_examples=40)
@given(seeds, st.integers(1, 6), st.floats(0.01, 0.85))
def test_series_and_eigen_paths_agree(seed, n, r):
    U = M.unitary_near_identity(n, np.random.default_rng(seed), r)
    assert abs(M.tr_log_series(U) - M.tr_log_eig(U)) < 1e-10
    assert abs(M.tr_log_series(U) - np.trace(sla.logm(U))) < 1e-8


def test_tr_log_branch_guard():
    with pytest.raises(BranchError):
        M.tr_log_unitary(np.diag([1.0, -1.0]).astype(complex))
    with pytest.raises(NotUnitary):
        M.tr_log_unitary(np.diag([1.0, 2.0]).astype(complex))
    with pytest.raises(BranchError):
        M.tr_log_series(-np.eye(2, dtype=complex))


def test_spectral_projection_examples():
    h = np.diag([0.05, 0.95, 1.0]).astype(complex)
    P = M.herm_spectral_projection(h)
    assert np.allclose(P, np.diag([0, 1, 1]))
    with pytest.raises(SpectralGapError):
        M.herm_spectral_projection(np.diag([0.5, 1.0]).astype(complex), check_defect=False)
    with pytest.raises(SpectralGapError):
        M.herm_spectral_projection(np.diag([0.4, 1.0]).astype(complex))
    with pytest.raises(InputError):
        M.herm_spectral_projection(np.array([[0, 1], [0, 0]], dtype=complex))


@settings(max_examples=60)
@given(seeds, st.integers(2, 6), st.integers(1, 5), st.floats(0.0, 0.2))
def test_a1_bound_random(seed, n, rank, size):
    rank = min(rank, n - 1)
    rng = np.random.default_rng(seed)
    Q = M.random_unitary(n, rng)
    p = Q[:, :rank] @ Q[:, :rank].conj().T
    h = p + M.random_hermitian(n, rng, size)
    eps = M.op_norm(h @ h - h)
    if not eps < 2 / 9:
        return
    P = M.herm_spectral_projection(h)
    assert M.op_norm(P @ P - P) < 1e-10
    assert M.op_norm(P - h) <= 1.5 * eps + 1e-12


@settings(max_examples=60)
@given(seeds, st.integers(2, 6), st.integers(1, 4), st.floats(0.0, 0.06))
def test_polar_and_a2_bound_random(seed, n, k, size):
    k = min(k, n)
    rng = np.random.default_rng(seed)
    V = M.random_unitary(n, rng)[:, :k]
    E = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
    w = V + size * E / M.op_norm(E)
    eps = M.op_norm(w.conj().T @ w - np.eye(k))
    u = M.polar_isometry(w)
    assert M.op_norm(u.conj().T @ u - np.eye(k)) < 1e-10
    if eps < 1 / 15:
        assert M.op_norm(u - w) < 12 * eps + 1e-12


def test_polar_singular():
    with pytest.raises(SingularError):
        M.polar_isometry(np.zeros((2, 1), dtype=complex))


def test_tolerances_validated():
    with pytest.raises(InputError):
        M.Tolerances(unitary_tol=0)


def test_kron_dirsum_det():
    A = np.diag([1, 2]).astype(complex)
    B = np.array([[0, 1], [1, 0]], dtype=complex)
    assert M.kron(A, B).shape == (4, 4)
    assert M.dirsum(A, B).shape == (4, 4)
    assert M.det(M.dirsum(A, B)) == pytest.approx(-2)
