"""Dense complex matrix helpers on top of numpy/scipy.

Eigen-decompositions, determinants and norms go through LAPACK; this module
adds the unitary trace-log with explicit branch checks, spectral projections
with a gap check at 1/2, and the polar isometry.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np
import scipy.linalg as sla

from .errors import BranchError, InputError, NotUnitary, SingularError, SpectralGapError


@dataclass(frozen=True)
class Tolerances:
    unitary_tol: float = 1e-9
    log_branch_gap: float = 1e-6
    spectral_gap: float = 1e-6
    integer_snap: float = 1e-6

    def __post_init__(self):
        for k, v in vars(self).items():
            if not v > 0:
                raise InputError(f"tolerance {k} must be positive")


DEFAULT_TOL = Tolerances()

SERIES_RADIUS = 0.9


def _finite(A: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    return A


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def adjoint(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def op_norm(A: np.ndarray) -> float:
    """Largest singular value."""
    A = _finite(np.asarray(A))
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def op_norm_batch(A: np.ndarray) -> np.ndarray:
    """Operator norms of a stack of matrices ``A[..., n, m]``."""
    return np.linalg.norm(A, 2, axis=(-2, -1))


def kron(*mats: np.ndarray) -> np.ndarray:
    return reduce(np.kron, mats)


def dirsum(*mats: np.ndarray) -> np.ndarray:
    return sla.block_diag(*mats)


def det(A: np.ndarray) -> complex:
    A = _finite(np.asarray(A))
    if A.shape[0] != A.shape[1]:
        raise InputError("det needs a square matrix")
    return complex(np.linalg.det(A))


def unitarity_error(U: np.ndarray) -> float:
    return op_norm(adjoint(U) @ U - identity(U.shape[0]))


def check_unitary(U: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> None:
    err = unitarity_error(U)
    if err > tol.unitary_tol:
        raise NotUnitary(f"||U*U - I|| = {err:.3e} exceeds {tol.unitary_tol:g}")


def tr_log_series(U: np.ndarray, max_terms: int = 2000) -> complex:
    """Tr log U from the power series around 1; needs ``||U - I|| < 1``."""
    n = U.shape[0]
    X = U - identity(n)
    r = op_norm(X)
    if r >= 1:
        raise BranchError(f"series diverges: ||U - I|| = {r:.3f}")
    total = 0j
    P = identity(n)
    for k in range(1, max_terms + 1):
        P = P @ X
        term = np.trace(P) / k
        total += term if k % 2 else -term
        # remaining tail is at most n r^(k+1) / ((k+1)(1-r))
        if n * r ** (k + 1) / ((k + 1) * (1 - r)) < 1e-15:
            break
    return complex(total)


def tr_log_eig(U: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> complex:
    """Sum of principal logarithms of the eigenvalues of a normal matrix."""
    lam = np.linalg.eigvals(U)
    gap = float(np.min(np.abs(lam + 1))) if lam.size else np.inf
    if gap < tol.log_branch_gap:
        raise BranchError(f"eigenvalue within {gap:.2e} of -1; principal branch ambiguous")
    return complex(np.sum(np.log(lam)))


def tr_log_unitary(U: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> complex:
    U = _finite(np.asarray(U, dtype=complex))
    check_unitary(U, tol)
    if op_norm(U - identity(U.shape[0])) < SERIES_RADIUS:
        return tr_log_series(U)
    return tr_log_eig(U, tol)


def is_hermitian(h: np.ndarray, atol: float = 1e-9) -> bool:
    return op_norm(h - adjoint(h)) <= atol


def herm_spectral_projection(h: np.ndarray, tol: Tolerances = DEFAULT_TOL,
                             check_defect: bool = True) -> np.ndarray:
    """Spectral projection of a self-adjoint ``h`` onto eigenvalues above 1/2."""
    h = _finite(np.asarray(h, dtype=complex))
    if not is_hermitian(h):
        raise InputError("h is not self-adjoint")
    h = (h + adjoint(h)) / 2
    if check_defect:
        eps = op_norm(h @ h - h)
        if eps >= 2 / 9:
            raise SpectralGapError(f"||h^2 - h|| = {eps:.3f} is not below 2/9")
    w, V = np.linalg.eigh(h)
    gap = float(np.min(np.abs(w - 0.5)))
    if gap < tol.spectral_gap:
        raise SpectralGapError(f"eigenvalue within {gap:.2e} of 1/2")
    W = V[:, w > 0.5]
    return W @ adjoint(W)


def polar_isometry(w: np.ndarray, min_eig: float = 1e-6) -> np.ndarray:
    """``w (w* w)^(-1/2)``, the isometric part of ``w``."""
    w = _finite(np.asarray(w, dtype=complex))
    lam, V = np.linalg.eigh(adjoint(w) @ w)
    if lam.size and lam.min() <= min_eig:
        raise SingularError(f"w*w has eigenvalue {lam.min():.2e}")
    inv_sqrt = (V / np.sqrt(lam)) @ adjoint(V)
    return w @ inv_sqrt


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR with phase correction."""
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_hermitian(n: int, rng: np.random.Generator, norm: float = 1.0) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = (Z + adjoint(Z)) / 2
    return H * (norm / op_norm(H))


def unitary_near_identity(n: int, rng: np.random.Generator, radius: float) -> np.ndarray:
    """``exp(iH)`` with ``||H|| = radius``; then ``||U - I|| <= radius``."""
    return sla.expm(1j * random_hermitian(n, rng, radius))
