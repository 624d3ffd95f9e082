"""Dense symmetric eigendecomposition, truncated pseudoinverse, range bases."""
from dataclasses import dataclass

import numpy as np

from . import _kernels

EPS = 2.0 ** -52

# above this order sym_eig hands off to LAPACK; Jacobi is O(n^3) per sweep
JACOBI_MAX_ORDER = 160


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class SymEig:
    """Eigenpairs of a symmetric matrix, eigenvalues in descending order."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def size(self):
        return self.eigenvalues.shape[0]

    @property
    def lambda_max(self):
        return float(self.eigenvalues[0]) if self.size else 0.0

    def reconstruct(self):
        Q = self.eigenvectors
        return (Q * self.eigenvalues) @ Q.T


def default_rank_tol(rows, cols):
    """Relative eigenvalue cutoff ``max(rows, cols) * 2**-52``."""
    return max(rows, cols) * EPS


def _check_symmetric(S):
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise ValueError("matrix has non-finite entries")
    scale = np.max(np.abs(S)) if S.size else 0.0
    if S.size and np.max(np.abs(S - S.T)) > 1e-12 * max(scale, np.finfo(float).tiny):
        raise ValueError("matrix is not symmetric")


def sym_eig(S, method="auto"):
    """Eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    S : (n, n) array_like
        Symmetric to 1e-12 relative.
    method : {"auto", "jacobi", "lapack"}
        ``auto`` runs cyclic Jacobi up to order ``JACOBI_MAX_ORDER`` and
        LAPACK ``syevd`` above.

    Returns
    -------
    SymEig
        Descending eigenvalues; each eigenvector is sign-normalised so that
        its largest-magnitude entry is positive, which makes the output
        deterministic.
    """
    S = np.asarray(S, dtype=np.float64)
    _check_symmetric(S)
    n = S.shape[0]
    Ssym = 0.5 * (S + S.T)
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_ORDER else "lapack"
    if method == "jacobi":
        lam, Q, _ = _kernels.jacobi_eig(Ssym)
    elif method == "lapack":
        lam, Q = np.linalg.eigh(Ssym)
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(-lam, kind="stable")
    lam = np.ascontiguousarray(lam[order])
    Q = np.ascontiguousarray(Q[:, order])
    if n:
        idx = np.argmax(np.abs(Q), axis=0)
        signs = np.sign(Q[idx, np.arange(n)])
        signs[signs == 0] = 1.0
        Q = Q * signs
    return SymEig(lam, Q)


def retained(eig, rank_tol=None):
    """Boolean mask of eigenvalues strictly above ``rank_tol * lambda_max``."""
    if rank_tol is None:
        rank_tol = default_rank_tol(eig.size, eig.size)
    lmax = eig.lambda_max
    if lmax <= 0.0:
        return np.zeros(eig.size, dtype=bool)
    return eig.eigenvalues > rank_tol * lmax


def inverse_eigenvalues(eig, rank_tol=None):
    keep = retained(eig, rank_tol)
    inv = np.zeros(eig.size)
    inv[keep] = 1.0 / eig.eigenvalues[keep]
    return inv


def pseudo_apply(eig, v, rank_tol=None):
    """Apply the truncated pseudoinverse ``S^+ v`` of the decomposed matrix."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (eig.size,):
        raise DimensionError(f"vector of length {v.shape} does not match order {eig.size}")
    if rank_tol is not None and not 0.0 < rank_tol < 1.0:
        raise ValueError("rank_tol must lie in (0, 1)")
    Q = eig.eigenvectors
    return Q @ (inverse_eigenvalues(eig, rank_tol) * (Q.T @ v))


def orthonormal_range_basis(A, rank_tol=None):
    """Orthonormal basis of R(A^T) as the columns of an (n, r) matrix.

    Uses the eigenvectors of ``A^T A`` whose eigenvalues exceed
    ``rank_tol * lambda_max``; ``r`` is the resulting numerical rank.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    m, n = A.shape
    if m == 0 or n == 0:
        raise DimensionError(f"empty matrix of shape {A.shape}")
    if rank_tol is None:
        rank_tol = default_rank_tol(m, n)
    eig = sym_eig(A.T @ A)
    keep = retained(eig, rank_tol)
    return np.ascontiguousarray(eig.eigenvectors[:, keep])


def complement_basis(A, rank_tol=None):
    """Orthonormal basis of N(A), the orthogonal complement of R(A^T)."""
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    m, n = A.shape
    if rank_tol is None:
        rank_tol = default_rank_tol(m, n)
    eig = sym_eig(A.T @ A)
    keep = retained(eig, rank_tol)
    return np.ascontiguousarray(eig.eigenvectors[:, ~keep])
