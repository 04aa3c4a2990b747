"""Dense matrix helpers: norms, deterministic thin SVD and Gram solves.

Data points are stored as *columns*, so a data matrix ``X`` has shape
``(p, n)`` with ``X[:, j]`` the j-th point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._errors import ParameterError

__all__ = [
    "FactorPair",
    "as_data_matrix",
    "frobenius_norm",
    "l21_norm",
    "column_norms",
    "thin_svd",
    "singular_spectrum",
    "solve_gram",
    "numerical_rank",
    "principal_angles",
]


@dataclass(frozen=True)
class FactorPair:
    """Low-rank factors ``U`` (p x k) and ``V`` (k x n) with prediction ``U @ V``."""

    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        if self.U.ndim != 2 or self.V.ndim != 2 or self.U.shape[1] != self.V.shape[0]:
            raise ParameterError(
                f"incompatible factor shapes {self.U.shape} and {self.V.shape}")

    @property
    def k(self) -> int:
        return self.U.shape[1]

    def product(self) -> np.ndarray:
        return self.U @ self.V


def as_data_matrix(M, name="matrix") -> np.ndarray:
    """Validate ``M`` as a finite, nonempty 2-D float array and return it."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise ParameterError(f"{name} must be 2-D, got shape {A.shape}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise ParameterError(f"{name} must be nonempty, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ParameterError(f"{name} contains NaN or Inf")
    return A


def frobenius_norm(M) -> float:
    return float(np.linalg.norm(np.asarray(M, dtype=float), "fro"))


def column_norms(M) -> np.ndarray:
    """Euclidean norm of every column."""
    return np.linalg.norm(np.asarray(M, dtype=float), axis=0)


def l21_norm(M) -> float:
    """Sum of column Euclidean norms."""
    return float(np.sum(column_norms(M)))


def thin_svd(M, r: int):
    """Rank-``r`` truncated SVD with a deterministic sign convention.

    Parameters
    ----------
    M : array_like, shape (p, n)
    r : int
        Number of leading singular triplets, ``1 <= r <= min(p, n)``.

    Returns
    -------
    U : ndarray, shape (p, r)
    s : ndarray, shape (r,)
        Nonincreasing singular values.
    V : ndarray, shape (n, r)
        Right singular vectors as columns, so ``M ~ U @ diag(s) @ V.T``.

    Notes
    -----
    Each left singular vector is flipped so its first entry that is not
    negligible is positive; the matching right vector is flipped with it.
    """
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise ParameterError(f"expected a 2-D matrix, got shape {A.shape}")
    r = int(r)
    if not 1 <= r <= min(A.shape):
        raise ParameterError(f"rank r={r} outside [1, {min(A.shape)}]")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    U, s, V = U[:, :r].copy(), s[:r].copy(), Vt[:r].T.copy()
    for j in range(r):
        u = U[:, j]
        tol = 1e-12 * np.max(np.abs(u))
        nz = np.flatnonzero(np.abs(u) > tol)
        if nz.size and u[nz[0]] < 0:
            U[:, j] = -u
            V[:, j] = -V[:, j]
    return U, s, V


def singular_spectrum(M) -> np.ndarray:
    """All ``min(p, n)`` singular values of ``M`` in nonincreasing order."""
    return np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)


def numerical_rank(M, rtol=1e-9) -> int:
    s = singular_spectrum(M)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def solve_gram(G, B) -> np.ndarray:
    """Solve ``G X = B`` for a small symmetric positive semidefinite ``G``.

    A Cholesky factorization is used. If ``G`` is singular to working
    precision a ridge ``1e-12 * trace(G) / k`` is added to the diagonal.
    """
    G = np.asarray(G, dtype=float)
    B = np.asarray(B, dtype=float)
    k = G.shape[0]
    if G.shape != (k, k) or B.shape[0] != k:
        raise ParameterError(f"incompatible shapes {G.shape} and {B.shape}")
    G = 0.5 * (G + G.T)
    try:
        c, lower = scipy.linalg.cho_factor(G, check_finite=False)
        d = np.diag(c) ** 2
        if d.min() > k * np.finfo(float).eps * d.max():
            return scipy.linalg.cho_solve((c, lower), B, check_finite=False)
    except np.linalg.LinAlgError:
        pass
    tr = np.trace(G)
    ridge = 1e-12 * tr / k if tr > 0 else 1e-12
    c, lower = scipy.linalg.cho_factor(G + ridge * np.eye(k), check_finite=False)
    return scipy.linalg.cho_solve((c, lower), B, check_finite=False)


def principal_angles(A, B) -> np.ndarray:
    """Principal angles (radians) between the column spaces of ``A`` and ``B``."""
    return scipy.linalg.subspace_angles(np.asarray(A, float), np.asarray(B, float))
