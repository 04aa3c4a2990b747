"""Reference factorizations: PCA, R1-PCA, singular value thresholding and
trace-norm regularized L21 PCA."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._errors import MonotonicityError, ParameterError
from .linalg import FactorPair, as_data_matrix, column_norms, thin_svd
from .solver import vorpca_limit_pca
from .vor import prox_l2_columns

__all__ = [
    "pca_fit",
    "r1pca_fit",
    "R1pcaResult",
    "svt_shrink",
    "Trl21Config",
    "Trl21Result",
    "trl21pca_fit",
    "trl21_objective",
    "e2_objective",
    "e21_objective",
]


def _residual(X, F: FactorPair):
    X = np.asarray(X, dtype=float)
    if F.U.shape[0] != X.shape[0] or F.V.shape[1] != X.shape[1]:
        raise ParameterError(
            f"factors {F.U.shape} x {F.V.shape} do not match X{X.shape}")
    return X - F.product()


def e2_objective(X, F: FactorPair) -> float:
    """Sum of squared column residuals ``||X - U V||_F^2``."""
    return float(np.sum(_residual(X, F) ** 2))


def e21_objective(X, F: FactorPair) -> float:
    """Sum of column residual norms ``||X - U V||_{2,1}``."""
    return float(np.sum(column_norms(_residual(X, F))))


def pca_fit(X, k: int) -> FactorPair:
    """Rank-k PCA (no centering) by truncated SVD."""
    return vorpca_limit_pca(X, k)


@dataclass
class R1pcaResult:
    factors: FactorPair
    objective_trace: list
    iterations: int
    converged: bool


def r1pca_fit(X, k: int, max_iters: int = 500, tol: float = 1e-10,
              init: FactorPair | None = None, return_info: bool = False):
    """R1-PCA: minimize ``||X - U V||_{2,1}`` by iteratively reweighted
    least squares.

    Each round weights column ``i`` by ``1 / max(r_i, eps)`` where ``r_i``
    is its current residual norm and ``eps = 1e-8 ||X||_F / sqrt(n)``, then
    solves the weighted rank-k problem exactly: ``U`` holds the top-k left
    singular vectors of ``X diag(sqrt(w))`` and ``V = U^T X``.

    Starts from the PCA factors unless `init` is given. Rounds stop when
    the relative objective decrease drops below `tol`.
    A round that would raise the objective is discarded, so the returned
    trace is nonincreasing.
    """
    X = as_data_matrix(X, "X")
    p, n = X.shape
    if int(k) != k or not 1 <= k <= min(p, n):
        raise ParameterError(f"k must lie in [1, {min(p, n)}], got {k}")
    eps = 1e-8 * np.linalg.norm(X) / np.sqrt(n)
    if eps == 0:
        eps = 1e-300

    if init is None:
        F = pca_fit(X, k)
    else:
        if init.U.shape != (p, k) or init.V.shape != (k, n):
            raise ParameterError("init factors do not match X and k")
        F = init
    obj = e21_objective(X, F)
    trace = [obj]
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        w = 1.0 / np.maximum(column_norms(X - F.product()), eps)
        U, _, _ = thin_svd(X * np.sqrt(w), k)
        F_new = FactorPair(U, U.T @ X)
        obj_new = e21_objective(X, F_new)
        if obj_new > obj * (1 + 1e-9):
            # floored weights break the majorization; keep the better iterate
            converged = True
            break
        F = F_new
        trace.append(obj_new)
        if obj - obj_new <= tol * obj:
            converged = True
            break
        obj = obj_new
    if trace[-1] > trace[0] * (1 + 1e-9):
        raise MonotonicityError("R1-PCA objective increased")
    if return_info:
        return R1pcaResult(F, trace, it, converged)
    return F


def svt_shrink(X, beta) -> np.ndarray:
    """Singular value soft-thresholding ``U (S - beta I)_+ V^T``.

    This is the minimizer of ``0.5 ||X - Z||_F^2 + beta ||Z||_tr``.
    """
    beta = float(beta)
    if not beta > 0:
        raise ParameterError(f"beta must be positive, got {beta}")
    X = as_data_matrix(X, "X")
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    s = np.maximum(s - beta, 0.0)
    r = int(np.count_nonzero(s))
    return (U[:, :r] * s[:r]) @ Vt[:r]


@dataclass
class Trl21Config:
    """Solver controls for :func:`trl21pca_fit`.

    `penalty` is the augmented Lagrangian parameter of the splitting; it
    only affects the speed of convergence.
    """

    beta: float
    penalty: float = 1.0
    max_iters: int = 5000
    primal_tol: float = 1e-6
    dual_tol: float = 1e-6

    def validate(self):
        for name in ("beta", "penalty", "primal_tol", "dual_tol"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be positive, got {v}")
        if self.max_iters < 1:
            raise ParameterError("max_iters must be >= 1")


@dataclass
class Trl21Result:
    Z: np.ndarray
    objective: float
    iterations: int
    converged: bool
    objective_trace: list = field(default_factory=list)


def trl21_objective(X, Z, beta) -> float:
    """``||X - Z||_{2,1} + beta ||Z||_tr``."""
    X = np.asarray(X, dtype=float)
    Z = np.asarray(Z, dtype=float)
    return float(np.sum(column_norms(X - Z))
                 + beta * np.sum(np.linalg.svd(Z, compute_uv=False)))


def trl21pca_fit(X, cfg: Trl21Config, return_info: bool = False):
    """Minimize ``||X - Z||_{2,1} + beta ||Z||_tr`` by ADMM.

    The splitting is ``E + Z = X`` with ``E`` carrying the L21 term::

        Z <- svt_shrink(X - E + Y/mu, beta/mu)
        E <- prox_l2_columns(X - Z + Y/mu, 1/mu)
        Y <- Y + mu (X - Z - E)

    Iteration stops when the primal residual ``||X - Z - E||`` and the dual
    residual ``mu ||E - E_prev||`` both fall below their tolerances relative
    to ``||X||_F``. The returned ``Z`` comes from the thresholding step and
    is therefore exactly low rank.
    """
    cfg.validate()
    X = as_data_matrix(X, "X")
    mu = float(cfg.penalty)
    beta = float(cfg.beta)
    scale = max(np.linalg.norm(X), np.finfo(float).tiny)

    E = np.zeros_like(X)
    Y = np.zeros_like(X)
    Z = np.zeros_like(X)
    converged = False
    trace = []
    it = 0
    for it in range(1, cfg.max_iters + 1):
        A = X - E + Y / mu
        if np.any(A):
            Z = svt_shrink(A, beta / mu)
        else:
            Z = np.zeros_like(X)
        E_prev = E
        E = prox_l2_columns(X - Z + Y / mu, 1.0 / mu)
        R = X - Z - E
        Y = Y + mu * R
        primal = np.linalg.norm(R) / scale
        dual = mu * np.linalg.norm(E - E_prev) / scale
        if it % 50 == 0:
            trace.append(trl21_objective(X, Z, beta))
        if primal <= cfg.primal_tol and dual <= cfg.dual_tol:
            converged = True
            break
    obj = trl21_objective(X, Z, beta)
    trace.append(obj)
    if return_info:
        return Trl21Result(Z, obj, it, converged, trace)
    return Z
