"""VORPCA: low-rank factorization of outlier-regularized data.

The model jointly fits regularized data ``Xt`` and factors ``U, V``::

    min_{Z, U, V}  ||X - Z||_{2,1} + ||Z - U V||_F^2 / (2 delta)

and is solved by alternating two closed-form steps:

* regularize: ``Xt = vor_regularize(X, U V, delta)``;
* refit: alternating least squares on ``||Xt - U V||_F^2`` using the
  k x k normal equations for ``U`` and ``V``.

Both steps decrease the objective, so the recorded trace is monotone.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._errors import MonotonicityError, ParameterError
from .linalg import FactorPair, as_data_matrix, column_norms, solve_gram, thin_svd
from .vor import vor_regularize, vor_variational_objective

__all__ = [
    "VorpcaConfig",
    "VorpcaSolution",
    "vorpca_objective",
    "vorpca_fit",
    "vorpca_limit_pca",
    "regularize_step",
    "refit_step",
    "suggest_delta",
]

log = logging.getLogger(__name__)

# Relative rise of the objective between rounds tolerated as rounding.
MONOTONE_SLACK = 1e-9


@dataclass
class VorpcaConfig:
    """Controls for :func:`vorpca_fit`.

    ``init="svd"`` starts from the rank-k truncated SVD of the data;
    ``init="given"`` starts from ``init_factors``. With ``accelerate`` set,
    each round also tries an over-relaxed step on the prediction ``U V``
    and keeps it only when it lowers the objective.
    """

    k: int
    delta: float
    max_outer_iters: int = 500
    max_inner_iters: int = 30
    rel_tol: float = 1e-8
    inner_tol: float = 1e-10
    seed: int = 0
    init: str = "svd"
    init_factors: Optional[FactorPair] = None
    accelerate: bool = True
    stat_tol: float = 1e-6
    continuation: bool = True
    continuation_rounds: int = 2000

    def validate(self, p: int, n: int) -> None:
        if int(self.k) != self.k or not 1 <= self.k < p:
            raise ParameterError(f"k must satisfy 1 <= k < p={p}, got {self.k}")
        if not np.isfinite(self.delta) or self.delta <= 0:
            raise ParameterError(f"delta must be positive, got {self.delta}")
        if self.rel_tol <= 0 or self.inner_tol <= 0 or self.stat_tol <= 0:
            raise ParameterError("tolerances must be positive")
        if self.max_outer_iters < 1 or self.max_inner_iters < 1:
            raise ParameterError("iteration caps must be >= 1")
        if self.init not in ("svd", "given"):
            raise ParameterError(f"unknown init {self.init!r}")
        if self.init == "given":
            F = self.init_factors
            if F is None:
                raise ParameterError("init='given' requires init_factors")
            if F.U.shape != (p, self.k) or F.V.shape != (self.k, n):
                raise ParameterError(
                    f"init_factors shapes {F.U.shape}, {F.V.shape} do not match "
                    f"(p={p}, k={self.k}, n={n})")
        if self.k > n:
            warnings.warn(f"k={self.k} exceeds the sample count n={n}", stacklevel=3)


@dataclass
class VorpcaSolution:
    x_tilde: np.ndarray
    factors: FactorPair
    flags: np.ndarray
    objective_trace: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False

    @property
    def U(self):
        return self.factors.U

    @property
    def V(self):
        return self.factors.V

    @property
    def objective(self) -> float:
        return self.objective_trace[-1]


def vorpca_objective(X, Z, F: FactorPair, delta) -> float:
    """``||X - Z||_{2,1} + ||Z - U V||_F^2 / (2 delta)``."""
    X = np.asarray(X, dtype=float)
    if F.U.shape[0] != X.shape[0] or F.V.shape[1] != X.shape[1]:
        raise ParameterError("factor shapes do not match X")
    return vor_variational_objective(X, Z, F.product(), delta)


def vorpca_limit_pca(X, k: int) -> FactorPair:
    """Rank-k truncated SVD factors ``U`` (orthonormal) and ``V = U^T X``.

    This is the large-tolerance limit of VORPCA.
    """
    X = as_data_matrix(X, "X")
    if int(k) != k or not 1 <= k <= min(X.shape):
        raise ParameterError(f"k must lie in [1, {min(X.shape)}], got {k}")
    U, s, V = thin_svd(X, int(k))
    return FactorPair(U, s[:, None] * V.T)


def regularize_step(X, F: FactorPair, delta):
    """Regularize ``X`` against the prediction of ``F``; returns (Xt, flags)."""
    return vor_regularize(X, F.product(), delta)


def refit_step(Xt, F: FactorPair, max_iters=30, tol=1e-10):
    """Alternating least squares for ``min ||Xt - U V||_F^2`` from ``F``.

    Returns the new factors and the number of U/V sweeps performed.
    """
    U, V = F.U, F.V
    prev = np.sum((Xt - U @ V) ** 2)
    sweeps = 0
    for sweeps in range(1, max_iters + 1):
        U = solve_gram(V @ V.T, V @ Xt.T).T
        V = solve_gram(U.T @ U, U.T @ Xt)
        cur = np.sum((Xt - U @ V) ** 2)
        if prev - cur <= tol * prev:
            break
        prev = cur
    return FactorPair(U, V), sweeps


def _extrapolate(F_new: FactorPair, F_old: FactorPair, omega: float) -> FactorPair:
    # Best rank-k approximation of F_new + omega (F_new - F_old), done on
    # the rank-2k factored form so no p x n SVD is needed.
    k = F_new.k
    A = np.hstack([(1.0 + omega) * F_new.U, -omega * F_old.U])
    B = np.vstack([F_new.V, F_old.V])
    Qa, Ra = np.linalg.qr(A)
    Qb, Rb = np.linalg.qr(B.T)
    u, s, vt = np.linalg.svd(Ra @ Rb.T)
    U = Qa @ u[:, :k]
    V = s[:k, None] * (Qb @ vt[:k].T).T
    return FactorPair(U, V)


def _iterate(X, F, delta, cfg, max_rounds):
    """Regularize/refit rounds at a fixed tolerance, starting from ``F``."""
    n = X.shape[1]

    def evaluate(F):
        P = F.product()
        Xt, flags = vor_regularize(X, P, delta)
        return Xt, flags, vor_variational_objective(X, Xt, P, delta)

    Xt, flags, obj = evaluate(F)
    trace = [obj]
    # An objective this small is rounding error of an exact fit.
    floor = 100 * np.finfo(float).eps * np.sqrt(n) * np.linalg.norm(X)
    if obj <= floor:
        return F, Xt, flags, trace, 0, True
    omega = 1.0
    converged = False
    it = 0
    for it in range(1, max_rounds + 1):
        F_new, _ = refit_step(Xt, F, cfg.max_inner_iters, cfg.inner_tol)
        Xt_new, flags_new, obj_new = evaluate(F_new)
        plain_obj = obj_new
        # ||dF|| / delta is the norm of the projected gradient of the
        # objective with Z eliminated; each column contributes at most 1.
        stationarity = (np.linalg.norm(F_new.product() - F.product())
                        / (delta * np.sqrt(n)))
        if cfg.accelerate:
            F_ext = _extrapolate(F_new, F, omega)
            Xt_e, flags_e, obj_e = evaluate(F_ext)
            if obj_e < obj_new:
                F_new, Xt_new, flags_new, obj_new = F_ext, Xt_e, flags_e, obj_e
                omega *= 2.0
            else:
                omega = 1.0

        if obj_new > obj + MONOTONE_SLACK * abs(obj):
            raise MonotonicityError(
                f"objective rose from {obj!r} to {obj_new!r} at round {it}")
        F, Xt, flags = F_new, Xt_new, flags_new
        trace.append(obj_new)
        # A relative-decrease test alone stops too early for small delta,
        # where each plain round moves the prediction by about delta.
        done = (obj - plain_obj <= cfg.rel_tol * max(abs(obj), np.finfo(float).tiny)
                and stationarity <= cfg.stat_tol) or obj_new <= floor
        obj = obj_new
        if done:
            converged = True
            break
    return F, Xt, flags, trace, it, converged


def vorpca_fit(X, cfg: VorpcaConfig) -> VorpcaSolution:
    """Fit VORPCA to the columns of ``X``.

    Parameters
    ----------
    X : array_like, shape (p, n)
    cfg : VorpcaConfig

    Returns
    -------
    VorpcaSolution
        ``objective_trace[0]`` is the objective right after the first
        regularization of the starting prediction; one entry is appended
        per outer round.

    Raises
    ------
    ParameterError
        On non-finite data or an invalid configuration.
    MonotonicityError
        If the objective rises by more than ``MONOTONE_SLACK`` relative.

    Notes
    -----
    When ``delta`` is far below the median residual of the starting fit
    and ``cfg.continuation`` is set, the starting factors are first carried
    through a short sequence of decreasing tolerances (a factor 10 apart).
    Only the rounds at the requested ``delta`` are recorded.
    """
    X = as_data_matrix(X, "X")
    p, n = X.shape
    cfg.validate(p, n)
    delta = float(cfg.delta)

    if cfg.init == "svd" and cfg.k > n:
        # more factors than samples: pad with an orthonormal complement
        U = np.linalg.svd(X, full_matrices=True)[0][:, :cfg.k]
        F = FactorPair(U, U.T @ X)
    elif cfg.init == "svd":
        F = vorpca_limit_pca(X, cfg.k)
    else:
        F = FactorPair(np.array(cfg.init_factors.U, float),
                       np.array(cfg.init_factors.V, float))

    if cfg.continuation:
        d = float(np.median(column_norms(X - F.product())))
        while d > 10.0 * delta:
            F = _iterate(X, F, d, cfg, cfg.continuation_rounds)[0]
            d /= 10.0

    F, Xt, flags, trace, it, converged = _iterate(X, F, delta, cfg, cfg.max_outer_iters)
    log.debug("vorpca: %d rounds, objective %.6g, converged=%s", it, trace[-1], converged)
    return VorpcaSolution(x_tilde=Xt, factors=F, flags=flags, objective_trace=trace,
                          iterations=it, converged=converged)


def suggest_delta(X, k: int, quantile: float) -> float:
    """Tolerance from the residuals of a rank-k PCA fit.

    Returns the smallest residual norm ``r`` such that at least a
    ``quantile`` fraction of the column residuals are ``<= r``. If that is
    zero, falls back to ``1e-8 * ||X||_F / sqrt(n)``.
    """
    if not 0 < quantile < 1:
        raise ParameterError(f"quantile must lie in (0, 1), got {quantile}")
    X = as_data_matrix(X, "X")
    n = X.shape[1]
    F = vorpca_limit_pca(X, k)
    r = np.sort(column_norms(X - F.product()))
    idx = int(np.ceil(quantile * n - 1e-12)) - 1
    delta = float(r[min(max(idx, 0), n - 1)])
    # Residuals of an exact fit are rounding noise.
    scale = float(np.linalg.norm(X))
    if delta <= 1e-12 * scale or delta == 0.0:
        delta = 1e-8 * scale / np.sqrt(n) if scale > 0 else 1e-8
    return delta
