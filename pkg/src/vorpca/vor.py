r"""Vector outlier regularization (VOR).

A point ``x`` with prediction ``f`` is an outlier when ``||x - f|| > delta``.
Outliers are pulled radially back onto the sphere of radius ``delta``
around ``f``; every other point is left alone.  The same map is the
column-wise minimizer of

.. math::
    \|X - Z\|_{2,1} + \frac{1}{2\delta}\|Z - F\|_F^2 ,

which :func:`vor_variational_solve` evaluates through the proximal
operator of the Euclidean norm.
"""

from __future__ import annotations

import numpy as np

from ._errors import ParameterError
from .linalg import as_data_matrix

__all__ = [
    "prox_l2",
    "prox_l2_columns",
    "vor_regularize_point",
    "vor_regularize",
    "vor_variational_solve",
    "vor_variational_objective",
]


def _check_delta(delta) -> float:
    delta = float(delta)
    if not np.isfinite(delta) or delta <= 0:
        raise ParameterError(f"delta must be a finite positive number, got {delta}")
    return delta


def prox_l2(a, delta):
    r"""Proximal operator of ``delta * ||.||``.

    Returns the minimizer of :math:`\delta\|u\| + \frac12\|u - a\|^2`,
    namely ``max(1 - delta/||a||, 0) * a``.

    Parameters
    ----------
    a : array_like, shape (d,)
    delta : float
        Shrinkage radius, strictly positive.

    Returns
    -------
    ndarray, shape (d,)
    """
    delta = _check_delta(delta)
    a = np.asarray(a, dtype=float)
    na = np.linalg.norm(a)
    if na <= delta:
        return np.zeros_like(a)
    return (1.0 - delta / na) * a


def prox_l2_columns(A, delta) -> np.ndarray:
    """Apply :func:`prox_l2` to every column of ``A``."""
    delta = _check_delta(delta)
    A = np.asarray(A, dtype=float)
    norms = np.linalg.norm(A, axis=0)
    scale = np.zeros_like(norms)
    big = norms > delta
    scale[big] = 1.0 - delta / norms[big]
    return A * scale


def vor_regularize_point(x, f, delta):
    """Regularize one point ``x`` against its prediction ``f``."""
    delta = _check_delta(delta)
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    if x.shape != f.shape:
        raise ParameterError(f"shape mismatch {x.shape} vs {f.shape}")
    r = x - f
    nr = np.linalg.norm(r)
    if nr <= delta:
        return x.copy()
    return f + delta * (r / nr)


def vor_regularize(X, F, delta):
    """Column-wise VOR map.

    Parameters
    ----------
    X : array_like, shape (p, n)
        Observed data, one point per column.
    F : array_like, shape (p, n)
        Predictions for the columns of `X`.
    delta : float
        Tolerance radius.

    Returns
    -------
    X_tilde : ndarray, shape (p, n)
        Regularized data.
    flags : ndarray of bool, shape (n,)
        True for columns farther than `delta` from their prediction.
        A column exactly at distance `delta` is not an outlier.
    """
    delta = _check_delta(delta)
    X = as_data_matrix(X, "X")
    F = as_data_matrix(F, "F")
    if X.shape != F.shape:
        raise ParameterError(f"shape mismatch X{X.shape} vs F{F.shape}")
    R = X - F
    norms = np.linalg.norm(R, axis=0)
    flags = norms > delta
    Xt = X.copy()
    if np.any(flags):
        Xt[:, flags] = F[:, flags] + R[:, flags] * (delta / norms[flags])
    return Xt, flags


def vor_variational_solve(X, F, delta) -> np.ndarray:
    """Minimize ``||X - Z||_{2,1} + ||Z - F||_F^2 / (2 delta)`` over ``Z``.

    The problem separates over columns; with ``u = z - x`` each column is
    the proximal step ``z = x + prox_l2(f - x, delta)``.
    """
    delta = _check_delta(delta)
    X = as_data_matrix(X, "X")
    F = as_data_matrix(F, "F")
    if X.shape != F.shape:
        raise ParameterError(f"shape mismatch X{X.shape} vs F{F.shape}")
    return X + prox_l2_columns(F - X, delta)


def vor_variational_objective(X, Z, F, delta) -> float:
    delta = _check_delta(delta)
    X, Z, F = (np.asarray(M, dtype=float) for M in (X, Z, F))
    if not X.shape == Z.shape == F.shape:
        raise ParameterError("X, Z and F must share one shape")
    return float(np.sum(np.linalg.norm(X - Z, axis=0))
                 + np.sum((Z - F) ** 2) / (2.0 * delta))
