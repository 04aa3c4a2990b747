"""Evaluation: noise-free residual, singular spectra, k-means clustering
accuracy and a method comparison pipeline."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import __version__, defaults
from ._errors import ParameterError
from ._rng import make_rng
from .baselines import (Trl21Config, e2_objective, e21_objective, pca_fit,
                        r1pca_fit, svt_shrink, trl21pca_fit)
from .linalg import as_data_matrix, frobenius_norm, singular_spectrum
from .solver import VorpcaConfig, suggest_delta, vorpca_fit

__all__ = [
    "noise_free_residual",
    "ClusteringResult",
    "lloyd",
    "kmeans",
    "confusion_matrix",
    "clustering_accuracy",
    "SpectrumTable",
    "spectrum_report",
    "ExperimentReport",
    "run_comparison",
    "METHODS",
]


def noise_free_residual(Z, X0) -> float:
    """``||Z - X0||_F``."""
    Z = np.asarray(Z, dtype=float)
    X0 = np.asarray(X0, dtype=float)
    if Z.shape != X0.shape:
        raise ParameterError(f"shape mismatch Z{Z.shape} vs X0{X0.shape}")
    return frobenius_norm(Z - X0)


# --------------------------------------------------------------------------
# k-means

@dataclass
class ClusteringResult:
    """Best-inertia clustering plus the outcome of every restart."""

    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    restarts_used: int
    all_assignments: np.ndarray
    all_inertia: np.ndarray


def _sq_dists(P, C):
    d = (P * P).sum(1)[:, None] - 2.0 * P @ C.T + (C * C).sum(1)[None, :]
    return np.maximum(d, 0.0)


def lloyd(P, C, max_iters=300):
    """Lloyd iterations on the rows of ``P`` from centroids ``C``.

    An empty cluster is reseeded with the point farthest from its current
    centroid (taken from a cluster with more than one member).

    Returns ``(assignments, centroids, inertia_trace)``; the last trace
    entry is the inertia of the returned assignment and centroids.
    """
    P = np.asarray(P, dtype=float)
    C = np.array(C, dtype=float)
    k = C.shape[0]
    a = np.argmin(_sq_dists(P, C), axis=1)
    trace = []
    for _ in range(max_iters):
        counts = np.bincount(a, minlength=k)
        for j in np.flatnonzero(counts == 0):
            far = np.sum((P - C[a]) ** 2, axis=1)
            far[counts[a] <= 1] = -1.0
            i = int(np.argmax(far))
            counts[a[i]] -= 1
            a[i] = j
            counts[j] = 1
        for j in range(k):
            C[j] = P[a == j].mean(axis=0)
        trace.append(float(np.sum((P - C[a]) ** 2)))
        a_new = np.argmin(_sq_dists(P, C), axis=1)
        if np.array_equal(a_new, a):
            break
        a = a_new
    return a, C, trace


def kmeans(X, k_c, restarts=defaults.RESTARTS, seed=defaults.SEED,
           max_iters=defaults.KMEANS_MAX_ITERS) -> ClusteringResult:
    """k-means on the columns of ``X`` with random restarts.

    Restart ``r`` seeds its centroids with ``k_c`` distinct columns drawn
    from the substream ``(seed, r)``, so results do not depend on the order
    in which restarts run.
    """
    X = as_data_matrix(X, "X")
    n = X.shape[1]
    if not 1 <= k_c <= n:
        raise ParameterError(f"k_c must lie in [1, n={n}], got {k_c}")
    if restarts < 1:
        raise ParameterError("restarts must be >= 1")
    P = X.T
    all_a = np.empty((restarts, n), dtype=int)
    all_inertia = np.empty(restarts)
    best = None
    for r in range(restarts):
        rng = make_rng(seed, r)
        idx = rng.choice(n, size=k_c, replace=False)
        a, C, trace = lloyd(P, P[idx], max_iters)
        all_a[r] = a
        all_inertia[r] = trace[-1]
        if best is None or trace[-1] < best[2]:
            best = (a, C, trace[-1])
    return ClusteringResult(best[0], best[1], float(best[2]), restarts, all_a, all_inertia)


# --------------------------------------------------------------------------
# accuracy

def confusion_matrix(assignments, labels) -> np.ndarray:
    """Counts with clusters on rows and classes on columns."""
    a = np.asarray(assignments, dtype=int).ravel()
    y = np.asarray(labels, dtype=int).ravel()
    if a.shape != y.shape:
        raise ParameterError(f"length mismatch {a.size} vs {y.size}")
    if a.size and (a.min() < 0 or y.min() < 0):
        raise ParameterError("ids must be nonnegative")
    M = np.zeros((a.max() + 1 if a.size else 0, y.max() + 1 if y.size else 0), dtype=int)
    np.add.at(M, (a, y), 1)
    return M


def clustering_accuracy(assignments, labels) -> float:
    """Fraction of points matched under the best cluster-to-class bijection.

    The bijection maximizes the trace of the confusion matrix and is found
    exactly by rectangular linear assignment; surplus clusters or classes
    stay unmatched.
    """
    M = confusion_matrix(assignments, labels)
    n = M.sum()
    if n == 0:
        raise ParameterError("empty input")
    rows, cols = linear_sum_assignment(M, maximize=True)
    return float(M[rows, cols].sum() / n)


# --------------------------------------------------------------------------
# spectra

@dataclass
class SpectrumTable:
    """Singular values of several matrices aligned by index.

    ``values[i, j]`` is the (i+1)-th singular value of matrix ``names[j]``;
    shorter spectra are padded with NaN.
    """

    names: list
    values: np.ndarray

    def column(self, name) -> np.ndarray:
        v = self.values[:, self.names.index(name)]
        return v[~np.isnan(v)]

    def to_csv(self) -> str:
        lines = ["index," + ",".join(self.names)]
        for i, row in enumerate(self.values, start=1):
            lines.append(f"{i}," + ",".join("" if np.isnan(v) else repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"


def spectrum_report(matrices) -> SpectrumTable:
    """Spectra of ``{name: matrix}`` (or a list of ``(name, matrix)`` pairs)."""
    items = list(matrices.items()) if hasattr(matrices, "items") else list(matrices)
    if not items:
        raise ParameterError("at least one matrix is required")
    spectra = [singular_spectrum(M) for _, M in items]
    m = max(s.size for s in spectra)
    values = np.full((m, len(items)), np.nan)
    for j, s in enumerate(spectra):
        values[:s.size, j] = s
    return SpectrumTable([name for name, _ in items], values)


# --------------------------------------------------------------------------
# comparison pipeline

METHODS = ("original", "pca", "r1pca", "svt", "trl21", "vorpca_z", "vorpca_v")


@dataclass
class ExperimentReport:
    """JSON-ready metrics; `matrices` holds the representations and is not
    serialized."""

    config: dict
    methods: dict
    matrices: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        return {"schema": 1, "version": __version__, "config": self.config,
                "methods": self.methods}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _vorpca_config(X, params) -> VorpcaConfig:
    params = dict(params)
    k = params.pop("k")
    delta = params.pop("delta", None)
    q = params.pop("delta_quantile", None)
    if (delta is None) == (q is None):
        raise ParameterError("give exactly one of delta and delta_quantile")
    if delta is None:
        delta = suggest_delta(X, k, q)
    opts = {**defaults.VORPCA, **params}
    return VorpcaConfig(k=k, delta=float(delta), **opts)


def run_comparison(X, X0, labels, methods, k_c=None, restarts=defaults.RESTARTS,
                   seed=defaults.SEED, record_time=False) -> ExperimentReport:
    """Run each method, then score its representation.

    Parameters
    ----------
    X : array_like, shape (p, n)
        Observed (possibly corrupted) data.
    X0 : array_like or None
        Clean signal for the noise-free residual; skipped when None.
    labels : array_like or None
        Class ids for the clustering accuracy; skipped when None.
    methods : dict
        ``{kind: params}`` with kinds from :data:`METHODS`. ``pca`` and
        ``r1pca`` take ``k``; ``svt`` and ``trl21`` take ``beta``;
        ``vorpca_z``/``vorpca_v`` take ``k`` and ``delta`` or
        ``delta_quantile``.  ``vorpca_v`` clusters the coefficients ``V``.
    k_c : int, optional
        Cluster count; defaults to the number of classes.
    record_time : bool
        Add wall-clock seconds per method. Off by default so reports are
        reproducible byte for byte.
    """
    X = as_data_matrix(X, "X")
    if X0 is not None:
        X0 = as_data_matrix(X0, "X0")
        if X0.shape != X.shape:
            raise ParameterError("X0 must have the shape of X")
    if labels is not None:
        labels = np.asarray(labels, dtype=int)
        if labels.shape != (X.shape[1],):
            raise ParameterError("one label per column is required")
        if k_c is None:
            k_c = int(np.unique(labels).size)
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ParameterError(f"unknown methods {sorted(unknown)}")

    results, mats = {}, {}
    vor_cache = {}
    for name in [m for m in METHODS if m in methods]:
        params = dict(methods[name] or {})
        t0 = time.perf_counter()
        rec = {"params": params}
        if name == "original":
            Z = X
            emb = X
        elif name == "pca":
            F = pca_fit(X, params["k"])
            Z = emb = F.product()
            rec.update(e2=e2_objective(X, F), e21=e21_objective(X, F))
        elif name == "r1pca":
            info = r1pca_fit(X, params["k"], **{**defaults.R1PCA, **{
                k: v for k, v in params.items() if k != "k"}}, return_info=True)
            Z = emb = info.factors.product()
            rec.update(e2=e2_objective(X, info.factors), e21=e21_objective(X, info.factors),
                       iterations=info.iterations, converged=info.converged)
        elif name == "svt":
            Z = emb = svt_shrink(X, params["beta"])
        elif name == "trl21":
            cfg = Trl21Config(**{**defaults.TRL21, **params})
            info = trl21pca_fit(X, cfg, return_info=True)
            Z = emb = info.Z
            rec.update(objective=info.objective, iterations=info.iterations,
                       converged=info.converged)
        else:
            key = json.dumps(params, sort_keys=True)
            if key not in vor_cache:
                vor_cache[key] = vorpca_fit(X, _vorpca_config(X, params))
            sol = vor_cache[key]
            Z = sol.x_tilde
            emb = sol.V if name == "vorpca_v" else Z
            rec.update(objective=sol.objective, e2=e2_objective(X, sol.factors),
                       e21=e21_objective(X, sol.factors), iterations=sol.iterations,
                       converged=sol.converged, n_outliers=int(sol.flags.sum()))
        if X0 is not None and name != "vorpca_v":
            rec["residual"] = noise_free_residual(Z, X0)
        rec["spectrum"] = singular_spectrum(emb).tolist()
        if labels is not None:
            km = kmeans(emb, k_c, restarts=restarts, seed=seed)
            accs = np.array([clustering_accuracy(a, labels) for a in km.all_assignments])
            rec.update(accuracy_mean=float(accs.mean()), accuracy_sd=float(accs.std()),
                       best_inertia_accuracy=clustering_accuracy(km.assignments, labels))
        if record_time:
            rec["wall_time_s"] = time.perf_counter() - t0
        results[name] = rec
        mats[name] = emb
    config = {"methods": {k: dict(v or {}) for k, v in methods.items()}, "k_c": k_c,
              "restarts": restarts, "seed": seed}
    return ExperimentReport(config, results, mats)
