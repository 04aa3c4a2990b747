"""Synthetic datasets and block-occlusion corruption.

All generators are pure functions of their arguments, seed included.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

from ._errors import ParameterError
from ._rng import gaussian, make_rng
from .linalg import as_data_matrix

__all__ = [
    "LabeledDataset",
    "ToyLineSpec",
    "OcclusionSpec",
    "canonical_toy_line",
    "gen_toy_line",
    "gen_lowrank_blobs",
    "inject_occlusion",
]


@dataclass
class LabeledDataset:
    data: np.ndarray
    labels: np.ndarray
    c: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        if self.labels.shape != (self.data.shape[1],):
            raise ParameterError("one label per column is required")
        if self.labels.min() < 0 or self.labels.max() >= self.c:
            raise ParameterError(f"labels must lie in [0, {self.c})")
        if np.unique(self.labels).size != self.c:
            raise ParameterError("every class must be nonempty")


@dataclass
class ToyLineSpec:
    """A line through the origin with a few planted outliers.

    Inliers sit at ``n_inliers`` evenly spaced positions in
    ``[-extent, extent]`` along `direction`, plus isotropic gaussian noise.
    Outliers are placed exactly at `outlier_offsets`.
    """

    n_inliers: int = 8
    n_outliers: int = 2
    direction: tuple = (1.0, 0.0)
    inlier_noise_sigma: float = 0.1
    outlier_offsets: list = field(default_factory=lambda: [[4.0, -5.0], [-4.0, 5.0]])
    extent: float = 5.0
    seed: int = 0

    def validate(self):
        d = np.asarray(self.direction, dtype=float)
        if d.shape != (2,) or abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise ParameterError("direction must be a unit 2-vector")
        if self.n_inliers < 0 or self.n_outliers < 0 or self.n_inliers + self.n_outliers < 1:
            raise ParameterError("counts must be nonnegative with at least one point")
        if len(self.outlier_offsets) != self.n_outliers:
            raise ParameterError("need exactly one offset per outlier")
        if self.inlier_noise_sigma < 0:
            raise ParameterError("noise sigma must be nonnegative")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["direction"] = tuple(d.get("direction", (1.0, 0.0)))
        return cls(**d)


def canonical_toy_line() -> ToyLineSpec:
    """The toy configuration shipped in ``toy_line.json``."""
    text = resources.files("vorpca").joinpath("toy_line.json").read_text()
    return ToyLineSpec.from_dict(json.loads(text))


def gen_toy_line(spec: ToyLineSpec | None = None) -> LabeledDataset:
    """2-D toy data; label 0 marks inliers and label 1 outliers."""
    spec = canonical_toy_line() if spec is None else spec
    spec.validate()
    rng = make_rng(spec.seed)
    d = np.asarray(spec.direction, dtype=float)
    if spec.n_inliers == 1:
        t = np.zeros(1)
    else:
        t = np.linspace(-spec.extent, spec.extent, spec.n_inliers)
    inliers = np.outer(d, t) + spec.inlier_noise_sigma * gaussian(rng, (2, spec.n_inliers))
    outliers = np.asarray(spec.outlier_offsets, dtype=float).reshape(-1, 2).T
    X = np.hstack([inliers, outliers])
    labels = np.r_[np.zeros(spec.n_inliers, int), np.ones(spec.n_outliers, int)]
    c = 2 if spec.n_inliers and spec.n_outliers else 1
    if c == 1:
        labels[:] = 0
    return LabeledDataset(X, labels, c)


def gen_lowrank_blobs(p, n, k_true, c, noise_sigma, seed, separation=3.0, spread=1.0):
    """Class-structured rank-``k_true`` signal plus dense gaussian noise.

    Class centers and within-class offsets live in a random
    ``k_true``-dimensional subspace; labels cycle ``0, 1, ..., c-1``.
    Entries of the clean signal are of order one.

    Returns
    -------
    dataset : LabeledDataset
        Noisy data ``X0 + noise_sigma * G`` with class labels.
    X0 : ndarray, shape (p, n)
        The clean signal.
    """
    if not 1 <= k_true < p:
        raise ParameterError(f"need 1 <= k_true < p, got k_true={k_true}, p={p}")
    if not 1 <= c <= n:
        raise ParameterError(f"need 1 <= c <= n, got c={c}, n={n}")
    if noise_sigma < 0:
        raise ParameterError("noise_sigma must be nonnegative")
    rng = make_rng(seed)
    basis, _ = np.linalg.qr(gaussian(rng, (p, k_true)))
    centers = separation * gaussian(rng, (k_true, c))
    labels = np.arange(n) % c
    coefs = centers[:, labels] + spread * gaussian(rng, (k_true, n))
    X0 = np.sqrt(p / k_true) * (basis @ coefs) / max(separation, spread)
    noise = gaussian(rng, (p, n))
    X = X0 + noise_sigma * noise if noise_sigma > 0 else X0.copy()
    return LabeledDataset(X, labels, c), X0


@dataclass
class OcclusionSpec:
    """Rectangular occlusion of image columns (reshaped row-major)."""

    image_rows: int
    image_cols: int
    block_rows: int = 4
    block_cols: int = 5
    fraction: float = 0.1
    fill_value: float = 0.0
    seed: int = 0

    def validate(self):
        if min(self.image_rows, self.image_cols, self.block_rows, self.block_cols) < 1:
            raise ParameterError("image and block sizes must be positive")
        if self.block_rows > self.image_rows or self.block_cols > self.image_cols:
            raise ParameterError("block does not fit inside the image")
        if not 0 < self.fraction <= 1:
            raise ParameterError("fraction must lie in (0, 1]")


def inject_occlusion(X, spec: OcclusionSpec):
    """Overwrite a random block in ``ceil(fraction * n)`` random columns.

    Returns
    -------
    X_corrupted : ndarray
    mask : ndarray of bool, shape (n,)
        True for corrupted columns.
    """
    spec.validate()
    X = as_data_matrix(X, "X")
    p, n = X.shape
    if p != spec.image_rows * spec.image_cols:
        raise ParameterError(
            f"p={p} does not match a {spec.image_rows}x{spec.image_cols} image")
    m = min(n, math.ceil(spec.fraction * n - 1e-9))
    rng = make_rng(spec.seed)
    cols = np.sort(rng.permutation(n)[:m])
    out = X.copy()
    for j in cols:
        r0 = int(rng.integers(0, spec.image_rows - spec.block_rows + 1))
        c0 = int(rng.integers(0, spec.image_cols - spec.block_cols + 1))
        img = out[:, j].reshape(spec.image_rows, spec.image_cols)
        img[r0:r0 + spec.block_rows, c0:c0 + spec.block_cols] = spec.fill_value
        out[:, j] = img.ravel()
    mask = np.zeros(n, dtype=bool)
    mask[cols] = True
    return out, mask
