"""Seeded random streams.

Every random draw in the package goes through :func:`make_rng`, a
Philox4x64-10 counter-based generator keyed by ``SeedSequence(seed)`` (or
``SeedSequence([seed, *substream])``).  Gaussian samples are produced with
the Box-Muller transform from pairs of uniform doubles, consumed in order.
"""

import numpy as np


def make_rng(seed, *substream) -> np.random.Generator:
    entropy = [int(seed), *map(int, substream)] if substream else int(seed)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normal samples via Box-Muller, filled in C order."""
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    m = int(np.prod(shape))
    pairs = (m + 1) // 2
    u = rng.random(2 * pairs).reshape(pairs, 2)
    radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))  # 1 - u lies in (0, 1]
    angle = 2.0 * np.pi * u[:, 1]
    z = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)]).ravel()
    return z[:m].reshape(shape)
