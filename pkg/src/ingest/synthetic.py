"""Synthetic multiclass data for the scaling benchmark."""

from __future__ import annotations

import numpy as np

from src.ingest.dataset import Dataset
from src.schema.models import TaskKind


def _hypercube_vertices(rng: np.random.Generator, n_classes: int, n_informative: int) -> np.ndarray:
    """Distinct {-1, +1} vertices, one per class."""
    if n_informative <= 16:
        picks = rng.choice(2**n_informative, size=n_classes, replace=False)
        bits = (picks[:, None] >> np.arange(n_informative)[None, :]) & 1
        return bits.astype(np.float64) * 2.0 - 1.0
    seen: set[bytes] = set()
    vertices = []
    while len(vertices) < n_classes:
        v = rng.choice([-1.0, 1.0], size=n_informative)
        key = v.tobytes()
        if key not in seen:
            seen.add(key)
            vertices.append(v)
    return np.vstack(vertices)


def generate_synthetic(
    n_rows: int,
    n_features: int,
    n_informative: int,
    n_classes: int,
    seed: int,
    n_redundant: int = 0,
    class_sep: float = 2.0,
) -> Dataset:
    """Gaussian clusters around hypercube vertices.

    Informative columns come first (centroid + unit Gaussian noise), then
    `n_redundant` random linear combinations of them, then pure noise.
    Labels are assigned round-robin and shuffled, so class counts differ by
    at most one.
    """
    if n_classes < 2:
        raise ValueError("n_classes must be >= 2")
    if n_rows < 1 or n_informative < 1:
        raise ValueError("n_rows and n_informative must be >= 1")
    if n_informative + n_redundant > n_features:
        raise ValueError("n_informative + n_redundant must not exceed n_features")
    if n_informative < 63 and n_classes > 2**n_informative:
        raise ValueError(f"{n_classes} classes need more than {n_informative} informative features")

    rng = np.random.default_rng(seed)
    centroids = _hypercube_vertices(rng, n_classes, n_informative) * class_sep
    labels = rng.permutation(np.arange(n_rows) % n_classes)

    features = np.empty((n_rows, n_features), dtype=np.float64)
    informative = centroids[labels] + rng.standard_normal((n_rows, n_informative))
    features[:, :n_informative] = informative
    if n_redundant:
        mixing = rng.uniform(-1.0, 1.0, size=(n_informative, n_redundant))
        features[:, n_informative : n_informative + n_redundant] = informative @ mixing
    n_noise = n_features - n_informative - n_redundant
    if n_noise:
        features[:, n_informative + n_redundant :] = rng.standard_normal((n_rows, n_noise))

    targets = np.zeros((n_rows, n_classes), dtype=np.float64)
    targets[np.arange(n_rows), labels] = 1.0
    return Dataset(features=features, targets=targets, task=TaskKind.MULTICLASS)
