"""Shared fixtures: seeded generators, tiny datasets and small parameter sets."""

import numpy as np
import pytest

from src.ingest.dataset import Dataset
from src.ingest.synthetic import generate_synthetic
from src.schema.models import BoostParams, TaskKind, TreeParams


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny_multiclass():
    """60 rows, 4 features, 3 classes."""
    return generate_synthetic(60, 4, 2, 3, seed=7)


@pytest.fixture
def tiny_multilabel(rng):
    features = rng.standard_normal((80, 3))
    targets = np.column_stack([features[:, 0] > 0, features[:, 1] + features[:, 2] > 0]).astype(float)
    return Dataset(features=features, targets=targets, task=TaskKind.MULTILABEL)


@pytest.fixture
def tiny_regression(rng):
    features = rng.standard_normal((80, 3))
    targets = np.column_stack([2.0 * features[:, 0], np.sin(features[:, 1]), features[:, 2] ** 2])
    return Dataset(features=features, targets=targets, task=TaskKind.MULTITASK_REGRESSION)


@pytest.fixture
def small_params():
    return BoostParams(
        n_trees=20,
        learning_rate=0.3,
        tree=TreeParams(max_depth=3),
        early_stopping_rounds=0,
        seed=3,
    )
