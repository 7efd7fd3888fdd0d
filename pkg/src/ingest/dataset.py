"""In-memory dataset container and train/validation split."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from src.errors import DatasetError
from src.schema.models import TaskKind


@dataclass(frozen=True)
class Dataset:
    """Features (n x m, NaN allowed), targets (n x d) and the task they belong to."""

    features: np.ndarray
    targets: np.ndarray
    task: TaskKind
    feature_names: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        features = np.ascontiguousarray(self.features, dtype=np.float64)
        targets = np.ascontiguousarray(self.targets, dtype=np.float64)
        if targets.ndim == 1:
            targets = targets.reshape(-1, 1)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "targets", targets)
        if not self.feature_names:
            object.__setattr__(self, "feature_names", [f"f{j}" for j in range(features.shape[1])])
        self.validate()

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.targets.shape[1]

    def validate(self) -> None:
        """Check shape and target invariants for the task."""
        if self.features.ndim != 2:
            raise DatasetError(f"features must be 2-D, got shape {self.features.shape}")
        n, m = self.features.shape
        if n < 1 or m < 1:
            raise DatasetError(f"need at least one row and one feature, got {n}x{m}")
        if self.targets.shape[0] != n:
            raise DatasetError(f"targets have {self.targets.shape[0]} rows, features have {n}")
        if self.n_outputs < 1:
            raise DatasetError("targets need at least one column")
        if len(self.feature_names) != m:
            raise DatasetError(f"{len(self.feature_names)} feature names for {m} features")
        if not np.isfinite(self.targets).all():
            raise DatasetError("targets contain NaN or infinite values")
        if self.task in (TaskKind.MULTICLASS, TaskKind.MULTILABEL):
            if not np.isin(self.targets, (0.0, 1.0)).all():
                raise DatasetError(f"{self.task.value} targets must be 0/1")
        if self.task == TaskKind.MULTICLASS and not (self.targets.sum(axis=1) == 1.0).all():
            raise DatasetError("multiclass target rows must be one-hot")

    def take(self, rows: np.ndarray) -> "Dataset":
        """Row subset, preserving task and feature names."""
        return Dataset(
            features=self.features[rows],
            targets=self.targets[rows],
            task=self.task,
            feature_names=list(self.feature_names),
        )


def split_train_valid(ds: Dataset, valid_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle split; |valid| = round(fraction * n) clamped to [1, n-1]."""
    n = ds.n_rows
    if n < 2:
        raise DatasetError("need at least 2 rows to split")
    if not 0.0 < valid_fraction < 1.0:
        raise ValueError(f"valid_fraction must be in (0, 1), got {valid_fraction}")
    n_valid = int(np.floor(valid_fraction * n + 0.5))
    n_valid = min(max(n_valid, 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    valid_rows = np.sort(perm[:n_valid])
    train_rows = np.sort(perm[n_valid:])
    return ds.take(train_rows), ds.take(valid_rows)
