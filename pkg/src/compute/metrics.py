"""Evaluation metrics: cross-entropy, accuracy, RMSE and R^2."""

from __future__ import annotations

import numpy as np

from src.errors import InvalidTargetError, ShapeMismatchError
from src.schema.models import MetricReport, TaskKind

PROB_CLAMP = 1e-15
R2_FLOOR = -1e6


def _as_2d(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    return a.reshape(-1, 1) if a.ndim == 1 else a


def _check(targets: np.ndarray, outputs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    targets, outputs = _as_2d(targets), _as_2d(outputs)
    if targets.shape != outputs.shape:
        raise ShapeMismatchError(f"targets {targets.shape} and predictions {outputs.shape} differ")
    if targets.shape[0] == 0:
        raise ShapeMismatchError("no rows to evaluate")
    return targets, outputs


def cross_entropy(targets: np.ndarray, probabilities: np.ndarray, task: TaskKind) -> float:
    """Mean -log p_true (multiclass) or mean BCE over rows and labels (multilabel)."""
    targets, probabilities = _check(targets, probabilities)
    p = np.clip(probabilities, PROB_CLAMP, 1.0 - PROB_CLAMP)
    if task == TaskKind.MULTICLASS:
        p_true = p[np.arange(p.shape[0]), np.argmax(targets, axis=1)]
        return float(-np.log(p_true).mean())
    if task == TaskKind.MULTILABEL:
        return float(-(targets * np.log(p) + (1.0 - targets) * np.log1p(-p)).mean())
    raise InvalidTargetError("cross-entropy is defined for classification tasks only")


def rmse(targets: np.ndarray, predictions: np.ndarray) -> float:
    targets, predictions = _check(targets, predictions)
    return float(np.sqrt(np.mean((targets - predictions) ** 2)))


def accuracy(targets: np.ndarray, probabilities: np.ndarray) -> float:
    """Share of rows whose argmax matches the true class (ties -> lowest index)."""
    targets, probabilities = _check(targets, probabilities)
    return float(np.mean(np.argmax(targets, axis=1) == np.argmax(probabilities, axis=1)))


def r_squared(targets: np.ndarray, predictions: np.ndarray) -> float:
    """Unweighted mean over outputs of 1 - SS_res / SS_tot.

    A constant target column scores 0 when predicted exactly and R2_FLOOR
    otherwise; every output is floored at R2_FLOOR.
    """
    targets, predictions = _check(targets, predictions)
    ss_res = ((targets - predictions) ** 2).sum(axis=0)
    ss_tot = ((targets - targets.mean(axis=0)) ** 2).sum(axis=0)
    scores = np.empty(targets.shape[1])
    constant = ss_tot == 0.0
    scores[constant] = np.where(ss_res[constant] == 0.0, 0.0, R2_FLOOR)
    scores[~constant] = np.maximum(1.0 - ss_res[~constant] / ss_tot[~constant], R2_FLOOR)
    return float(scores.mean())


def evaluate(targets: np.ndarray, outputs: np.ndarray, task: TaskKind) -> MetricReport:
    """Task's metric pair on transformed predictions."""
    targets, outputs = _check(targets, outputs)
    n = targets.shape[0]
    if task == TaskKind.MULTICLASS:
        return MetricReport(
            primary_name="cross_entropy",
            primary_value=cross_entropy(targets, outputs, task),
            auxiliary_name="accuracy",
            auxiliary_value=accuracy(targets, outputs),
            n_evaluated=n,
        )
    if task == TaskKind.MULTILABEL:
        return MetricReport(
            primary_name="cross_entropy",
            primary_value=cross_entropy(targets, outputs, task),
            n_evaluated=n,
        )
    return MetricReport(
        primary_name="rmse",
        primary_value=rmse(targets, outputs),
        auxiliary_name="r_squared",
        auxiliary_value=r_squared(targets, outputs),
        n_evaluated=n,
    )
