"""Loss values, gradients and diagonal Hessians for the three task kinds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, log_softmax, softmax

from src.errors import InvalidTargetError, ShapeMismatchError
from src.schema.models import TaskKind

HESSIAN_FLOOR = 1e-16


@dataclass(frozen=True)
class GradHess:
    """n x d gradients and n x d diagonal Hessians of the per-sample loss."""

    grad: np.ndarray
    hess: np.ndarray


def _check_shapes(targets: np.ndarray, raw_scores: np.ndarray) -> None:
    if targets.shape != raw_scores.shape or targets.ndim != 2:
        raise ShapeMismatchError(f"targets {targets.shape} and raw scores {raw_scores.shape} must match (n x d)")


def grad_hess_mse(targets: np.ndarray, raw_scores: np.ndarray) -> GradHess:
    """l = 1/2 ||y - a||^2: G = a - y, H = 1."""
    _check_shapes(targets, raw_scores)
    return GradHess(grad=raw_scores - targets, hess=np.ones_like(raw_scores, dtype=np.float64))


def grad_hess_sigmoid_bce(targets: np.ndarray, raw_scores: np.ndarray) -> GradHess:
    """Per-label binary cross-entropy on sigmoid(a)."""
    _check_shapes(targets, raw_scores)
    if not np.isin(targets, (0.0, 1.0)).all():
        raise InvalidTargetError("multilabel targets must be 0/1")
    p = expit(raw_scores)
    hess = np.maximum(p * (1.0 - p), HESSIAN_FLOOR)
    return GradHess(grad=p - targets, hess=hess)


def grad_hess_softmax(targets: np.ndarray, raw_scores: np.ndarray) -> GradHess:
    """Categorical cross-entropy on softmax(a); H is the diagonal p(1 - p)."""
    _check_shapes(targets, raw_scores)
    if not (np.isin(targets, (0.0, 1.0)).all() and (targets.sum(axis=1) == 1.0).all()):
        raise InvalidTargetError("multiclass targets must be one-hot rows")
    p = softmax(raw_scores, axis=1)
    hess = np.maximum(p * (1.0 - p), HESSIAN_FLOOR)
    return GradHess(grad=p - targets, hess=hess)


def grad_hess(targets: np.ndarray, raw_scores: np.ndarray, task: TaskKind) -> GradHess:
    """Dispatch on task kind."""
    if task == TaskKind.MULTICLASS:
        return grad_hess_softmax(targets, raw_scores)
    if task == TaskKind.MULTILABEL:
        return grad_hess_sigmoid_bce(targets, raw_scores)
    return grad_hess_mse(targets, raw_scores)


def per_sample_loss(targets: np.ndarray, raw_scores: np.ndarray, task: TaskKind) -> np.ndarray:
    """Loss of each row whose derivatives grad_hess returns.

    multiclass: -log softmax(a)[true]; multilabel: sum of per-label BCE;
    regression: 1/2 ||y - a||^2.
    """
    _check_shapes(targets, raw_scores)
    if task == TaskKind.MULTICLASS:
        return -(targets * log_softmax(raw_scores, axis=1)).sum(axis=1)
    if task == TaskKind.MULTILABEL:
        return (np.logaddexp(0.0, raw_scores) - targets * raw_scores).sum(axis=1)
    return 0.5 * ((raw_scores - targets) ** 2).sum(axis=1)


def loss_value(targets: np.ndarray, raw_scores: np.ndarray, task: TaskKind) -> float:
    """Reported loss: CE (multiclass), mean BCE over labels, or MSE over all entries."""
    _check_shapes(targets, raw_scores)
    if task == TaskKind.MULTICLASS:
        return float(per_sample_loss(targets, raw_scores, task).mean())
    if task == TaskKind.MULTILABEL:
        return float((np.logaddexp(0.0, raw_scores) - targets * raw_scores).mean())
    return float(((raw_scores - targets) ** 2).mean())


def output_transform(raw_scores: np.ndarray, task: TaskKind) -> np.ndarray:
    """Raw scores -> probabilities (softmax / sigmoid) or values (identity)."""
    if task == TaskKind.MULTICLASS:
        return softmax(raw_scores, axis=1)
    if task == TaskKind.MULTILABEL:
        return expit(raw_scores)
    return raw_scores.copy()
