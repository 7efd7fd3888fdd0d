"""Boosting loop: derivatives, sketch, tree growth, shrinkage and early stopping."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.compute.losses import grad_hess, loss_value, output_transform
from src.compute.quantizer import BinMapper, fit_bins, transform
from src.compute.sketch import iteration_seed, make_sketch
from src.compute.timing import PhaseTimer, null_timer
from src.compute.tree import Tree, grow_tree_with_leaves, route_binned
from src.errors import DatasetError, ShapeMismatchError
from src.ingest.dataset import Dataset
from src.schema.models import BoostParams, TaskKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainingHistory:
    """Losses after each trained iteration; best_iteration is 0-based."""

    train_loss: list[float] = field(default_factory=list)
    valid_loss: Optional[list[float]] = None
    best_iteration: int = -1


@dataclass(frozen=True)
class Model:
    """Additive ensemble F = sum_t lr * f_t, applied in list order from zero."""

    trees: list[Tree]
    learning_rate: float
    mapper: BinMapper
    task: TaskKind
    n_outputs: int
    n_features: int
    history: TrainingHistory = field(default_factory=TrainingHistory)

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def truncated(self, n_trees: int) -> "Model":
        """The first n_trees trees with the same metadata."""
        return Model(
            trees=self.trees[:n_trees],
            learning_rate=self.learning_rate,
            mapper=self.mapper,
            task=self.task,
            n_outputs=self.n_outputs,
            n_features=self.n_features,
            history=self.history,
        )


def _check_valid(train: Dataset, valid: Dataset) -> None:
    if valid.n_features != train.n_features:
        raise ShapeMismatchError(f"valid has {valid.n_features} features, train has {train.n_features}")
    if valid.n_outputs != train.n_outputs:
        raise ShapeMismatchError(f"valid has {valid.n_outputs} outputs, train has {train.n_outputs}")
    if valid.task != train.task:
        raise DatasetError(f"valid task {valid.task.value} differs from train task {train.task.value}")


def train(
    train: Dataset,
    valid: Optional[Dataset] = None,
    params: Optional[BoostParams] = None,
    n_threads: int = 1,
    timer: Optional[PhaseTimer] = None,
) -> Model:
    """Fit one multivariate tree per iteration on the (sketched) gradients.

    Raw scores start at zero and are updated in place with lr * f_t on the
    training (and validation) rows. With a validation set and
    early_stopping_rounds > 0, training halts once that many iterations
    pass without a strictly lower validation loss, and the returned model
    keeps the trees up to the best iteration. The history covers every
    trained iteration.
    """
    params = params or BoostParams()
    timer = timer or null_timer()
    if valid is not None:
        _check_valid(train, valid)

    task = train.task
    lr = params.learning_rate
    with timer.phase("binning"):
        mapper = fit_bins(train.features, params.max_bins, n_threads)
        binned = transform(train.features, mapper)
        valid_codes = transform(valid.features, mapper).codes if valid is not None else None
    logger.info(
        "Training %s: n=%d m=%d d=%d, %d trees, sketch=%s k=%d",
        task.value,
        train.n_rows,
        train.n_features,
        train.n_outputs,
        params.n_trees,
        params.sketch_strategy.value,
        params.k,
    )

    raw = np.zeros(train.targets.shape, dtype=np.float64)
    valid_raw = np.zeros(valid.targets.shape, dtype=np.float64) if valid is not None else None
    trees: list[Tree] = []
    train_loss: list[float] = []
    valid_loss: list[float] = []
    best_iteration, best_loss = -1, np.inf
    any_split = False

    for t in range(params.n_trees):
        with timer.phase("update"):
            derivatives = grad_hess(train.targets, raw, task)
        with timer.phase("sketch"):
            sketch = make_sketch(
                derivatives.grad, params.sketch_strategy, params.k, iteration_seed(params.seed, t)
            )
        grown = grow_tree_with_leaves(
            binned, derivatives.grad, derivatives.hess, sketch, params.tree, n_threads, timer
        )
        tree = grown.tree
        any_split = any_split or tree.n_internal > 0
        trees.append(tree)

        with timer.phase("update"):
            raw += lr * tree.values[grown.leaf_of_row]
            train_loss.append(loss_value(train.targets, raw, task))
            if valid is not None:
                valid_raw += lr * tree.values[route_binned(tree, valid_codes)]
                valid_loss.append(loss_value(valid.targets, valid_raw, task))

        if valid is None:
            best_iteration = t
            logger.debug("iter %d: train loss %.6f", t, train_loss[-1])
            continue
        logger.debug("iter %d: train loss %.6f, valid loss %.6f", t, train_loss[-1], valid_loss[-1])
        if valid_loss[-1] < best_loss:
            best_iteration, best_loss = t, valid_loss[-1]
        elif params.early_stopping_rounds and t - best_iteration >= params.early_stopping_rounds:
            logger.info(
                "Early stop at iteration %d, best iteration %d (valid loss %.6f)",
                t,
                best_iteration,
                best_loss,
            )
            break

    if not any_split:
        logger.warning("No split was found in %d iterations; every tree is a single leaf", len(trees))

    if valid is not None and params.early_stopping_rounds:
        trees = trees[: best_iteration + 1]

    history = TrainingHistory(
        train_loss=train_loss,
        valid_loss=valid_loss if valid is not None else None,
        best_iteration=best_iteration,
    )
    logger.info("Trained %d trees (kept %d)", len(train_loss), len(trees))
    return Model(
        trees=trees,
        learning_rate=lr,
        mapper=mapper,
        task=task,
        n_outputs=train.n_outputs,
        n_features=train.n_features,
        history=history,
    )


def predict_raw(model: Model, features: np.ndarray) -> np.ndarray:
    """n x d raw scores: lr-weighted sum of tree outputs from zero."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != model.n_features:
        raise ShapeMismatchError(f"model expects {model.n_features} feature columns, got shape {features.shape}")
    codes = transform(features, model.mapper).codes
    raw = np.zeros((features.shape[0], model.n_outputs), dtype=np.float64)
    for tree in model.trees:
        raw += model.learning_rate * tree.values[route_binned(tree, codes)]
    return raw


def predict(model: Model, features: np.ndarray) -> np.ndarray:
    """Softmax probabilities, per-label sigmoids, or raw values for regression."""
    return output_transform(predict_raw(model, features), model.task)
