"""Validation loss as a function of sketch strategy and dimension."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Union

import pandas as pd

from src.compute.booster import train
from src.ingest.dataset import Dataset
from src.schema.models import BoostParams, SketchStrategy

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["strategy", "k", "valid_loss", "best_iteration"]


@dataclass(frozen=True)
class SweepRow:
    strategy: str
    k: int
    valid_loss: float
    best_iteration: int


def run_sweep(
    train_set: Dataset,
    valid_set: Dataset,
    base: BoostParams,
    strategies: Iterable[SketchStrategy],
    ks: Iterable[int],
    n_threads: int = 1,
) -> list[SweepRow]:
    """Train once per (strategy, k); the unsketched baseline runs once with k = d."""
    ks = sorted(set(ks))
    d = train_set.n_outputs
    rows: list[SweepRow] = []
    for strategy in strategies:
        grid = [d] if strategy == SketchStrategy.NONE else [k for k in ks if k <= d]
        for k in grid:
            params = BoostParams(**{**base.model_dump(), "sketch_strategy": strategy, "k": k})
            model = train(train_set, valid_set, params, n_threads=n_threads)
            best = model.history.best_iteration
            row = SweepRow(
                strategy=strategy.value,
                k=k,
                valid_loss=model.history.valid_loss[best],
                best_iteration=best,
            )
            logger.info("sweep %s k=%d: valid loss %.6f at iteration %d", row.strategy, k, row.valid_loss, best)
            rows.append(row)
    return rows


def write_sweep_csv(rows: list[SweepRow], path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame([asdict(r) for r in rows], columns=SWEEP_COLUMNS).to_csv(path, index=False, float_format="%.17g")
