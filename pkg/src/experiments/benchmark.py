"""Scaling benchmark: seconds per 100 trees against the number of classes.

Each configuration is trained twice, for trees_low and trees_high
iterations, and the difference is reported so fixed setup costs (data
generation, binning) cancel out.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Union

import pandas as pd

from src.compute.booster import train
from src.config import BenchConfig
from src.ingest.synthetic import generate_synthetic
from src.schema.models import BoostParams, SketchStrategy, TreeParams

logger = logging.getLogger(__name__)

BENCH_COLUMNS = ["classes", "strategy", "k", "seconds"]


@dataclass(frozen=True)
class BenchRow:
    classes: int
    strategy: str
    k: int  # search dimension: the class count when unsketched
    seconds: float  # per 100 trees


def _bench_params(config: BenchConfig, strategy: SketchStrategy, k: int, n_trees: int, seed: int) -> BoostParams:
    return BoostParams(
        n_trees=n_trees,
        tree=TreeParams(max_depth=config.depth),
        sketch_strategy=strategy,
        k=k,
        early_stopping_rounds=0,
        seed=seed,
    )


def _timed_fit(dataset, params: BoostParams, n_threads: int) -> float:
    start = time.perf_counter()
    train(dataset, None, params, n_threads=n_threads)
    return time.perf_counter() - start


def run_benchmark(config: BenchConfig, seed: int = 0, n_threads: int = 1) -> list[BenchRow]:
    """One row per (class count, strategy) in grid order."""
    if config.trees_high <= config.trees_low:
        raise ValueError("trees_high must exceed trees_low")
    rows: list[BenchRow] = []
    for n_classes in config.classes:
        dataset = generate_synthetic(config.rows, config.features, config.informative, n_classes, seed)
        for strategy in config.strategies:
            k = n_classes if strategy == SketchStrategy.NONE else min(config.k, n_classes)
            low = _timed_fit(dataset, _bench_params(config, strategy, k, config.trees_low, seed), n_threads)
            high = _timed_fit(dataset, _bench_params(config, strategy, k, config.trees_high, seed), n_threads)
            per_100 = (high - low) * 100.0 / (config.trees_high - config.trees_low)
            if per_100 < 0:
                logger.warning("Negative time difference for %d classes / %s; reporting 0", n_classes, strategy.value)
                per_100 = 0.0
            row = BenchRow(classes=n_classes, strategy=strategy.value, k=k, seconds=per_100)
            logger.info("bench classes=%d strategy=%s k=%d: %.3f s / 100 trees", n_classes, row.strategy, k, per_100)
            rows.append(row)
    return rows


def bench_frame(rows: list[BenchRow]) -> pd.DataFrame:
    return pd.DataFrame([asdict(r) for r in rows], columns=BENCH_COLUMNS)


def write_bench_csv(rows: list[BenchRow], path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    bench_frame(rows).to_csv(path, index=False, float_format="%.6f")


def read_bench_csv(path: Union[str, Path]) -> pd.DataFrame:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Benchmark CSV not found: {path}")
    frame = pd.read_csv(path)
    missing = [c for c in BENCH_COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"benchmark CSV lacks columns {missing}")
    return frame
