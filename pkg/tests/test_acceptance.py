"""Desk-scale timing and quality checks. Run with `pytest -m slow`.

The timing check uses the same differencing protocol as `bench` (time of
the longer run minus time of the shorter one) but with 10 and 30 trees
instead of the configured 100 and 200, so it finishes in minutes. The
per-tree difference it measures is the same quantity.
"""

import pytest

from src.compute.booster import train
from src.config import BenchConfig
from src.experiments.benchmark import bench_frame, run_benchmark
from src.ingest.dataset import split_train_valid
from src.ingest.synthetic import generate_synthetic
from src.schema.models import BoostParams, SketchStrategy, TreeParams

pytestmark = pytest.mark.slow

MIN_SPEEDUP = 3.0
QUALITY_TOLERANCE = 0.10


def test_projection_is_faster_at_many_classes():
    config = BenchConfig(
        classes=[5, 25, 100],
        rows=50_000,
        features=20,
        informative=10,
        depth=6,
        trees_low=10,
        trees_high=30,
        strategies=[SketchStrategy.NONE, SketchStrategy.RANDOM_PROJECTION],
        k=5,
    )
    frame = bench_frame(run_benchmark(config, seed=0)).set_index(["strategy", "classes"])["seconds"]
    unsketched = [frame[("none", c)] for c in config.classes]
    assert unsketched == sorted(unsketched)
    assert frame[("none", 100)] >= MIN_SPEEDUP * frame[("random_projection", 100)]


def test_random_sketches_match_full_search_quality():
    data = generate_synthetic(20_000, 20, 10, 25, seed=0)
    train_set, valid_set = split_train_valid(data, 0.2, seed=0)
    losses = {}
    for strategy in (SketchStrategy.NONE, SketchStrategy.RANDOM_PROJECTION, SketchStrategy.RANDOM_SAMPLING):
        params = BoostParams(
            n_trees=300,
            learning_rate=0.05,
            tree=TreeParams(max_depth=6),
            sketch_strategy=strategy,
            k=5,
            early_stopping_rounds=0,
            seed=0,
        )
        history = train(train_set, valid_set, params).history
        losses[strategy] = history.valid_loss[history.best_iteration]
    baseline = losses[SketchStrategy.NONE]
    for strategy in (SketchStrategy.RANDOM_PROJECTION, SketchStrategy.RANDOM_SAMPLING):
        assert losses[strategy] <= baseline * (1 + QUALITY_TOLERANCE)
