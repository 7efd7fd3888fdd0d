"""Command line: train, predict, eval, gen, bench, verify-bounds and sweep.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable, Optional

import yaml
from pydantic import ValidationError

from src.compute.booster import Model, predict, predict_raw, train
from src.compute.metrics import evaluate
from src.compute.parallel import resolve_threads
from src.compute.timing import PhaseTimer
from src.config import AppConfig, BenchConfig, VerifyConfig, configure_logging, load_config
from src.data.model_store import load_model, save_model
from src.errors import SketchBoostError, UsageError
from src.experiments.benchmark import bench_frame, run_benchmark, write_bench_csv
from src.experiments.bounds_suite import run_bound_suite
from src.experiments.sweep import run_sweep, write_sweep_csv
from src.ingest.csv_loader import load_csv, load_features_csv, write_dataset_csv, write_matrix_csv
from src.ingest.dataset import Dataset, split_train_valid
from src.ingest.synthetic import generate_synthetic
from src.schema.models import BoostParams, RunConfig, SketchStrategy, TaskKind

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


# -----------------------------------------------------------------------------
# Argument types
# -----------------------------------------------------------------------------


def _strategy(value: str) -> SketchStrategy:
    try:
        return SketchStrategy.parse(value)
    except ValueError:
        choices = ", ".join(s.value for s in SketchStrategy)
        raise argparse.ArgumentTypeError(f"unknown sketch strategy {value!r} (choose from {choices})")


def _strategy_list(value: str) -> list[SketchStrategy]:
    return [_strategy(v) for v in value.split(",") if v.strip()]


def _int_list(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")


def _fraction(value: str) -> float:
    f = float(value)
    if not 0.0 <= f < 1.0:
        raise argparse.ArgumentTypeError(f"fraction must be in [0, 1), got {value}")
    return f


def _task(value: str) -> TaskKind:
    try:
        return TaskKind(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown task {value!r}")


# -----------------------------------------------------------------------------
# Parser
# -----------------------------------------------------------------------------


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="YAML config (default: ./config.yaml if present)")
    common.add_argument("--threads", type=int, default=0, help="worker threads, 0 = one per CPU")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    common.add_argument("--seed", type=int, default=None)
    return common


def _add_boost_flags(p: argparse.ArgumentParser) -> None:
    # None means "take config.yaml / BoostParams default"
    p.add_argument("--trees", type=int, default=None, help="number of boosting iterations")
    p.add_argument("--lr", type=float, default=None, help="learning rate")
    p.add_argument("--sketch", type=_strategy, default=None, help="none, top, sampling, projection, svd")
    p.add_argument("--k", type=int, default=None, help="sketch dimension")
    p.add_argument("--depth", type=int, default=None, help="max tree depth")
    p.add_argument("--lambda", dest="lambda_l2", type=float, default=None, help="L2 leaf regularization")
    p.add_argument("--min-samples-leaf", type=int, default=None)
    p.add_argument("--min-gain", type=float, default=None)
    p.add_argument("--use-hessian", action="store_true", help="score splits with Hessian sums (sketch none only)")
    p.add_argument("--early-stopping", type=int, default=None, help="patience in iterations, 0 disables")
    p.add_argument("--max-bins", type=int, default=None)


def _add_data_flags(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--data", type=Path, required=required, help="CSV with features and targets")
    p.add_argument("--task", type=_task, required=required, help="multiclass, multilabel, multitask_regression")
    p.add_argument("--label", action="append", default=None, help="target column (repeat for several)")
    p.add_argument("--no-header", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="sketchboost", description="Multioutput GBDT with sketched split search.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("train", parents=[common], help="train a model")
    _add_data_flags(p)
    _add_boost_flags(p)
    p.add_argument("--valid", type=Path, default=None, help="validation CSV")
    p.add_argument("--valid-fraction", type=_fraction, default=0.0, help="hold out a seeded share of --data")
    p.add_argument("--out", type=Path, required=True, help="model file")
    p.add_argument("--metrics", type=Path, default=None, help="metrics JSON (default <out>.metrics.json)")
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="write predictions for a CSV")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--drop", action="append", default=None, help="column to ignore (e.g. the label)")
    p.add_argument("--raw", action="store_true", help="write raw scores instead of probabilities")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_predict)

    p = sub.add_parser("eval", parents=[common], help="print metrics of a model on labelled data")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--label", action="append", required=True)
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--out", type=Path, default=None, help="also write the report here")
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("gen", parents=[common], help="write a synthetic multiclass CSV")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--features", type=int, required=True)
    p.add_argument("--informative", type=int, required=True)
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--redundant", type=int, default=0)
    p.add_argument("--class-sep", type=float, default=2.0)
    p.add_argument("--label-column", default="label")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("bench", parents=[common], help="time per 100 trees vs class count")
    p.add_argument("--classes", type=_int_list, default=None)
    p.add_argument("--rows", type=int, default=None)
    p.add_argument("--features", type=int, default=None)
    p.add_argument("--informative", type=int, default=None)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--trees-low", type=int, default=None)
    p.add_argument("--trees-high", type=int, default=None)
    p.add_argument("--strategies", type=_strategy_list, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--out", type=Path, required=True, help="CSV classes,strategy,k,seconds")
    p.add_argument("--plot", type=Path, default=None, help="SVG line plot")
    p.set_defaults(handler=cmd_bench)

    p = sub.add_parser("verify-bounds", parents=[common], help="check sketch error bounds on random matrices")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--n-leaves", type=int, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--out", type=Path, default=None, help="JSON report")
    p.set_defaults(handler=cmd_verify_bounds)

    p = sub.add_parser("sweep", parents=[common], help="validation loss per sketch strategy and k")
    _add_data_flags(p, required=False)
    _add_boost_flags(p)
    p.add_argument("--rows", type=int, default=5000, help="synthetic rows when --data is absent")
    p.add_argument("--features", type=int, default=20)
    p.add_argument("--informative", type=int, default=10)
    p.add_argument("--classes", type=int, default=10)
    p.add_argument("--strategies", type=_strategy_list, default=None)
    p.add_argument("--ks", type=_int_list, default=[1, 2, 5, 10])
    p.add_argument("--valid-fraction", type=_fraction, default=0.2)
    p.add_argument("--out", type=Path, required=True, help="CSV strategy,k,valid_loss,best_iteration")
    p.set_defaults(handler=cmd_sweep)
    return parser


# -----------------------------------------------------------------------------
# Helpers
# -----------------------------------------------------------------------------


def _seed(args: argparse.Namespace, config: AppConfig) -> int:
    if args.seed is not None:
        return args.seed
    return int(config.boosting.get("seed", 0))


def _resolve_params(args: argparse.Namespace, config: AppConfig) -> BoostParams:
    return config.boost_params(
        {
            "n_trees": args.trees,
            "learning_rate": args.lr,
            "sketch_strategy": args.sketch,
            "k": args.k,
            "early_stopping_rounds": args.early_stopping,
            "seed": args.seed,
            "max_bins": args.max_bins,
        },
        {
            "max_depth": args.depth,
            "lambda_l2": args.lambda_l2,
            "min_samples_leaf": args.min_samples_leaf,
            "min_gain": args.min_gain,
            "use_hessian": True if args.use_hessian else None,
        },
    )


def _check_sketch_dim(params: BoostParams, d: int) -> None:
    if params.sketch_strategy != SketchStrategy.NONE and params.k > d:
        raise UsageError(f"--k {params.k} exceeds the number of outputs d={d}")


def _labels(args: argparse.Namespace) -> list[str]:
    if not args.label:
        raise UsageError("--label is required")
    return args.label


def _write_json(payload: Any, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def _echo_config(
    args: argparse.Namespace,
    out: Path,
    params: Optional[BoostParams] = None,
    paths: Optional[dict[str, Optional[Path]]] = None,
    options: Optional[dict[str, Any]] = None,
) -> None:
    run = RunConfig(
        subcommand=args.subcommand,
        params=params,
        paths={k: None if v is None else str(v) for k, v in (paths or {}).items()},
        options=options or {},
        threads=args.threads,
    )
    _write_json(run.model_dump(mode="json"), out.with_suffix(".config.json"))


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------


def cmd_train(args: argparse.Namespace, config: AppConfig) -> int:
    params = _resolve_params(args, config)
    labels = _labels(args)
    data = load_csv(args.data, labels, args.task, has_header=not args.no_header)
    _check_sketch_dim(params, data.n_outputs)
    valid: Optional[Dataset] = None
    if args.valid is not None:
        n_classes = data.n_outputs if args.task == TaskKind.MULTICLASS else None
        valid = load_csv(args.valid, labels, args.task, has_header=not args.no_header, n_classes=n_classes)
    elif args.valid_fraction > 0.0:
        data, valid = split_train_valid(data, args.valid_fraction, params.seed)

    timer = PhaseTimer()
    start = time.perf_counter()
    model = train(data, valid, params, n_threads=resolve_threads(args.threads), timer=timer)
    elapsed = time.perf_counter() - start

    save_model(model, args.out)
    history = model.history
    metrics = {
        "iterations": {
            "n_trained": len(history.train_loss),
            "n_kept": model.n_trees,
            "best_iteration": history.best_iteration,
            "train_loss": history.train_loss,
            "valid_loss": history.valid_loss,
        },
        "timing": {"total_seconds": elapsed, "phases": timer.as_dict()},
    }
    _write_json(metrics, args.metrics or args.out.with_suffix(".metrics.json"))
    _echo_config(
        args,
        args.out,
        params,
        {"data": args.data, "valid": args.valid, "out": args.out, "metrics": args.metrics},
        {"task": args.task.value, "label": labels, "valid_fraction": args.valid_fraction},
    )
    return EXIT_OK


def _load_model_features(model: Model, path: Path, drop: Optional[list[str]], has_header: bool):
    features = load_features_csv(path, drop, has_header=has_header)
    if features.shape[1] != model.n_features:
        raise UsageError(f"{path} has {features.shape[1]} feature columns, model expects {model.n_features}")
    return features


def cmd_predict(args: argparse.Namespace, config: AppConfig) -> int:
    model = load_model(args.model)
    features = _load_model_features(model, args.data, args.drop, not args.no_header)
    outputs = predict_raw(model, features) if args.raw else predict(model, features)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(outputs, args.out)
    logger.info("Wrote %d x %d predictions to %s", outputs.shape[0], outputs.shape[1], args.out)
    _echo_config(args, args.out, paths={"model": args.model, "data": args.data, "out": args.out},
                 options={"raw": args.raw, "drop": args.drop or []})
    return EXIT_OK


def cmd_eval(args: argparse.Namespace, config: AppConfig) -> int:
    model = load_model(args.model)
    n_classes = model.n_outputs if model.task == TaskKind.MULTICLASS else None
    data = load_csv(args.data, args.label, model.task, has_header=not args.no_header, n_classes=n_classes)
    if data.n_features != model.n_features or data.n_outputs != model.n_outputs:
        raise UsageError(
            f"data has m={data.n_features}, d={data.n_outputs}; model has m={model.n_features}, d={model.n_outputs}"
        )
    report = evaluate(data.targets, predict(model, data.features), model.task)
    payload = report.model_dump(mode="json")
    print(json.dumps(payload, indent=2))
    if args.out is not None:
        _write_json(payload, args.out)
        _echo_config(args, args.out, paths={"model": args.model, "data": args.data, "out": args.out},
                     options={"label": args.label})
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, config: AppConfig) -> int:
    seed = _seed(args, config)
    try:
        data = generate_synthetic(
            args.rows, args.features, args.informative, args.classes, seed,
            n_redundant=args.redundant, class_sep=args.class_sep,
        )
    except ValueError as e:
        raise UsageError(str(e)) from e
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_dataset_csv(data, args.out, label_column=args.label_column)
    logger.info("Wrote %d synthetic rows to %s", data.n_rows, args.out)
    _echo_config(args, args.out, paths={"out": args.out}, options={
        "rows": args.rows, "features": args.features, "informative": args.informative,
        "classes": args.classes, "redundant": args.redundant, "class_sep": args.class_sep, "seed": seed,
    })
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, config: AppConfig) -> int:
    overrides = {
        "classes": args.classes, "rows": args.rows, "features": args.features,
        "informative": args.informative, "depth": args.depth, "trees_low": args.trees_low,
        "trees_high": args.trees_high, "strategies": args.strategies, "k": args.k,
    }
    bench = BenchConfig(**{**config.bench.model_dump(), **{k: v for k, v in overrides.items() if v is not None}})
    if not bench.classes or not bench.strategies:
        raise UsageError("bench needs at least one class count and one strategy")
    if bench.trees_high <= bench.trees_low:
        raise UsageError("--trees-high must exceed --trees-low")
    seed = _seed(args, config)
    rows = run_benchmark(bench, seed=seed, n_threads=resolve_threads(args.threads))
    write_bench_csv(rows, args.out)
    if args.plot is not None:
        from src.ui.charts import bench_figure, write_static_figure

        written = write_static_figure(bench_figure(bench_frame(rows)), args.plot)
        logger.info("Wrote benchmark plot to %s", written)
    _echo_config(args, args.out, paths={"out": args.out, "plot": args.plot},
                 options={**bench.model_dump(mode="json"), "seed": seed})
    return EXIT_OK


def cmd_verify_bounds(args: argparse.Namespace, config: AppConfig) -> int:
    overrides = {
        "n": args.n, "d": args.d, "k": args.k, "trials": args.trials,
        "n_leaves": args.n_leaves, "delta": args.delta,
    }
    verify = VerifyConfig(**{**config.verify.model_dump(), **{k: v for k, v in overrides.items() if v is not None}})
    if verify.k > min(verify.n, verify.d):
        raise UsageError(f"--k {verify.k} must not exceed min(n, d) = {min(verify.n, verify.d)}")
    seed = _seed(args, config)
    result = run_bound_suite(
        verify.n, verify.d, verify.k, verify.trials, seed=seed, n_leaves=verify.n_leaves, delta=verify.delta
    )
    summary = {
        "passed": result.passed,
        "trials": verify.trials,
        "failures": result.failures,
        "probabilistic_misses": result.probabilistic_misses,
    }
    print(json.dumps(summary, indent=2))
    if args.out is not None:
        _write_json({**summary, "reports": [r.model_dump(mode="json") for r in result.reports]}, args.out)
        _echo_config(args, args.out, paths={"out": args.out}, options={**verify.model_dump(), "seed": seed})
    return EXIT_OK if result.passed else EXIT_FAILURE


def cmd_sweep(args: argparse.Namespace, config: AppConfig) -> int:
    params = _resolve_params(args, config)
    if args.data is not None:
        if args.task is None:
            raise UsageError("--task is required with --data")
        data = load_csv(args.data, _labels(args), args.task, has_header=not args.no_header)
    else:
        try:
            data = generate_synthetic(args.rows, args.features, args.informative, args.classes, params.seed)
        except ValueError as e:
            raise UsageError(str(e)) from e
    if not 0.0 < args.valid_fraction < 1.0:
        raise UsageError("sweep needs --valid-fraction in (0, 1)")
    train_set, valid_set = split_train_valid(data, args.valid_fraction, params.seed)
    strategies = args.strategies or [
        SketchStrategy.NONE,
        SketchStrategy.TOP_OUTPUTS,
        SketchStrategy.RANDOM_SAMPLING,
        SketchStrategy.RANDOM_PROJECTION,
    ]
    if params.tree.use_hessian and any(s != SketchStrategy.NONE for s in strategies):
        raise UsageError("--use-hessian only works with strategy none")
    rows = run_sweep(train_set, valid_set, params, strategies, args.ks, n_threads=resolve_threads(args.threads))
    write_sweep_csv(rows, args.out)
    _echo_config(args, args.out, params, {"data": args.data, "out": args.out},
                 {"strategies": [s.value for s in strategies], "ks": args.ks, "valid_fraction": args.valid_fraction})
    return EXIT_OK


# -----------------------------------------------------------------------------
# Entry point
# -----------------------------------------------------------------------------


def _load_app_config(path: Optional[Path]) -> AppConfig:
    if path is not None and not path.exists():
        raise UsageError(f"config file not found: {path}")
    try:
        return load_config(path)
    except yaml.YAMLError as e:
        raise UsageError(f"cannot parse config: {e}") from e


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    handler: Callable[[argparse.Namespace, AppConfig], int] = args.handler
    try:
        config = _load_app_config(args.config)
        configure_logging(args.log_level or config.logging.level, config.logging.format)
        if args.threads < 0:
            raise UsageError("--threads must be >= 0")
        return handler(args, config)
    except (UsageError, ValidationError) as e:
        print(f"sketchboost {args.subcommand}: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (SketchBoostError, OSError, ValueError) as e:
        logger.error("%s failed: %s", args.subcommand, e)
        print(f"sketchboost {args.subcommand}: error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
