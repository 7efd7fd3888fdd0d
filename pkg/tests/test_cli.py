"""End-to-end runs of the sketchboost command line."""

import json

import numpy as np
import pandas as pd
import pytest

from src.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from src.compute.booster import predict
from src.compute.metrics import evaluate
from src.data.model_store import load_model
from src.experiments.benchmark import BENCH_COLUMNS, read_bench_csv
from src.ingest.csv_loader import load_csv
from src.schema.models import TaskKind

FAST = ["--trees", "8", "--lr", "0.3", "--depth", "3", "--early-stopping", "0"]


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def data_csv(workdir):
    path = workdir / "data.csv"
    assert main(["gen", "--rows", "120", "--features", "5", "--informative", "3",
                 "--classes", "4", "--seed", "2", "--out", str(path)]) == EXIT_OK
    return path


def _train(data_csv, out, *extra):
    argv = ["train", "--data", str(data_csv), "--task", "multiclass", "--label", "label",
            "--out", str(out), *FAST, *extra]
    return main(argv)


def test_gen_writes_labelled_csv(data_csv):
    frame = pd.read_csv(data_csv)
    assert list(frame.columns) == ["f0", "f1", "f2", "f3", "f4", "label"]
    assert len(frame) == 120
    assert sorted(frame["label"].unique()) == [0, 1, 2, 3]
    assert data_csv.with_suffix(".config.json").exists()


def test_gen_rejects_impossible_class_count(workdir):
    argv = ["gen", "--rows", "10", "--features", "2", "--informative", "1", "--classes", "5",
            "--out", str(workdir / "x.csv")]
    assert main(argv) == EXIT_USAGE


def test_train_writes_model_metrics_and_config(data_csv, workdir):
    out = workdir / "model.json"
    assert _train(data_csv, out, "--sketch", "projection", "--k", "2", "--valid-fraction", "0.25") == EXIT_OK
    model = load_model(out)
    assert model.n_trees == 8 and model.n_outputs == 4
    metrics = json.loads(out.with_suffix(".metrics.json").read_text())
    assert metrics["iterations"]["n_trained"] == 8
    assert len(metrics["iterations"]["valid_loss"]) == 8
    assert "histogram" in metrics["timing"]["phases"]
    echoed = json.loads(out.with_suffix(".config.json").read_text())
    assert echoed["subcommand"] == "train"
    assert echoed["params"]["sketch_strategy"] == "random_projection"
    assert echoed["params"]["k"] == 2


def test_train_is_deterministic(data_csv, workdir):
    a, b = workdir / "a.json", workdir / "b.json"
    assert _train(data_csv, a, "--sketch", "sampling", "--k", "2", "--seed", "9") == EXIT_OK
    assert _train(data_csv, b, "--sketch", "sampling", "--k", "2", "--seed", "9", "--threads", "3") == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("flags", [["--k", "0", "--sketch", "top"], ["--k", "9", "--sketch", "top"],
                                   ["--sketch", "bogus"], ["--lr", "-1"]])
def test_train_usage_errors(data_csv, workdir, flags):
    assert _train(data_csv, workdir / "m.json", *flags) == EXIT_USAGE
    assert not (workdir / "m.json").exists()


def test_train_missing_data_file(workdir):
    argv = ["train", "--data", str(workdir / "absent.csv"), "--task", "multiclass", "--label", "label",
            "--out", str(workdir / "m.json"), *FAST]
    assert main(argv) == EXIT_FAILURE


def test_config_file_supplies_defaults(data_csv, workdir):
    (workdir / "config.yaml").write_text("boosting:\n  n_trees: 3\n  early_stopping_rounds: 0\n")
    out = workdir / "m.json"
    argv = ["train", "--data", str(data_csv), "--task", "multiclass", "--label", "label", "--out", str(out)]
    assert main(argv) == EXIT_OK
    assert load_model(out).n_trees == 3


def test_predict_and_eval_agree_with_library(data_csv, workdir, capsys):
    model_path = workdir / "m.json"
    assert _train(data_csv, model_path) == EXIT_OK
    preds = workdir / "preds.csv"
    assert main(["predict", "--model", str(model_path), "--data", str(data_csv), "--drop", "label",
                 "--out", str(preds)]) == EXIT_OK
    written = pd.read_csv(preds)
    assert list(written.columns) == ["p0", "p1", "p2", "p3"]
    np.testing.assert_allclose(written.sum(axis=1), 1.0, atol=1e-9)

    capsys.readouterr()
    assert main(["eval", "--model", str(model_path), "--data", str(data_csv), "--label", "label"]) == EXIT_OK
    printed = json.loads(capsys.readouterr().out)
    model = load_model(model_path)
    data = load_csv(data_csv, ["label"], TaskKind.MULTICLASS)
    expected = evaluate(data.targets, predict(model, data.features), model.task)
    assert printed["primary_name"] == "cross_entropy"
    assert printed["primary_value"] == pytest.approx(expected.primary_value, rel=1e-12)
    assert printed["auxiliary_value"] == pytest.approx(expected.auxiliary_value)


def test_predict_column_mismatch(data_csv, workdir):
    model_path = workdir / "m.json"
    assert _train(data_csv, model_path) == EXIT_OK
    argv = ["predict", "--model", str(model_path), "--data", str(data_csv), "--out", str(workdir / "p.csv")]
    assert main(argv) == EXIT_USAGE


def test_predict_missing_model(data_csv, workdir):
    argv = ["predict", "--model", str(workdir / "absent.json"), "--data", str(data_csv),
            "--out", str(workdir / "p.csv")]
    assert main(argv) == EXIT_FAILURE


def test_verify_bounds(workdir, capsys):
    out = workdir / "bounds.json"
    assert main(["verify-bounds", "--n", "24", "--d", "8", "--k", "3", "--trials", "3",
                 "--n-leaves", "32", "--out", str(out)]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["passed"] is True
    assert len(json.loads(out.read_text())["reports"]) == 3 * 4


@pytest.mark.parametrize("flags", [["--trials", "0"], ["--n", "4", "--d", "4", "--k", "5"]])
def test_verify_bounds_usage_errors(flags):
    assert main(["verify-bounds", *flags]) == EXIT_USAGE


def test_bench_single_point(workdir):
    out = workdir / "bench.csv"
    argv = ["bench", "--classes", "3", "--rows", "200", "--features", "5", "--informative", "3",
            "--depth", "2", "--trees-low", "1", "--trees-high", "2", "--strategies", "none,projection",
            "--k", "2", "--out", str(out)]
    assert main(argv) == EXIT_OK
    frame = read_bench_csv(out)
    assert list(frame.columns) == BENCH_COLUMNS
    assert len(frame) == 2
    assert (frame["seconds"] >= 0).all()
    assert frame.set_index("strategy").loc["none", "k"] == 3


def test_bench_rejects_inverted_tree_counts(workdir):
    argv = ["bench", "--trees-low", "5", "--trees-high", "5", "--out", str(workdir / "b.csv")]
    assert main(argv) == EXIT_USAGE


def test_sweep_on_synthetic_data(workdir):
    out = workdir / "sweep.csv"
    argv = ["sweep", "--rows", "150", "--features", "4", "--informative", "2", "--classes", "3",
            "--strategies", "none,top", "--ks", "1,2", *FAST, "--out", str(out)]
    assert main(argv) == EXIT_OK
    frame = pd.read_csv(out)
    assert len(frame) == 3
    assert set(frame["strategy"]) == {"none", "top_outputs"}


def test_missing_subcommand():
    assert main([]) == EXIT_USAGE
