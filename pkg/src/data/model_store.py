"""Model persistence. One JSON document per model; floats stored as exact bit patterns."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from pydantic import ValidationError

from src.compute.booster import Model, TrainingHistory
from src.compute.quantizer import BinMapper
from src.compute.tree import Tree, check_tree_structure
from src.errors import ModelFormatError, ModelIntegrityError, UnsupportedFormatVersionError
from src.schema.models import BinMapperRecord, HistoryRecord, ModelFile, TreeRecord

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
_HEX_DIGITS = 16


def encode_floats(values: Union[np.ndarray, Sequence[float]]) -> list[str]:
    """Big-endian IEEE-754 doubles, 16 lowercase hex digits each."""
    raw = np.asarray(values, dtype=">f8").ravel().tobytes().hex()
    return [raw[i : i + _HEX_DIGITS] for i in range(0, len(raw), _HEX_DIGITS)]


def decode_floats(digits: Sequence[str]) -> np.ndarray:
    return np.frombuffer(bytes.fromhex("".join(digits)), dtype=">f8").astype(np.float64)


def encode_float(value: float) -> str:
    return encode_floats([value])[0]


def decode_float(digits: str) -> float:
    return float(decode_floats([digits])[0])


# -----------------------------------------------------------------------------
# Model <-> ModelFile
# -----------------------------------------------------------------------------


def to_model_file(model: Model) -> ModelFile:
    history = model.history
    return ModelFile(
        format_version=FORMAT_VERSION,
        task=model.task,
        n_outputs=model.n_outputs,
        n_features=model.n_features,
        learning_rate=encode_float(model.learning_rate),
        bin_mapper=BinMapperRecord(
            max_bins=model.mapper.max_bins,
            thresholds=[encode_floats(t) for t in model.mapper.thresholds],
        ),
        trees=[
            TreeRecord(
                feature=tree.feature.tolist(),
                threshold=tree.threshold.tolist(),
                left=tree.left.tolist(),
                right=tree.right.tolist(),
                leaves=[encode_floats(v) for v in tree.values],
            )
            for tree in model.trees
        ],
        history=HistoryRecord(
            train_loss=encode_floats(history.train_loss),
            valid_loss=None if history.valid_loss is None else encode_floats(history.valid_loss),
            best_iteration=history.best_iteration,
        ),
    )


def _tree_from_record(record: TreeRecord, n_outputs: int, n_features: int, index: int) -> Tree:
    location = f"trees[{index}]"
    if not record.leaves or any(len(leaf) != n_outputs for leaf in record.leaves):
        raise ModelIntegrityError(f"a tree needs leaf vectors of {n_outputs} values", location)
    values = np.array([decode_floats(leaf) for leaf in record.leaves], dtype=np.float64)
    tree = Tree(
        feature=np.asarray(record.feature, dtype=np.int32),
        threshold=np.asarray(record.threshold, dtype=np.int32),
        left=np.asarray(record.left, dtype=np.int32),
        right=np.asarray(record.right, dtype=np.int32),
        values=values,
    )
    try:
        check_tree_structure(tree, n_features)
    except ValueError as e:
        raise ModelIntegrityError(str(e), location) from e
    return tree


def from_model_file(doc: ModelFile) -> Model:
    thresholds = [decode_floats(t) for t in doc.bin_mapper.thresholds]
    if len(thresholds) != doc.n_features:
        raise ModelIntegrityError(
            f"{len(thresholds)} threshold lists for {doc.n_features} features", "bin_mapper.thresholds"
        )
    for j, edges in enumerate(thresholds):
        if (
            edges.shape[0] >= doc.bin_mapper.max_bins
            or not np.isfinite(edges).all()
            or not (np.diff(edges) > 0).all()
        ):
            raise ModelIntegrityError(
                "thresholds must be strictly increasing and fit max_bins", f"bin_mapper.thresholds[{j}]"
            )
    trees = [_tree_from_record(r, doc.n_outputs, doc.n_features, i) for i, r in enumerate(doc.trees)]
    valid_loss = doc.history.valid_loss
    history = TrainingHistory(
        train_loss=decode_floats(doc.history.train_loss).tolist(),
        valid_loss=None if valid_loss is None else decode_floats(valid_loss).tolist(),
        best_iteration=doc.history.best_iteration,
    )
    return Model(
        trees=trees,
        learning_rate=decode_float(doc.learning_rate),
        mapper=BinMapper(thresholds=thresholds, max_bins=doc.bin_mapper.max_bins),
        task=doc.task,
        n_outputs=doc.n_outputs,
        n_features=doc.n_features,
        history=history,
    )


# -----------------------------------------------------------------------------
# Files
# -----------------------------------------------------------------------------


def dumps_model(model: Model) -> str:
    return json.dumps(to_model_file(model).model_dump(mode="json"), indent=2) + "\n"


def save_model(model: Model, path: Union[str, Path]) -> None:
    """Write the model as JSON (format_version 1)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps_model(model))
    logger.info("Saved model with %d trees to %s", model.n_trees, path)


def loads_model(text: str) -> Model:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"invalid JSON: {e.msg}", f"line {e.lineno} column {e.colno}") from e
    if not isinstance(raw, dict):
        raise ModelFormatError("model file must hold a JSON object", "$")
    version = raw.get("format_version")
    if version is None:
        raise ModelFormatError("missing format_version", "format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedFormatVersionError(
            f"format_version {version!r} is not supported (expected {FORMAT_VERSION})", "format_version"
        )
    try:
        doc = ModelFile.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "$"
        raise ModelFormatError(f"schema violation: {first['msg']}", location) from e
    return from_model_file(doc)


def load_model(path: Union[str, Path]) -> Model:
    """Read a model file written by save_model."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Model file not found: {path}")
    with open(path, encoding="utf-8") as f:
        model = loads_model(f.read())
    logger.info("Loaded model with %d trees from %s", model.n_trees, path)
    return model
