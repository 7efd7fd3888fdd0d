"""CSV ingestion: features + targets into a Dataset, and CSV writers."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd

from src.errors import CsvParseError, MissingColumnError, TargetError
from src.ingest.dataset import Dataset
from src.schema.models import TaskKind

logger = logging.getLogger(__name__)

# Tokens read as a missing feature value. Anything else non-numeric is an error.
NAN_TOKENS = ("", "NA", "NaN", "nan")

# Written floats round-trip exactly through float().
FLOAT_FORMAT = "%.17g"


def _parse_numeric(raw: pd.Series, column: str, line_offset: int) -> tuple[np.ndarray, np.ndarray]:
    """Parse a string column. Returns (values, is_nan_token).

    Cells go through float() so 17-digit decimals come back as the exact
    double that was written.
    """
    stripped = raw.str.strip()
    is_nan = stripped.isin(NAN_TOKENS).to_numpy()
    values = np.full(len(stripped), np.nan, dtype=np.float64)
    for i, cell in enumerate(stripped):
        if is_nan[i]:
            continue
        try:
            values[i] = float(cell)
        except ValueError:
            raise CsvParseError(row=i + line_offset, column=column, value=str(raw.iloc[i])) from None
        if np.isnan(values[i]):
            raise CsvParseError(row=i + line_offset, column=column, value=str(raw.iloc[i]))
    return values, is_nan


def _encode_labels(
    labels: np.ndarray, column: str, line_offset: int, n_classes: Optional[int] = None
) -> np.ndarray:
    """Dense integer labels 0..d-1 -> one-hot rows (d = n_classes, or max label + 1)."""
    non_integer = (labels < 0) | (labels != np.floor(labels))
    if non_integer.any():
        i = int(np.flatnonzero(non_integer)[0])
        raise TargetError(
            f"row {i + line_offset}, column {column!r}: multiclass label {labels[i]!r} "
            "is not a non-negative integer"
        )
    codes = labels.astype(np.int64)
    width = int(codes.max(initial=-1)) + 1 if n_classes is None else n_classes
    if codes.size and codes.max() >= width:
        i = int(np.argmax(codes))
        raise TargetError(f"row {i + line_offset}, column {column!r}: label {codes[i]} >= {width} classes")
    onehot = np.zeros((codes.shape[0], width), dtype=np.float64)
    onehot[np.arange(codes.shape[0]), codes] = 1.0
    return onehot


def load_csv(
    path: Union[str, Path],
    target_columns: Union[str, Sequence[str]],
    task: TaskKind,
    has_header: bool = True,
    n_classes: Optional[int] = None,
) -> Dataset:
    """Load a CSV into a Dataset.

    A single multiclass target column holds integer labels and is one-hot
    expanded; otherwise the target columns are taken as the n x d target
    matrix. All remaining columns become features, in file order. Without a
    header, columns are named by their 0-based position ("0", "1", ...).
    Reported row numbers are 1-based file line numbers. `n_classes` fixes
    the one-hot width (e.g. to match a trained model).
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Data CSV not found: {path}")
    df = pd.read_csv(
        path,
        header=0 if has_header else None,
        dtype=str,
        keep_default_na=False,
        na_filter=False,
        encoding="utf-8",
    )
    df.columns = [str(c) for c in df.columns]
    line_offset = 2 if has_header else 1

    targets_wanted = [target_columns] if isinstance(target_columns, str) else list(target_columns)
    for col in targets_wanted:
        if col not in df.columns:
            raise MissingColumnError(col, list(df.columns))
    feature_cols = [c for c in df.columns if c not in targets_wanted]

    target_blocks = []
    for col in targets_wanted:
        values, is_nan = _parse_numeric(df[col], col, line_offset)
        missing = is_nan | ~np.isfinite(values)
        if missing.any():
            i = int(np.flatnonzero(missing)[0])
            raise TargetError(f"row {i + line_offset}, column {col!r}: missing or non-finite target value")
        target_blocks.append(values)

    if task == TaskKind.MULTICLASS and len(target_blocks) == 1:
        targets = _encode_labels(target_blocks[0], targets_wanted[0], line_offset, n_classes)
    else:
        targets = np.column_stack(target_blocks) if target_blocks else np.empty((len(df), 0))

    features = np.empty((len(df), len(feature_cols)), dtype=np.float64)
    for j, col in enumerate(feature_cols):
        features[:, j], _ = _parse_numeric(df[col], col, line_offset)

    ds = Dataset(features=features, targets=targets, task=task, feature_names=feature_cols)
    logger.info(
        "Loaded %s: n=%d m=%d d=%d task=%s", path.name, ds.n_rows, ds.n_features, ds.n_outputs, task.value
    )
    return ds


def load_features_csv(
    path: Union[str, Path],
    drop_columns: Optional[Sequence[str]] = None,
    has_header: bool = True,
) -> np.ndarray:
    """Feature matrix only (for prediction); listed columns are ignored."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Data CSV not found: {path}")
    df = pd.read_csv(
        path,
        header=0 if has_header else None,
        dtype=str,
        keep_default_na=False,
        na_filter=False,
        encoding="utf-8",
    )
    df.columns = [str(c) for c in df.columns]
    drop = list(drop_columns or [])
    for col in drop:
        if col not in df.columns:
            raise MissingColumnError(col, list(df.columns))
    cols = [c for c in df.columns if c not in drop]
    line_offset = 2 if has_header else 1
    features = np.empty((len(df), len(cols)), dtype=np.float64)
    for j, col in enumerate(cols):
        features[:, j], _ = _parse_numeric(df[col], col, line_offset)
    return features


def write_dataset_csv(ds: Dataset, path: Union[str, Path], label_column: str = "label") -> None:
    """Write features plus targets. Multiclass targets collapse to one integer label column."""
    frame = pd.DataFrame(ds.features, columns=ds.feature_names)
    if ds.task == TaskKind.MULTICLASS:
        frame[label_column] = ds.targets.argmax(axis=1)
    else:
        for j in range(ds.n_outputs):
            frame[f"{label_column}{j}"] = ds.targets[:, j]
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="NaN", lineterminator="\n")


def write_matrix_csv(matrix: np.ndarray, path: Union[str, Path], prefix: str = "p") -> None:
    """Write an n x d float matrix with header p0..p{d-1}."""
    frame = pd.DataFrame(matrix, columns=[f"{prefix}{j}" for j in range(matrix.shape[1])])
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
