"""Exception hierarchy for sketchboost."""

from typing import Optional


class SketchBoostError(Exception):
    """Base class for every error raised by the engine."""


# -----------------------------------------------------------------------------
# Data loading
# -----------------------------------------------------------------------------


class DataLoadError(SketchBoostError):
    """A dataset file could not be turned into a Dataset."""


class MissingColumnError(DataLoadError, KeyError):
    """A requested target column is not present in the file."""

    def __init__(self, column: str, available: list[str]):
        self.column = column
        self.available = available
        super().__init__(f"column {column!r} not found (available: {', '.join(available)})")

    def __str__(self) -> str:
        return self.args[0]


class CsvParseError(DataLoadError, ValueError):
    """A feature cell is neither a number nor a recognized NaN token."""

    def __init__(self, row: int, column: str, value: str):
        self.row = row
        self.column = column
        self.value = value
        super().__init__(f"row {row}, column {column!r}: cannot parse {value!r} as a number")


class TargetError(DataLoadError, ValueError):
    """Target values are missing or do not fit the task."""


# -----------------------------------------------------------------------------
# Engine
# -----------------------------------------------------------------------------


class DatasetError(SketchBoostError, ValueError):
    """Dataset invariants violated (shapes, one-hot rows, NaN targets)."""


class ShapeMismatchError(SketchBoostError, ValueError):
    """Two arrays that must agree in shape do not."""


class InvalidTargetError(SketchBoostError, ValueError):
    """Targets are not valid for the requested loss."""


class SketchError(SketchBoostError, ValueError):
    """Invalid sketch request (k out of range, zero matrix...)."""


class SvdConvergenceError(SketchError):
    """The singular value decomposition did not converge."""


class HistogramConsistencyError(SketchBoostError):
    """Histogram subtraction produced negative counts."""


# -----------------------------------------------------------------------------
# Model files
# -----------------------------------------------------------------------------


class ModelFormatError(SketchBoostError):
    """A model file cannot be parsed or violates the schema."""

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        super().__init__(f"{message} (at {location})" if location else message)


class UnsupportedFormatVersionError(ModelFormatError):
    """The model file declares a format_version this build cannot read."""


class ModelIntegrityError(ModelFormatError):
    """The model file parses but describes an inconsistent model."""


# -----------------------------------------------------------------------------
# Command line
# -----------------------------------------------------------------------------


class UsageError(SketchBoostError, ValueError):
    """Invalid command-line arguments (exit code 2)."""
