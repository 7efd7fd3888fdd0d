"""Model persistence for sketchboost."""

from src.data.model_store import (
    FORMAT_VERSION,
    dumps_model,
    load_model,
    loads_model,
    save_model,
)

__all__ = [
    "FORMAT_VERSION",
    "dumps_model",
    "load_model",
    "loads_model",
    "save_model",
]
