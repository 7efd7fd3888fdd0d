"""Configuration loading (config.yaml) and logging setup."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field

from src.schema.models import BoostParams, SketchStrategy, TreeParams

DEFAULT_CONFIG_NAME = "config.yaml"
DEFAULT_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class BenchConfig(BaseModel):
    """Grid for the scaling benchmark."""

    model_config = ConfigDict(extra="forbid")

    classes: list[int] = Field(default_factory=lambda: [5, 10, 25, 50, 100])
    rows: int = Field(50_000, ge=1)
    features: int = Field(20, ge=1)
    informative: int = Field(10, ge=1)
    depth: int = Field(6, ge=1)
    trees_low: int = Field(100, ge=1)
    trees_high: int = Field(200, ge=2)
    strategies: list[SketchStrategy] = Field(
        default_factory=lambda: [SketchStrategy.NONE, SketchStrategy.RANDOM_PROJECTION]
    )
    k: int = Field(5, ge=1)


class VerifyConfig(BaseModel):
    """Defaults for the sketch error bound suite."""

    model_config = ConfigDict(extra="forbid")

    n: int = Field(64, ge=1)
    d: int = Field(32, ge=1)
    k: int = Field(4, ge=1)
    trials: int = Field(50, ge=1)
    n_leaves: int = Field(256, ge=1)
    delta: float = Field(0.1, gt=0, lt=1)


class LoggingConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    level: str = "INFO"
    format: str = DEFAULT_LOG_FORMAT


class AppConfig(BaseModel):
    """Contents of config.yaml. Boosting/tree sections are partial overrides."""

    model_config = ConfigDict(extra="forbid")

    boosting: dict[str, Any] = Field(default_factory=dict)
    tree: dict[str, Any] = Field(default_factory=dict)
    bench: BenchConfig = Field(default_factory=BenchConfig)
    verify: VerifyConfig = Field(default_factory=VerifyConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    def boost_params(
        self,
        overrides: Optional[dict[str, Any]] = None,
        tree_overrides: Optional[dict[str, Any]] = None,
    ) -> BoostParams:
        """Merge defaults < config file < explicit overrides (None values are ignored)."""
        tree_values = {**self.tree, **_drop_none(tree_overrides)}
        values = {**self.boosting, **_drop_none(overrides)}
        values["tree"] = TreeParams(**tree_values)
        return BoostParams(**values)


def _drop_none(values: Optional[dict[str, Any]]) -> dict[str, Any]:
    return {k: v for k, v in (values or {}).items() if v is not None}


def load_config(path: Optional[Path] = None) -> AppConfig:
    """Load config.yaml. A missing file yields the built-in defaults."""
    if path is None:
        path = Path.cwd() / DEFAULT_CONFIG_NAME
    if not path.exists():
        return AppConfig()
    with open(path, encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    return AppConfig(**raw)


def configure_logging(level: str = "INFO", fmt: str = DEFAULT_LOG_FORMAT) -> None:
    """Configure the root logger once; called from entry points only."""
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=fmt)
