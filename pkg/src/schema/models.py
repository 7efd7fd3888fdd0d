"""Schemas for sketchboost: tasks, parameters, reports and the model file."""

from enum import Enum
from typing import Annotated, Any, Optional

from pydantic import BaseModel, ConfigDict, Field, StringConstraints, model_validator


class TaskKind(str, Enum):
    """Learning task; decides loss, prediction transform and metrics."""

    MULTICLASS = "multiclass"
    MULTILABEL = "multilabel"
    MULTITASK_REGRESSION = "multitask_regression"


class SketchStrategy(str, Enum):
    """How the gradient matrix is reduced before the structure search."""

    NONE = "none"
    TOP_OUTPUTS = "top_outputs"
    RANDOM_SAMPLING = "random_sampling"
    RANDOM_PROJECTION = "random_projection"
    TRUNCATED_SVD = "truncated_svd"

    @classmethod
    def parse(cls, name: str) -> "SketchStrategy":
        """Accept the enum value or a short CLI alias (top, sampling, projection, svd)."""
        key = name.strip().lower().replace("-", "_")
        key = _STRATEGY_ALIASES.get(key, key)
        return cls(key)


_STRATEGY_ALIASES = {
    "top": "top_outputs",
    "sampling": "random_sampling",
    "projection": "random_projection",
    "svd": "truncated_svd",
}


# -----------------------------------------------------------------------------
# Training parameters
# -----------------------------------------------------------------------------


class TreeParams(BaseModel):
    """Depth-wise tree growth parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    max_depth: int = Field(6, ge=1)
    lambda_l2: float = Field(1.0, gt=0)
    min_samples_leaf: int = Field(1, ge=1)
    min_gain: float = 0.0
    use_hessian: bool = False  # score splits with sum(h) + lambda instead of |R| + lambda


class BoostParams(BaseModel):
    """Outer boosting loop parameters."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n_trees: int = Field(1000, ge=1)
    learning_rate: float = Field(0.05, gt=0)
    tree: TreeParams = Field(default_factory=TreeParams)
    sketch_strategy: SketchStrategy = SketchStrategy.NONE
    k: int = Field(5, ge=1)
    early_stopping_rounds: int = Field(100, ge=0)  # 0 disables
    seed: int = 0
    max_bins: int = Field(255, ge=1, le=255)

    @model_validator(mode="after")
    def _hessian_needs_full_gradients(self) -> "BoostParams":
        if self.tree.use_hessian and self.sketch_strategy != SketchStrategy.NONE:
            raise ValueError("use_hessian requires sketch_strategy 'none'")
        return self


# -----------------------------------------------------------------------------
# Reports
# -----------------------------------------------------------------------------


class BoundReport(BaseModel):
    """Approximation error of one sketch against the error bounds."""

    strategy: SketchStrategy
    k: int
    trial: int = 0
    empirical_sup_error: float
    operator_bound: float  # ||G G^T - Gk Gk^T||_2
    strategy_bound: float
    stable_rank: float
    converged: bool = True
    score_bound_holds: bool
    strategy_bound_holds: Optional[bool] = None  # None for probabilistic bounds


class MetricReport(BaseModel):
    """Evaluation metrics for one prediction set."""

    primary_name: str
    primary_value: float
    auxiliary_name: Optional[str] = None
    auxiliary_value: Optional[float] = None
    n_evaluated: int


class RunConfig(BaseModel):
    """Fully resolved CLI invocation, echoed next to the outputs."""

    subcommand: str
    params: Optional[BoostParams] = None
    paths: dict[str, Optional[str]] = Field(default_factory=dict)
    options: dict[str, Any] = Field(default_factory=dict)
    threads: int = 0


# -----------------------------------------------------------------------------
# Model file (format_version 1)
# -----------------------------------------------------------------------------

HexFloat = Annotated[str, StringConstraints(pattern=r"^[0-9a-f]{16}$")]


class BinMapperRecord(BaseModel):
    """Per-feature bin thresholds as IEEE-754 bit patterns."""

    model_config = ConfigDict(extra="forbid")

    max_bins: int = Field(ge=1, le=255)
    thresholds: list[list[HexFloat]]


class TreeRecord(BaseModel):
    """One multivariate tree: parallel internal-node arrays plus leaf vectors."""

    model_config = ConfigDict(extra="forbid")

    feature: list[int]
    threshold: list[int]
    left: list[int]
    right: list[int]
    leaves: list[list[HexFloat]]


class HistoryRecord(BaseModel):
    """Per-iteration losses recorded while training."""

    model_config = ConfigDict(extra="forbid")

    train_loss: list[HexFloat]
    valid_loss: Optional[list[HexFloat]] = None
    best_iteration: int


class ModelFile(BaseModel):
    """On-disk model document."""

    model_config = ConfigDict(extra="forbid")

    format_version: int
    task: TaskKind
    n_outputs: int = Field(ge=1)
    n_features: int = Field(ge=1)
    learning_rate: HexFloat
    bin_mapper: BinMapperRecord
    trees: list[TreeRecord]
    history: HistoryRecord
