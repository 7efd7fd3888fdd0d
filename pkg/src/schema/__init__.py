# sketchboost schemas
from .models import (
    BinMapperRecord,
    BoostParams,
    BoundReport,
    HistoryRecord,
    MetricReport,
    ModelFile,
    RunConfig,
    SketchStrategy,
    TaskKind,
    TreeParams,
    TreeRecord,
)

__all__ = [
    "BinMapperRecord",
    "BoostParams",
    "BoundReport",
    "HistoryRecord",
    "MetricReport",
    "ModelFile",
    "RunConfig",
    "SketchStrategy",
    "TaskKind",
    "TreeParams",
    "TreeRecord",
]
