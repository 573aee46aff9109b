"""warnsift: active-learning triage for static-analysis warnings."""

from .dataset import (
    EncodedDataset,
    FeatureSchema,
    Label,
    VersionPair,
    WarningRecord,
    encode,
    fit_schema,
    load_csv,
    load_dataset,
    load_version_pair,
)
from .engine import (
    EngineConfig,
    Phase,
    SessionState,
    SimulationResult,
    init_session,
    run_simulation,
)
from .learners import TrainConfig, default_config, model_from_json, model_to_json, train
from .metrics import (
    RecallCostCurve,
    cost,
    cost_at_recall,
    curve_from_ranking,
    roc_auc,
    session_auc,
    summarize,
    total_recall,
)

__version__ = "0.1.0"

__all__ = [
    "EncodedDataset",
    "EngineConfig",
    "FeatureSchema",
    "Label",
    "Phase",
    "RecallCostCurve",
    "SessionState",
    "SimulationResult",
    "TrainConfig",
    "VersionPair",
    "WarningRecord",
    "cost",
    "cost_at_recall",
    "curve_from_ranking",
    "default_config",
    "encode",
    "fit_schema",
    "init_session",
    "load_csv",
    "load_dataset",
    "load_version_pair",
    "model_from_json",
    "model_to_json",
    "roc_auc",
    "run_simulation",
    "session_auc",
    "summarize",
    "total_recall",
    "train",
]
