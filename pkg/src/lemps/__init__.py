"""Locality-specific elastic-net malaria prevalence prediction system.

Monthly-aggregate data model, lag-window task encoding, from-scratch
regression estimators, repeated-holdout model selection, and tolerance-band
validation of next-month prevalence forecasts.
"""

__version__ = "0.1.0"

from .dataset import (
    Dataset,
    EncodedTask,
    MonthKey,
    MonthlyRecord,
    encode_task,
    load_csv,
    parasite_density,
    prevalence,
    split_train_validation,
    write_csv,
)
from .errors import (
    AggregateError,
    ContinuityError,
    InsufficientDataError,
    LempsError,
    ParseError,
    SchemaError,
    SelectionError,
    UndefinedCorrelationError,
    ValidationError,
)
from .evaluation import (
    AggregateReport,
    EstimatorSpec,
    FitReport,
    SplitPlan,
    kfold_split,
    mae,
    mse,
    pcc,
    random_split,
    repeat_holdout,
)
from .pipeline import (
    LempsConfig,
    TaskParams,
    ValidationReport,
    run_validation,
    tolerance_band_eval,
)
from .predict import predict
from .synth import ShockSpec, SynthSpec, generate

__all__ = [
    "__version__",
    # data model
    "MonthKey", "MonthlyRecord", "Dataset", "EncodedTask",
    "parasite_density", "prevalence", "load_csv", "write_csv",
    "encode_task", "split_train_validation",
    # evaluation
    "SplitPlan", "FitReport", "AggregateReport", "EstimatorSpec",
    "mae", "mse", "pcc", "kfold_split", "random_split", "repeat_holdout",
    # pipeline
    "LempsConfig", "TaskParams", "ValidationReport",
    "run_validation", "tolerance_band_eval",
    # synthetic data
    "SynthSpec", "ShockSpec", "generate",
    # prediction
    "predict",
    # errors
    "LempsError", "SchemaError", "ParseError", "ValidationError",
    "ContinuityError", "InsufficientDataError", "UndefinedCorrelationError",
    "SelectionError", "AggregateError",
]
