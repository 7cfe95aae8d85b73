"""Decision support for rescue events: six complication probabilities per patient."""

from .engine import Deviation, PredictionEngine, apply_deviation, load_engine
from .records import (
    COMPLICATIONS,
    FEATURE_NAMES,
    SCHEMA_VERSION,
    Complication,
    LabeledDataset,
    ObservationFlags,
    PatientRecord,
    ProbabilityReport,
    VitalSigns,
)
from .synthgen import GeneratorConfig, default_config, generate

__version__ = "0.1.0"

__all__ = [
    "COMPLICATIONS",
    "Complication",
    "Deviation",
    "FEATURE_NAMES",
    "GeneratorConfig",
    "LabeledDataset",
    "ObservationFlags",
    "PatientRecord",
    "PredictionEngine",
    "ProbabilityReport",
    "SCHEMA_VERSION",
    "VitalSigns",
    "__version__",
    "apply_deviation",
    "default_config",
    "generate",
    "load_engine",
]
