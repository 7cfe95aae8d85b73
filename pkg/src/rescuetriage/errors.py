"""Exception types shared across the package."""


class RescueTriageError(Exception):
    """Base class for all errors raised by this package."""


class VitalRangeError(RescueTriageError, ValueError):
    """A vital sign is outside its declared valid range."""

    def __init__(self, field, value, lo, hi):
        self.field = field
        self.value = value
        super().__init__(f"{field}={value!r} outside valid range [{lo}, {hi}]")


class RecordInvariantError(RescueTriageError, ValueError):
    """A patient record violates a cross-field invariant."""


class IntegrationError(RescueTriageError, ValueError):
    """Table merge failed (e.g. duplicate case id within one table)."""


class InsufficientDataError(RescueTriageError, ValueError):
    """Not enough values to compute the requested statistic."""


class RepairError(RescueTriageError, ValueError):
    """Outlier repair cannot proceed (every value out of bounds)."""


class ConfigError(RescueTriageError, ValueError):
    """Invalid generator or search configuration."""


class FitError(RescueTriageError, ValueError):
    """Training preconditions violated (e.g. single-class labels)."""


class DataError(RescueTriageError, ValueError):
    """Input matrix contains NaN or otherwise unusable values."""


class ShapeError(RescueTriageError, ValueError):
    """Input width does not match the fitted model."""


class NotFittedError(RescueTriageError, RuntimeError):
    """Predict called before fit."""


class SplitError(RescueTriageError, ValueError):
    """Cross-validation split preconditions violated."""


class EvaluationError(RescueTriageError, ValueError):
    """Metrics requested on empty or mismatched inputs."""


class SelectionError(RescueTriageError, ValueError):
    """Feature selection preconditions violated."""


class SearchError(RescueTriageError, ValueError):
    """Hyperparameter search space is empty or invalid."""


class BundleVersionError(RescueTriageError, ValueError):
    """Persisted bundle schema version does not match this build."""


class BundleParseError(RescueTriageError, ValueError):
    """Bundle file is truncated or corrupt."""

    def __init__(self, message, byte_offset=None):
        self.byte_offset = byte_offset
        if byte_offset is not None:
            message = f"{message} (byte offset {byte_offset})"
        super().__init__(message)


class EngineLoadError(RescueTriageError, RuntimeError):
    """Prediction engine could not assemble its six bundles."""
