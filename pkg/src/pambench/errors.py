"""Exception types shared across the package."""


class PambenchError(Exception):
    """Base class for all package errors."""


class InvalidInputError(PambenchError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateSignalError(InvalidInputError):
    """Signal has zero variance and cannot be standardized."""


class GridError(InvalidInputError):
    """A scan grid is structurally inconsistent (shape or metadata mismatch)."""


class TrainingError(PambenchError):
    """Classifier training cannot proceed (e.g. single-class data)."""


class UndefinedMetricError(PambenchError):
    """A metric is undefined for the given labels (e.g. single-class AUROC)."""


class ConfigError(PambenchError):
    """An experiment or population configuration is invalid."""


class StageError(PambenchError):
    """A pipeline stage failed; carries the stage name for exit-code mapping."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
