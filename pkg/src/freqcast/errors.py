"""Exception types shared across the package."""


class FreqcastError(Exception):
    """Base class for all package errors."""


class ConfigError(FreqcastError):
    """A run configuration or plan is invalid (user-fixable)."""


class ContractError(FreqcastError):
    """An internal call violated a documented precondition."""


class DataError(FreqcastError):
    """A dataset file could not be ingested."""


class TrainingError(FreqcastError):
    """Training aborted (non-finite loss or gradient, empty batch)."""
