"""Exception types shared across the package."""


class WarnsiftError(Exception):
    """Base class for all package errors."""


class SchemaError(WarnsiftError):
    """Raised when a CSV or record set does not match the expected layout."""


class EmptyDatasetError(WarnsiftError):
    """Raised when an operation needs records and none remain."""


class DegenerateTrainingError(WarnsiftError):
    """Raised when a training set contains a single class."""


class UndefinedAUCError(WarnsiftError):
    """Raised when AUC is requested for a label vector with one class."""


class UnknownIdError(WarnsiftError):
    """Raised when a warning id is not part of the session pool."""


class AlreadyLabeledError(WarnsiftError):
    """Raised when a label is submitted twice for the same warning."""


class PoolExhaustedError(WarnsiftError):
    """Raised when a query is requested but no unlabeled warnings remain."""
