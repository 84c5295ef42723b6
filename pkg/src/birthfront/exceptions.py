"""
Exceptions raised by birthfront.

All errors derive from ``Error``, so callers can catch everything with a
single ``except`` statement. Condition violations found by
``birthfront.models.checks.check_conditions`` are report entries, not
exceptions.
"""

__all__ = [
    "Error",
    "InterfaceError",
    "ProgrammingError",
    "ConfigurationError",
    "EmptyConfigurationError",
    "DataError",
    "MissingObservableError",
    "OperationalError",
    "FrozenProcessError",
    "BudgetExceededError",
    "InternalError",
]


class Error(Exception):
    """
    Base class of all other error exceptions.
    """


class InterfaceError(Error):
    """
    Errors related to loading components, eg, a rate model by name.
    """


class ProgrammingError(Error):
    """
    Raised for programming errors.

    Exception raised when a function is called with invalid arguments, eg,
    a cap smaller than 1, a negative kernel weight, or checkpoint times that
    are not sorted.
    """


class ConfigurationError(ProgrammingError):
    """
    Raised when an experiment configuration is malformed.
    """


class EmptyConfigurationError(ProgrammingError):
    """
    Raised when an operation needs an occupied site and there is none.
    """


class DataError(Error):
    """
    Errors that are due to problems with the processed data.
    """


class MissingObservableError(DataError):
    """
    Raised when a trajectory lacks a checkpoint or running integral.
    """


class OperationalError(Error):
    """
    Errors related to running the process or the exact solvers.
    """


class FrozenProcessError(OperationalError):
    """
    Raised when the total birth rate is zero and no event can happen.
    """


class BudgetExceededError(OperationalError):
    """
    Raised when an enumeration or truncated state space is too large.
    """


class InternalError(Error):
    """
    Raised when an internal invariant is broken, eg, the rate cache diverged.
    """
