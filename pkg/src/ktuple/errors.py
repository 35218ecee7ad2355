"""Exception hierarchy shared by every module."""


class KTupleError(Exception):
    """Base class for all errors raised by this package."""


class ContractError(KTupleError, ValueError):
    """An argument violates an operation's precondition."""


class OutOfRangeError(ContractError):
    """A query reaches beyond the range a table was built for."""


class ResourceError(KTupleError):
    """A computation would exceed a configured memory or work budget."""


class PartialResultError(KTupleError):
    """A capped search stopped early; ``best`` holds the best result found so far."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
