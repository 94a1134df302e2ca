"""Exception types shared across the package."""


class LcaCoverError(Exception):
    """Base class for all package errors."""


class DomainError(LcaCoverError, ValueError):
    """An argument is outside its documented domain (bad id, bad probability)."""


class ConstructionError(LcaCoverError, ValueError):
    """An instance cannot be generated from the requested parameters."""


class ParseError(LcaCoverError, ValueError):
    """An instance file is malformed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class BudgetExceededError(LcaCoverError, RuntimeError):
    """A query meter hit its cap; signals a violated locality budget."""


class InvariantError(LcaCoverError, AssertionError):
    """An internal algorithm invariant was violated; never silently ignored."""


class StateError(LcaCoverError, RuntimeError):
    """An operation was invoked on an object in the wrong state."""
