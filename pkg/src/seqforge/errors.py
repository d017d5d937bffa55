"""Exception hierarchy shared by every seqforge module."""


class SeqforgeError(Exception):
    """Base class for all errors raised by seqforge."""


class ValidationError(SeqforgeError, ValueError):
    """An input violates a documented invariant."""


class DimensionError(ValidationError):
    """Array shapes do not agree."""


class DomainError(ValidationError):
    """An argument lies outside the domain where an operation is defined."""


class FormatError(SeqforgeError, ValueError):
    """A sequence-set file could not be parsed.

    Parameters
    ----------
    message : str
        What went wrong.
    line : int, optional
        1-based line number of the offending line.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoFeasibleSolution(SeqforgeError):
    """The solver never recorded a set satisfying the PAPR constraint."""
