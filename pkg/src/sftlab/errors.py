"""Exception types shared across the package."""


class SftLabError(Exception):
    pass


class DimensionMismatch(SftLabError, ValueError):
    pass


class SupportNotContained(SftLabError, ValueError):
    pass


class AlphabetMismatch(SftLabError, ValueError):
    pass


class EmptyOutputSupport(SftLabError, ValueError):
    """The box is too small for the block code's window."""


class SupportCapExceeded(SftLabError):
    """A reduction would materialize more symbols or patterns than allowed."""


class DomainViolation(SftLabError):
    """An oracle was asked about a cell outside its declared domain."""


class InvalidPartition(SftLabError, ValueError):
    pass


class FormatError(SftLabError, ValueError):
    """Malformed input text. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExhausted(SftLabError):
    """A node, rule or subdivision budget ran out before the search finished.

    Anything yielded before the exception is a valid but possibly incomplete
    prefix of the full answer.
    """

    def __init__(self, message="budget exhausted", spent=None):
        self.spent = spent
        super().__init__(message)


class TrapRejected(SftLabError, ValueError):
    """An approximate image of the trap region was seen leaving its neighbourhood."""
