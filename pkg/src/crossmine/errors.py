"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class CrossmineError(Exception):
    exit_code = 4


class UsageError(CrossmineError):
    exit_code = 1


class DataError(CrossmineError):
    """Input data violates a contract (bad annotation row, unknown term...)."""

    exit_code = 3


class OntologyError(DataError):
    """Malformed OBO input or an invalid term graph."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
