"""Exception types shared across the package.

The CLI maps these to exit code 1 and prints the message verbatim on
stderr, so messages are written to stand alone.
"""


class SurvmrlError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(SurvmrlError):
    """The input file's structure (header, encoding) is wrong."""


class ParseError(SurvmrlError):
    """A data row failed validation; carries the 1-based row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class EstimationError(SurvmrlError):
    """An estimator's preconditions are not met by the data."""
