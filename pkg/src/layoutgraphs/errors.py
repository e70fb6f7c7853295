"""Exception types shared across the package.

The CLI maps these onto exit codes: InputError -> 1, NumericError -> 2.
"""


class LayoutGraphsError(Exception):
    """Base class for all errors raised by this package."""


class InputError(LayoutGraphsError):
    """Malformed or inconsistent user input (files, flags, arguments)."""


class FormatError(InputError):
    """A serialized artifact (corpus, checkpoint, annotation) is malformed.

    Carries an optional line number for text formats.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericError(LayoutGraphsError):
    """Non-finite values encountered where finite numbers are required."""
