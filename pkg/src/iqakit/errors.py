"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: usage problems are handled by argparse (2),
I/O failures exit 3, precondition violations exit 4 and numeric failures exit 5.
"""


class IqaError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(IqaError, ValueError):
    """An input image, map or sequence violates an operation precondition."""


class InvalidParameterError(IqaError, ValueError):
    """A configuration value is out of its allowed range."""


class DegeneratePairError(InvalidInputError):
    """An image pair is too close for a ratio with the pair distance in the denominator."""

    def __init__(self, index: int, distance: float):
        super().__init__(f"sample {index}: pair distance {distance:.3e} is degenerate")
        self.index = index
        self.distance = distance


class NumericError(IqaError, ArithmeticError):
    """A computation produced a non-finite or undefined result."""


class EstimationError(NumericError):
    """A statistical estimator could not be fitted to the given samples."""


class DomainError(NumericError):
    """A function argument fell outside its mathematical domain."""


class UndefinedCorrelationError(NumericError):
    """A correlation coefficient is undefined (constant input)."""


class ImageIOError(IqaError, OSError):
    """An image or model file could not be read or written."""
