"""Exception types shared across the package."""


class CircGofError(Exception):
    """Base class for package errors."""


class DataError(CircGofError):
    """Problems with input data; the CLI maps these to exit code 2."""


class InvalidShape(DataError, ValueError):
    """A distribution parameter lies outside its admissible range."""


class DegenerateSample(DataError):
    """A statistic is undefined for the given (e.g. constant) sample."""


class DegenerateData(DataError):
    """Too few observations to fit the model."""


class SingularMap(CircGofError, ArithmeticError):
    """The Mobius map is undefined at a covariate (``r = 1`` antipode)."""


class ParseError(DataError):
    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column!r}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.row = row
        self.column = column


class UnitError(DataError):
    pass


class FormatError(DataError):
    pass


class EmptySelection(DataError):
    pass


class FitFailure(CircGofError):
    """A fit did not converge from any start."""
