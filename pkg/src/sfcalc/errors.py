"""Exception types raised across the package."""


class SFCalcError(Exception):
    """Base class for all errors raised by sfcalc."""


class SingularityError(SFCalcError, ArithmeticError):
    """A resolvent or kernel was requested on (or numerically at) the spectrum.

    The offending sphere is attached as ``sphere`` when it is known.
    """

    def __init__(self, message, sphere=None):
        super().__init__(message)
        self.sphere = sphere


class DomainError(SFCalcError, ValueError):
    """A point lies outside the domain of a slice function or region set."""


class PreconditionError(SFCalcError, ValueError):
    """An operation was called with inputs violating its contract."""


class ConstructionError(SFCalcError, ValueError):
    """A slice Cauchy domain could not be built from the given data."""


class NotSplittableError(SFCalcError, ValueError):
    """A function is not both left and right slice hyperholomorphic."""


class ConfigError(SFCalcError, ValueError):
    """A job description could not be parsed; ``field`` names the culprit."""

    def __init__(self, message, field=None, line=None):
        loc = []
        if field is not None:
            loc.append(f"field '{field}'")
        if line is not None:
            loc.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.field = field
        self.line = line
