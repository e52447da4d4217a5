"""Exception types raised by the library."""


class DofwaveError(Exception):
    """Base class for library errors."""


class MeasureError(DofwaveError, ValueError):
    """Malformed measure input (negative weights, bad parameters, zero measure)."""


class DivisionByZero(DofwaveError, ZeroDivisionError):
    pass


class IndeterminateRatio(DofwaveError, ArithmeticError):
    """Both tail masses vanish, so the ratio 0/0 is undefined."""


class ConvergenceFailure(DofwaveError, ArithmeticError):
    def __init__(self, message: str, bracket: tuple[float, float] | None = None):
        super().__init__(message)
        self.bracket = bracket


class NotAdmissible(DofwaveError):
    """The pair violates the thermodynamic restriction and no override was given."""


class OutsideCone(DofwaveError, ValueError):
    pass


class ClassicalModelBranch(DofwaveError):
    """A classical model with displaced branch points was passed to the fractional Hankel routine."""


class ExceptionalModel(DofwaveError):
    """Kernel evaluation is refused for exceptional pairs without a closed form."""


class TruncationFailure(DofwaveError, ArithmeticError):
    pass
