"""Exception hierarchy shared by all modules."""


class SteerCohError(ValueError):
    """Base class for every error raised by the package."""


class NonSquare(SteerCohError):
    pass


class NonFinite(SteerCohError):
    pass


class NotHermitian(SteerCohError):
    pass


class NotPSD(SteerCohError):
    pass


class NumericalBreakdown(SteerCohError, ArithmeticError):
    """A computation produced a value that valid inputs can never produce."""


class NoRealRoot(NumericalBreakdown):
    pass


class DegenerateLeadingCoefficient(SteerCohError):
    pass


class BadLength(SteerCohError):
    pass


class NotNormalizable(SteerCohError):
    pass


class BadSubsystemIndex(SteerCohError):
    pass


class BadShape(SteerCohError):
    pass


class ShapeMismatch(SteerCohError):
    pass


class NotReal(SteerCohError):
    pass


class OutOfRange(SteerCohError):
    pass


class WrongAliceDimension(SteerCohError):
    pass


class NotOrthonormal(SteerCohError):
    pass
