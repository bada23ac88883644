"""Exception hierarchy shared by all modules."""


class DelayPressError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(DelayPressError, ValueError):
    """A parameter violates its documented invariant."""


class DomainError(DelayPressError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class NumericError(DelayPressError, ArithmeticError):
    """A non-finite value appeared during integration."""


class BracketError(DelayPressError):
    """Both bisection endpoints fall in the same class."""

    def __init__(self, message, *, beta=None, lo=None, hi=None, lo_overshoots=None, hi_overshoots=None):
        super().__init__(message)
        self.beta = beta
        self.lo = lo
        self.hi = hi
        self.lo_overshoots = lo_overshoots
        self.hi_overshoots = hi_overshoots


class ResolutionError(DelayPressError):
    """Too few grid samples for the requested estimate."""


class InconsistencyError(DelayPressError):
    """Simulation disagrees with the threshold predicate."""


class DataError(DelayPressError):
    """Input data cannot support the requested estimate."""


class DegenerateInputError(DataError):
    """Input data carries no information (e.g. constant series)."""
