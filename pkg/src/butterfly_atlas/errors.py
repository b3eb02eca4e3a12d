"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class ButterflyError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(ButterflyError, ValueError):
    """Bad user-supplied value: malformed fraction, non-member matrix, r too large."""


class NotInSemigroup(InvalidInput):
    """The matrix does not map the interval [0, 1] into itself."""


class NumericalFailure(ButterflyError, ArithmeticError):
    """A numerical routine could not reach its accuracy contract."""
