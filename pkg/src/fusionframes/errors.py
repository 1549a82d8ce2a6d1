"""Exception types shared by every module."""


class FusionFrameError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(FusionFrameError, ValueError):
    """Malformed input: wrong shapes, non-finite entries, bad weights, bad files."""


class PreconditionError(InvalidInputError):
    """Well-formed input that violates an operation's stated precondition."""


class SingularOperatorError(FusionFrameError, ArithmeticError):
    """An operator that had to be inverted is singular to working precision."""
