"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class QuatformError(Exception):
    """Base class for every error raised by quatform."""


class ArgumentError(QuatformError, ValueError):
    """An argument violates an operation's precondition."""


class UnsupportedFormError(ArgumentError):
    """The quadratic form is outside the class an operation supports."""


class HypothesisError(QuatformError):
    """A hypothesis of a bound (for example p >= 101) does not hold."""


class ResourceError(QuatformError, MemoryError):
    """A computation would exceed its enumeration or memory budget."""


class VerificationError(QuatformError):
    """A stated inequality or identity failed numerically."""
