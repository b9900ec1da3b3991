"""Exception types shared across the package."""


class TubalError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(TubalError, ValueError):
    """Operand dimensions do not conform."""


class DomainError(TubalError, ValueError):
    """A parameter or value is outside its permitted domain."""


class SingularTransformError(TubalError, ValueError):
    """A transform matrix is rank deficient (not injective)."""


class NumericError(TubalError, RuntimeError):
    """A numerical routine failed to converge or produce a result."""


class FormatError(TubalError, ValueError):
    """A binary artifact failed to parse; messages carry byte offsets."""


class GeneratorError(TubalError, RuntimeError):
    """Alternating-projection generation did not reach the target rank.

    Carries the last achieved tube-norm ratio(s) in ``ratios``.
    """

    def __init__(self, message, ratios=()):
        super().__init__(message)
        self.ratios = tuple(ratios)


class FormatError(TubalError, ValueError):
    """A serialized file is malformed; messages carry byte offsets."""
