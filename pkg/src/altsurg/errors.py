"""Exception hierarchy shared by every module of the package."""


class AltSurgError(Exception):
    """Base class for all errors raised by altsurg."""


class EmptyInput(AltSurgError, ValueError):
    pass


class NormalizationError(AltSurgError, ValueError):
    pass


class AsymmetricPolynomial(AltSurgError, ValueError):
    pass


class CoefficientOverflow(AltSurgError, ValueError):
    pass


class NotLSpaceForm(AltSurgError, ValueError):
    pass


class EmptyStableCoefficients(AltSurgError, ValueError):
    pass


class OutOfRange(AltSurgError, ValueError):
    pass


class SlopeTooSmall(AltSurgError, ValueError):
    pass


class InvalidSlope(AltSurgError, ValueError):
    pass


class NotChangemaker(AltSurgError, ValueError):
    pass


class RankMismatch(AltSurgError, ValueError):
    pass


class VectorNotInLattice(AltSurgError, ValueError):
    pass


class NotSpanning(AltSurgError, ValueError):
    pass


class PositivePairing(AltSurgError, ValueError):
    pass


class NonzeroSum(AltSurgError, ValueError):
    pass


class CoordinateOutOfRange(AltSurgError, ValueError):
    pass


class IndexOutOfRange(AltSurgError, IndexError):
    pass


class NotPlanar(AltSurgError, ValueError):
    pass


class PrerequisiteMissing(AltSurgError, ValueError):
    pass


class PreconditionViolation(AltSurgError, ValueError):
    pass


class SearchSpaceOverflow(AltSurgError, RuntimeError):
    """A configured cap on the search was exceeded.

    ``partial`` carries whatever was computed before the cap tripped
    (counters, bounds table, or a partial classification).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
