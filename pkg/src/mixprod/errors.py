"""Exception hierarchy shared by all modules."""


class MixprodError(Exception):
    """Base class for every error raised by mixprod."""


class DimensionMismatch(MixprodError, ValueError):
    pass


class InvalidModel(MixprodError, ValueError):
    pass


class InfeasibleParameters(MixprodError, ValueError):
    pass


class EnumerationLimit(MixprodError, ValueError):
    pass


class NonFiniteInput(MixprodError, ValueError):
    pass


class ComplexSpectrum(MixprodError, ArithmeticError):
    """Eigenvalues with non-negligible imaginary parts: noise too large to diagonalize."""


class NearSingular(MixprodError, ArithmeticError):
    def __init__(self, message, ratio=None):
        super().__init__(message)
        self.ratio = ratio


class RankDeficient(MixprodError, ArithmeticError):
    pass


class EigenvalueCollision(MixprodError, ArithmeticError):
    pass


class NormalizationUnstable(MixprodError, ArithmeticError):
    pass


class DegeneratePi(MixprodError, ArithmeticError):
    pass


class NoViableCandidate(MixprodError, RuntimeError):
    pass


class PreconditionFailed(MixprodError, ValueError):
    pass
