"""Exception types raised by the library."""


class SpecPredictError(Exception):
    """Base class for every error this package raises on purpose."""


class DimensionMismatch(SpecPredictError):
    pass


class NotPositive(SpecPredictError):
    pass


class GridTooCoarse(SpecPredictError):
    pass


class SingularSample(SpecPredictError):
    """A grid sample of the weight is numerically singular."""

    def __init__(self, index, point, message=None):
        self.index = index
        self.point = point
        if message is None:
            message = f"singular weight sample at grid point {index} (t = {point:.6f})"
        super().__init__(message)


class LagOutOfRange(SpecPredictError):
    pass


class NotLogIntegrable(SpecPredictError):
    pass


class NoConvergence(SpecPredictError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"factorization did not reach tolerance after {iterations} iterations "
            f"(residual {residual:.3e})"
        )


class SingularLeadCoefficient(SpecPredictError):
    pass


class NotInverseIntegrable(SpecPredictError):
    pass


class SingularToeplitz(SpecPredictError):
    pass


class TruncationTooShort(SpecPredictError):
    pass


class SingularInnerMatrix(SpecPredictError):
    pass


class IllConditionedGram(SpecPredictError):
    def __init__(self, condition):
        self.condition = condition
        super().__init__(f"gram system too ill-conditioned to solve (cond ~ {condition:.3e})")


class ParseError(SpecPredictError):
    pass
