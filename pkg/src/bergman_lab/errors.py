"""Exception hierarchy."""


class BergmanLabError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(BergmanLabError):
    pass


class MapInversionError(BergmanLabError):
    """Newton inversion of a forward conformal map failed to converge."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class QuadratureError(BergmanLabError):
    """Non-finite value or failed self-validation in a quadrature."""


class PrecisionExhaustedError(BergmanLabError):
    """The computation needs more significand bits (or a lower degree)."""


class FaberInconsistencyError(BergmanLabError):
    """The two Faber construction routes disagree beyond tolerance."""

    def __init__(self, message, max_gap=None):
        super().__init__(message)
        self.max_gap = max_gap


class NearBoundaryError(BergmanLabError):
    """Evaluation point too close to the boundary curve."""

    def __init__(self, message, distance=None):
        super().__init__(message)
        self.distance = distance


class ContourDegenerateError(BergmanLabError):
    """A zero of the target function sits on the integration contour."""


class ClassificationError(BergmanLabError):
    """Point classification failed after the configured number of jitters."""


class NearBoundaryInconclusiveError(BergmanLabError):
    """A root's modulus falls inside the tie window around 1 - delta_edge."""


class AnnulusDomainError(BergmanLabError):
    """Requested point lies outside the working annulus."""


class ScalingError(BergmanLabError):
    """|Phi(z)|^n left the exponent range of the direct evaluation path."""


class NotInOmegaStarError(BergmanLabError):
    """The glued map is not defined at the requested point."""


class RootFindingError(BergmanLabError):
    """Simultaneous iteration failed to reach the residual target."""

    def __init__(self, message, worst_residual=None):
        super().__init__(message)
        self.worst_residual = worst_residual
