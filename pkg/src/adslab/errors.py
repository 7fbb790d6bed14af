"""Exception hierarchy shared by every module of the lab."""


class LabError(Exception):
    """Base class for all errors raised by adslab."""


class NonTimelikeVector(LabError):
    pass


class ChartUndefined(LabError):
    pass


class ChartExit(LabError):
    """An orbit point left the affine chart used for hull computations."""


class CausallyRelated(LabError):
    pass


class OutsideCone(LabError):
    pass


class IllConditionedFit(LabError):
    pass


class NotFuchsian(LabError):
    pass


class NewtonDivergence(LabError):
    pass


class RankAmbiguous(LabError):
    """Singular values sit too close to the rank cutoff to decide a rank."""

    def __init__(self, message, singular_values=None, cutoff=None):
        super().__init__(message)
        self.singular_values = singular_values
        self.cutoff = cutoff


class DegenerateHull(LabError):
    pass


class NonVertexMarkedPoint(LabError):
    pass


class TruncationTooShort(LabError):
    """The star of a marked vertex is not closed inside the trusted orbit ball."""


class TriangleInequalityViolation(LabError):
    pass


class NonSpacelike(LabError):
    pass


class DegenerateOperator(LabError):
    pass


class ConfigError(LabError):
    pass


class InvariantViolation(LabError):
    """A structural identity that must hold on every run failed."""
