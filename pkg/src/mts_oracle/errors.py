"""Exception types raised across the package."""


class MtsError(ValueError):
    """Base class for all domain errors."""


class InvalidTrajectory(MtsError):
    pass


class LengthMismatch(MtsError):
    pass


class ZeroReference(MtsError):
    pass


class Unserviceable(MtsError):
    """A task assigns infinite cost to every state."""


class NotADistribution(MtsError):
    pass


class SizeMismatch(MtsError):
    pass


class TooLarge(MtsError):
    """Input exceeds the guard of an exhaustive solver."""


class InvariantViolation(AssertionError):
    """An internal algorithm invariant failed (checked in debug mode)."""


class InfeasiblePrediction(MtsError):
    pass


class MalformedFile(MtsError):
    pass


class InsufficientData(MtsError):
    pass


class DegenerateGeo(MtsError):
    pass


class SpecError(MtsError):
    """Invalid experiment specification."""
