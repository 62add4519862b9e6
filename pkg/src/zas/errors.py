"""Exception hierarchy shared by every module."""


class ZasError(Exception):
    """Base class for all errors raised by this package."""


class NonIntegrable(ZasError):
    pass


class ToleranceNotMet(ZasError):
    pass


class AmbiguousExponent(ZasError):
    pass


class Oscillatory(ZasError):
    pass


class StepUnderflow(ZasError):
    pass


class RouteMismatch(ZasError):
    pass


class NotTwiceDifferentiable(ZasError):
    """Raised at a segment join where the second derivative jumps.

    The one-sided scalar curvatures are attached as ``left`` and ``right``.
    """

    def __init__(self, message, left=None, right=None):
        super().__init__(message)
        self.left = left
        self.right = right


class DomainError(ZasError, ValueError):
    pass


class HypothesisViolated(ZasError):
    pass


class FactorVanishesInterior(ZasError):
    pass


class NoExpansion(ZasError):
    pass


class ResolutionInvalid(ZasError):
    pass


class InvalidSpec(ZasError, ValueError):
    pass


class ParseError(ZasError):
    pass


class ValidationError(ZasError, ValueError):
    """A profile violates an invariant; ``invariant`` names the first one."""

    def __init__(self, invariant, detail=""):
        msg = invariant if not detail else f"{invariant}: {detail}"
        super().__init__(msg)
        self.invariant = invariant
