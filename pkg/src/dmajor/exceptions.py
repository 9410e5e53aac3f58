"""Exception types raised by the package.

All of them derive from :class:`DMajorError`, which is itself a
``ValueError`` so callers that only care about bad input can catch that.
"""


class DMajorError(ValueError):
    pass


class ShapeMismatch(DMajorError):
    pass


class NonHermitianInput(DMajorError):
    pass


class NoConvergence(DMajorError, RuntimeError):
    pass


class NotPSD(DMajorError):
    pass


class NotCP(DMajorError):
    pass


class ProbeNotPD(DMajorError):
    pass


class EmptyKrausSet(DMajorError):
    pass


class IsStrictlyPositive(DMajorError):
    pass


class DimensionMismatch(ShapeMismatch):
    pass


class LengthMismatch(ShapeMismatch):
    pass


class NonpositiveWeight(DMajorError):
    pass


class DimensionTooSmall(DMajorError):
    pass


class PreconditionViolated(DMajorError):
    pass


class NotDStochastic(DMajorError):
    pass


class WrongDimension(ShapeMismatch):
    pass


class IndexOutOfRange(DMajorError, IndexError):
    pass


class NotAState(DMajorError):
    pass


class DomainViolation(DMajorError):
    pass


class ConstantWeights(DMajorError):
    pass


NonHermitian = NonHermitianInput
