"""Exception hierarchy shared by all modules."""


class RigidityError(Exception):
    """Base class for every error raised by the package."""


class InvalidDomain(RigidityError):
    pass


class NotSimplyBounded(RigidityError):
    """Convexity queries need a single boundary component."""


class ConvexDomain(RigidityError):
    pass


class SearchFailed(RigidityError):
    pass


class ParameterOutOfRange(RigidityError, ValueError):
    pass


class PointOutsideClosure(RigidityError):
    pass


class ClipSensitive(RigidityError):
    """A query came too close to the artificial clip boundary."""


class UnpairedComponent(RigidityError):
    pass


class EpsilonTooLargeForClip(RigidityError):
    pass


class SampleCountTooSmall(RigidityError, ValueError):
    pass


class NonFiniteIntegrand(RigidityError):
    pass


class RankDeficient(RigidityError):
    pass


class ConvexityLost(RigidityError):
    pass


class NoConvergence(RigidityError):
    pass


class ArcLengthMismatch(RigidityError):
    pass


class ClipTooSmall(RigidityError):
    pass


class DeformationDegenerate(RigidityError):
    pass


class RankUncertainWarning(UserWarning):
    """Solver proceeds although the knot conditions guaranteeing rank 3 fail."""
