"""Exception types raised across the toolkit."""


class SpindleKitError(Exception):
    """Base class for all toolkit errors."""


class OutOfRange(SpindleKitError, ValueError):
    pass


class DegenerateEdge(SpindleKitError, ValueError):
    pass


class NotConvex(SpindleKitError, ValueError):
    pass


class InvalidSplit(SpindleKitError, ValueError):
    pass


class NonFinite(SpindleKitError, ValueError):
    pass


class SelfIntersection(SpindleKitError, ValueError):
    pass


class ChartViolation(SpindleKitError, ValueError):
    pass


class PremiseViolated(SpindleKitError, ValueError):
    pass


class EpsilonTooLarge(SpindleKitError, ValueError):
    pass


class QuadratureFailure(SpindleKitError, RuntimeError):
    pass


class NoConvergence(SpindleKitError, RuntimeError):
    pass


class NegativeEigenvalue(SpindleKitError, ValueError):
    pass


class BadRegionSpec(SpindleKitError, ValueError):
    pass


class MeshQualityFailure(SpindleKitError, RuntimeError):
    pass


class DegenerateTriangle(SpindleKitError, ValueError):
    pass


class SolverStagnation(SpindleKitError, RuntimeError):
    pass
