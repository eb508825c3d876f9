"""Exception types shared across the toolkit."""


class SnowforgeError(Exception):
    pass


class EmptyInput(SnowforgeError):
    pass


class ParseError(SnowforgeError):
    pass


class NonManifoldEdge(SnowforgeError):
    pass


class DegreeOutOfRange(SnowforgeError):
    pass


class InvalidGenerator(SnowforgeError):
    pass


class Unresolved(SnowforgeError):
    """Two points could not be separated within the built depth."""

    def __init__(self, depth):
        super().__init__(f"not resolved up to depth {depth}")
        self.depth = depth


class ContainmentViolation(SnowforgeError):
    pass


class ForbiddenStar(SnowforgeError):
    pass


class NotColumnar(SnowforgeError):
    pass


class NonConvex(SnowforgeError):
    pass


class NotBiLipschitz(SnowforgeError):
    pass


class OrientationReversed(SnowforgeError):
    pass


class GapViolated(SnowforgeError):
    pass


class RadiusOutOfRange(SnowforgeError):
    pass


class AnchorMismatch(SnowforgeError):
    pass


class DegenerateDomain(SnowforgeError):
    pass


class SolverDiverged(SnowforgeError):
    pass


class CrowdedPrevertices(SnowforgeError):
    pass


class AsymmetricGenerator(SnowforgeError):
    pass


class DepthLimit(SnowforgeError):
    def __init__(self, msg="depth limit reached", level=None):
        super().__init__(msg)
        self.level = level


class NotContracting(SnowforgeError):
    pass


class OddDegree(SnowforgeError):
    pass


class InversionFailed(SnowforgeError):
    pass


class RadiusOrderViolated(SnowforgeError):
    pass


class NoContractionFound(SnowforgeError):
    pass


class Unclassifiable(SnowforgeError):
    pass


class NotBuilt(SnowforgeError):
    pass


class ConfigError(SnowforgeError):
    pass


class InsufficientResolution(SnowforgeError):
    pass


class UnsupportedGenerator(SnowforgeError):
    """Generator is valid but outside the class the explicit map pipeline supports."""

    pass
