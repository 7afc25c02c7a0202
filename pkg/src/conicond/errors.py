"""Exception types shared across the package."""


class ConicondError(Exception):
    """Base class for all package errors."""


class DegenerateSubspace(ConicondError):
    pass


class DimensionMismatch(ConicondError):
    pass


class DimensionTooLarge(ConicondError):
    pass


class UnsupportedNorm(ConicondError):
    pass


class NonPolyhedralNorm(ConicondError):
    pass


class MissingCone(ConicondError):
    pass


class VNotInCone(ConicondError):
    pass


class NotInterior(ConicondError):
    pass


class NumericalFailure(ConicondError):
    pass


class UnboundedPolytope(ConicondError):
    pass


class MissingWitnesses(ConicondError):
    pass


class DegenerateVbar(ConicondError):
    """Raised when the cone witness of the infeasible-side certificate is zero."""

    def __init__(self, fallback_value):
        super().__init__(f"v-bar vanished; fallback value {fallback_value!r}")
        self.fallback_value = fallback_value


class NotInjective(ConicondError):
    pass


class IllPosedInstance(ConicondError):
    pass


class InfeasibleSide(ConicondError):
    pass


class RankDeficientBlock(ConicondError):
    pass


class SamplingExhausted(ConicondError):
    pass


class ValidationError(ConicondError):
    """Bad instance file or CLI input; the message names the offending field."""
