"""Exception types shared across the package."""


class NqdRoofError(Exception):
    """Base class for all package errors."""


class MalformedCurveError(NqdRoofError):
    """Degenerate or self-intersecting boundary parameterization."""


class DomainError(NqdRoofError):
    """Domain violates a structural invariant (bounded, overlapping components, ...)."""


class AmbiguousPointError(NqdRoofError):
    """Membership query too close to the boundary to classify."""


class EvaluationError(NqdRoofError):
    """Non-finite integrand value at a quadrature node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NearBoundaryError(NqdRoofError):
    """Evaluation point inside the near-boundary exclusion collar."""


class FarFieldError(NqdRoofError):
    """Evaluation point beyond the radius covered by the truncated contour."""


class InadmissibleError(NqdRoofError):
    """Test function outside the admissible class for this domain."""


class PathingError(NqdRoofError):
    """No collar-safe polyline path could be constructed inside the domain."""


class TractPinchError(NqdRoofError):
    """Tract arclength vanished at an interior radius of the integration range."""


class HeinsInputError(NqdRoofError):
    """Input samplers violate the non-negative / pairwise-disjoint requirements."""

    def __init__(self, message, pair=None, point=None):
        super().__init__(message)
        self.pair = pair
        self.point = point


class ConfigError(NqdRoofError):
    """Invalid or inconsistent run configuration."""
