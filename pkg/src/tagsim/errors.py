"""Exception types shared across the toolkit.

Everything model-related derives from ModelDomainError so callers (and the
CLI) can distinguish "the physics says no" from I/O or usage problems.
"""


class ModelDomainError(ValueError):
    """A requested state violates the mechanism or pipeline model."""


class ParameterError(ModelDomainError):
    """Physical parameters fail validation."""


class UnreachableAngleError(ModelDomainError):
    """Stroke maps outside the arcsin domain: the mirror cannot reach it."""


class BeamLimitError(ModelDomainError):
    """Mirror rotation would steer the beam parallel to (or past) the scan plane."""


class SingularTransformError(ModelDomainError):
    """Transform is not rigid or is evaluated at a singular configuration."""


class NoEdgePixelsError(ModelDomainError):
    """Edge detection produced no pixels to fit."""


class InsufficientDataError(ModelDomainError):
    """Too few samples for a fit."""


class EdgeOutsideCropError(ModelDomainError):
    """The silhouette edge being measured left the analysis crop window."""
