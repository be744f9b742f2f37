"""Exception family shared across the package."""

from __future__ import annotations


class EnvelopeError(Exception):
    """Base class for every error raised by this package."""


class ParseError(EnvelopeError):
    """Expression text violates the grammar or names an unknown identifier."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class PoleProximityError(EnvelopeError):
    """Evaluation was requested too close to a pole of the expression."""


class PoleFindingError(EnvelopeError):
    """Denominator analysis failed: degree cap exceeded, identically zero
    denominator, or the eigenvalue root finder did not converge."""


class GeometryError(EnvelopeError):
    """Invalid or degenerate geometric input."""


class PointOnPathError(GeometryError):
    """Winding number requested for a point lying on (or nearly on) the path."""


class WindingResidualError(GeometryError):
    """Accumulated argument failed to land near an integer multiple of 2*pi."""


class QuadratureBudgetError(EnvelopeError):
    """Adaptive refinement exhausted its panel budget; the integrand is
    effectively non-integrable at the requested tolerance."""


class ExtensionPreconditionError(EnvelopeError):
    """Extension evaluation refused: some basis moment is nonzero, so no
    holomorphic extension to the envelope exists."""


class CurveDataError(EnvelopeError):
    """Sampled boundary data is malformed or too coarse for the request."""


class ScenarioError(EnvelopeError):
    """Scenario configuration cannot be executed."""
