from django.core.exceptions import ValidationError


class DomainError(ValidationError):
    """Invalid numeric input to a geometric or metric operation."""


class CapacityError(DomainError):
    """
    Requested segment area exceeds what the sagitta cap allows.

    params['maximum'] carries the largest achievable area.
    """

    @property
    def maximum(self):
        return self.params['maximum']


class TopologyError(ValidationError):
    """Input polygons do not form a planar subdivision. params['faces'] names the faces."""


class SkeletonError(ValidationError):
    """Straight skeleton construction hit a degenerate feature."""


class DocumentError(ValidationError):
    """Schema violation in an input document. params['path'] is the JSON path."""


class ConfigurationError(ValidationError):
    """Run configuration or supply/demand balance is inconsistent."""


class InvariantViolation(Exception):
    """Internal consistency failure; signals a bug rather than bad input."""
