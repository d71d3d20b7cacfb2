from django.core.exceptions import ValidationError


class FormulaError(ValidationError):
    """Formula text is malformed or a clause mixes positive and negative literals."""


class LayoutError(ValidationError):
    """Clauses cannot be laid out without crossing, or nest deeper than supported."""
