"""Exception types shared across the toolkit."""


class TextvidError(Exception):
    """Base class for all toolkit errors."""


class DimensionError(TextvidError):
    """Array/plane dimensions are invalid or mismatched."""


class GeometryError(TextvidError):
    """A box or window violates frame geometry constraints."""


class NumericError(TextvidError):
    """A numeric consistency check failed (non-finite input, residue too large)."""


class ConfigError(TextvidError):
    """Invalid configuration value."""


class ValidationError(TextvidError):
    """An annotation document violates its invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class SchemaVersionError(TextvidError):
    """Document carries an unknown schema version tag."""
