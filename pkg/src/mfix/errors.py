"""Exception hierarchy shared by every mfix module."""


class MfixError(Exception):
    """Base class for all library errors."""


class StructuralError(MfixError, ValueError):
    """Dimension profiles disagree, an index is out of range, or a point is malformed."""


class NumericalError(MfixError, ArithmeticError):
    """An operator produced a non-finite or wrongly shaped value."""

    def __init__(self, message, component=None):
        super().__init__(message)
        self.component = component


class ValidationError(MfixError):
    """A declared hypothesis (monotonicity, comparison-function property, bounds) failed."""


class ConfigError(MfixError, ValueError):
    """A problem configuration could not be parsed or is inconsistent."""

    def __init__(self, message, field=None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
