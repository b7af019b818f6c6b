class ConfigurationError(ValueError):
    """Inconsistent sizes, bounds, or variable universes."""


class NormalizationError(ZeroDivisionError):
    """A tau-function with vanishing constant term was used as a denominator."""
