"""Exception hierarchy.

Configuration problems and numerical failures are kept apart so the CLI can
map them onto distinct exit codes.
"""


class FishboneError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(FishboneError, ValueError):
    """Invalid parameters, unknown presets, unsupported engine/model pairs."""


class SchemaError(ConfigError):
    """A config source could not be parsed."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key


class ValidationError(ConfigError):
    """A parsed value violates a domain invariant."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class UnsupportedModelError(ConfigError):
    """The restoring force lacks a property an operation needs."""


class NumericalError(FishboneError, ArithmeticError):
    """Base for failures of the numerical machinery."""


class AccuracyError(NumericalError):
    """Quadrature could not reach the requested tolerance."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class StiffnessError(NumericalError):
    """Adaptive step size collapsed below the representable limit."""


class HorizonError(NumericalError):
    """No period was detected before the time horizon."""


class DeterminantDriftError(NumericalError):
    """A computed monodromy matrix is not area preserving."""

    def __init__(self, message, drift=None):
        super().__init__(message)
        self.drift = drift
