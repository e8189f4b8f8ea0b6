"""Exception hierarchy shared across the toolkit.

Exit-code mapping used by the CLI:
  2  input / configuration problems (ConfigError, DataFormatError, ...)
  3  geometry or sensor-model problems (GeometryError and subclasses)
  4  numerical failures (NumericalError and subclasses)
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ToolkitError):
    """Invalid configuration file, option value, or section."""


class DataFormatError(ToolkitError):
    """Malformed CSV/JSON input. Carries the offending line when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
        self.line = line


class InvalidSpec(ConfigError):
    """Sweep or validation motion parameters violate their invariants."""


class GeometryError(ToolkitError):
    """Invalid sensing geometry or sensor-model state."""


class NonPositiveProximity(GeometryError):
    """Sensor lies on or inside the reflector sphere."""

    def __init__(self, message, orientation=None):
        if orientation is not None:
            message = f"{message} at pitch={orientation[0]:.4f} deg, roll={orientation[1]:.4f} deg"
        super().__init__(message)
        self.orientation = orientation


class NonPositiveDistance(GeometryError):
    """Optical path evaluated at a non-positive proximity."""


class GimbalLock(GeometryError):
    """Composed rotation too close to the pitch singularity to factor."""


class NumericalError(ToolkitError):
    """Base class for solver failures."""


class RankDeficient(NumericalError):
    """Design matrix numerically rank deficient.

    ``condition`` holds the max/min singular-value ratio that failed the test.
    """

    def __init__(self, message, condition=None):
        if condition is not None:
            message = f"{message} (condition estimate {condition:.3e})"
        super().__init__(message)
        self.condition = condition


class InsufficientSamples(NumericalError):
    """Fewer samples than unknowns."""


class LengthMismatch(ToolkitError):
    """Paired traces or chains differ in length."""


class ZeroSpan(ToolkitError):
    """Percent error requested against a constant truth trace."""


class WorkingBandWarning(UserWarning):
    """Sensor proximity left the usable working band; results kept, flagged."""
