"""Exception types shared across the package."""


class SphereSyncError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SphereSyncError, ValueError):
    """Invalid argument: dimension mismatch, out-of-domain value, bad construction."""


class SingularConfigurationError(SphereSyncError):
    """An exactly antipodal neighbor pair makes the coupling direction undefined."""


class DegenerateConfigurationError(SphereSyncError):
    """Zero Euclidean mean: no hemisphere pole can be extracted."""


class SingularProjectionError(SphereSyncError):
    """A state sits at the south pole, where the planar projection blows up."""


class SignalConstructionError(SphereSyncError):
    """A switching signal satisfying the requested dwell spec cannot be built."""


class DwellSpecViolationError(SphereSyncError):
    """A provided signal violates its own dwell-time specification."""


class ConfigError(SphereSyncError):
    """Scenario configuration failed to parse or validate; message names the field."""
