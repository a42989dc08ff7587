"""Exception types shared across the package."""


class FunestError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(FunestError, ValueError):
    """A parameter violates its domain constraint.

    Carries the offending field name so callers can report it
    programmatically.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class InvalidStateError(FunestError, ValueError):
    """A covariance matrix is not a valid quantum state."""


class NotPureError(InvalidStateError):
    """A pure state was required; reports the determinant found."""

    def __init__(self, det: float):
        self.det = det
        super().__init__(f"state is not pure: det sigma = {det!r}")


class NoSteadyStateError(FunestError):
    """The monitored dynamics has no steady state (eta = 0)."""


class IntegrationFailureError(FunestError):
    """Fixed-step integration failed; carries the offending time."""

    def __init__(self, message: str, t: float):
        self.t = t
        super().__init__(f"{message} (t = {t!r})")


class DegeneratePovmError(FunestError):
    """Dichotomic outcome probability hit 0 or 1; FI is undefined."""


class ConfigError(FunestError):
    """A configuration file or value could not be parsed."""
