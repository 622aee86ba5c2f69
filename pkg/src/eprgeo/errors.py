"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Unknown spacetime name or an invalid parameter set."""


class DomainError(ValueError):
    """An event lies outside the chart domain of a spacetime."""


class UsageError(ValueError):
    """API misuse: mismatched events, frame tags, or malformed inputs."""


class IntegrationError(RuntimeError):
    """Numerical integration failed (step underflow or a broken postcondition)."""


class DomainExitError(IntegrationError):
    """A trajectory left the chart domain mid-integration.

    Carries the last sample that was still inside the chart so callers can
    report how far the curve got.
    """

    def __init__(self, message, tau=None, coords=None, velocity=None):
        super().__init__(message)
        self.tau = tau
        self.coords = coords
        self.velocity = velocity
