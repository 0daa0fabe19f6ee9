"""Exception types shared across the package."""


class SpinSteerError(Exception):
    """Base class for all package-specific failures."""


class PreconditionError(SpinSteerError, ValueError):
    """An input violates a documented precondition (bad norm, bad range, ...)."""


class SynthesisError(SpinSteerError):
    """Field synthesis cannot produce a finite protocol for the given path."""


class IntegrationError(SpinSteerError):
    """Forward integration failed (non-finite field, blown-up state, ...)."""


class ConfigError(SpinSteerError):
    """Invalid experiment configuration (CLI exit code 2)."""


class SearchError(SpinSteerError):
    """A 1-D minimisation encountered a non-finite objective value."""
