"""Exception hierarchy."""


class NecklaceError(Exception):
    """Base class for failures reported by this package."""


class ConfigurationError(NecklaceError, ValueError):
    """Parameters outside the validated breather regime."""


class BracketError(NecklaceError, RuntimeError):
    """Shooting bracket does not separate the two escape behaviours."""


class ConvergenceError(NecklaceError, RuntimeError):
    """Newton iteration failed to reach the residual tolerance."""


class SimulationError(NecklaceError, RuntimeError):
    """Time stepping produced non-finite values."""
