class SqueezeCheckError(Exception):
    """Base class for all errors raised by squeezecheck."""


class InvalidParamsError(SqueezeCheckError, ValueError):
    """Raised when physical parameters or states violate their invariants."""


class ConfigError(SqueezeCheckError, ValueError):
    """Raised when a scan configuration or a CLI override cannot be validated."""


class SingularSystemError(SqueezeCheckError):
    """Raised when the steady-state linear system cannot be solved (degenerate parameters)."""


class NonConvergenceError(SqueezeCheckError):
    """Raised when the Fock-space truncation does not converge below the configured cap."""


class NoRealSolutionError(SqueezeCheckError):
    """Raised when the sideband resonance condition has no real detuning solution."""


class NoSignChangeError(SqueezeCheckError):
    """Raised when a threshold bracket does not straddle the requested crossing."""


class EmptyGridError(SqueezeCheckError, ValueError):
    """Raised when a local oscillator scan is requested on an empty grid."""
