"""Exception types shared across the package.

The split matters for the command-line tool, which maps configuration
problems and precondition violations to distinct exit codes.
"""


class DistwaveError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(DistwaveError):
    """A run configuration could not be parsed or references unknown entries."""


class PreconditionError(DistwaveError):
    """An operation was called with inputs outside its documented domain."""


class ExceptionalFrequencyError(PreconditionError):
    """A frequency fell in the exceptional set (Wronskian below tolerance)."""


class IntegrationError(DistwaveError):
    """The ODE integrator failed (step-size underflow or non-finite values)."""
