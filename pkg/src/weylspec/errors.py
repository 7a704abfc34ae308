"""
Exception types raised by weylspec.

Config problems map to CLI exit status 2, numerical breakdowns to exit 1.
"""


class ConfigError(ValueError):
    """Run-config document failed strict validation."""


class PotentialError(ValueError):
    """Coefficient functions violate a hypothesis (p <= 0, majorant, decay)."""


class NumericalError(RuntimeError):
    """
    A computation could not meet its accuracy contract.

    Attributes:
        location: Optional x (or λ, z) where the failure was detected.
    """

    def __init__(self, message: str, location=None):
        super().__init__(message)
        self.location = location
