"""Exception types shared across the package.

The CLI maps these onto exit codes: usage/config/input problems exit 2,
mathematical domain violations exit 3.
"""


class InfconvError(Exception):
    """Base class for all package-specific errors."""


class SizeLimitError(InfconvError, ValueError):
    """An enumeration or recursion was requested beyond its supported size."""


class InvalidInputError(InfconvError, ValueError):
    """Structurally malformed input (bad partition, bad JSON shape, ...)."""


class MathDomainError(InfconvError, ArithmeticError):
    """Operation left its mathematical domain (singular dual number,
    non-invertible series, zero mean where an inverse is required)."""


class ConfigError(InfconvError, ValueError):
    """Invalid Monte Carlo or CLI configuration."""
