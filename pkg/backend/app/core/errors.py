from __future__ import annotations


class FStirlingError(Exception):
    """Base class for every error raised by the library."""


class ConfigError(FStirlingError):
    """Malformed or out-of-bounds user configuration."""


class OracleCapError(ConfigError):
    pass


class DomainError(FStirlingError):
    """A value was requested outside the domain where it is defined."""


class VariableMismatchError(FStirlingError):
    pass


class TruncationError(FStirlingError):
    """Series coefficient read past its order, or a non-invertible divisor."""


class CyclotomicError(FStirlingError):
    pass
