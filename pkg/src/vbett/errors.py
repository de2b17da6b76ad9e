"""Exception hierarchy."""


class VbettError(Exception):
    """Base class for all tracker errors."""


class DomainError(VbettError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigError(VbettError, ValueError):
    """A model or scenario configuration is invalid."""


class NumericError(VbettError, ArithmeticError):
    """A numerical breakdown (singular matrix, underflow) during an update."""


class DegenerateOracleError(NumericError):
    """Every importance weight underflowed, or the cloud carries no mass."""
