"""Exception hierarchy shared by every module."""


class DamError(Exception):
    """Base class for all library errors."""


class DomainError(DamError, ValueError):
    """An argument lies outside the region where the quantity is defined."""


class SingularError(DamError, ArithmeticError):
    """The convolution recurrence cannot be solved (f0 <= 0)."""


class NoBracketError(DamError, ArithmeticError):
    """No sign change of the root function before the analyticity boundary."""


class NormalizationError(DamError, ArithmeticError):
    """Stationary probabilities fail to sum to one."""


class StabilityError(DamError, ValueError):
    """The overload regime is unstable (rho2 >= 1)."""


class ConfigError(DamError, ValueError):
    """A run configuration violates the schema; ``path`` names the field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class ConsistencyWarning(UserWarning):
    """Both interior minima beat the critical objective."""
