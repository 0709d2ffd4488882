"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class IntegrationDivergedError(RuntimeError):
    """A flow trajectory left the closed disc by more than the containment slack."""


class NearCollisionError(ArithmeticError):
    """Two points of a pair trajectory came closer than the collision guard."""


class SamplingDegeneracyError(RuntimeError):
    """Too many Monte Carlo samples had to be discarded and redrawn."""


class ConfigError(ValueError):
    """A run configuration failed strict validation."""
