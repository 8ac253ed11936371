"""Exception hierarchy shared by the models, the simulator and the CLI."""


class IslandGridError(Exception):
    """Base class for all package errors."""


class ModelDomainError(IslandGridError, ValueError):
    """Input outside the domain where a model equation is defined."""


class ConfigError(IslandGridError):
    """Scenario configuration failed validation."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class SolverError(IslandGridError):
    """Bus solver failed to converge."""

    def __init__(self, message, residual=float("nan")):
        self.residual = residual
        super().__init__(message)


class SizingError(IslandGridError):
    """A source cannot supply the power asked of it."""


class ReportingError(IslandGridError):
    """A trace is not suitable for a steady-state report."""
