"""Exception types shared across the simulator."""


class NeuroarmError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(NeuroarmError):
    """A scenario or model parameter is invalid. Names the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class IntegrationError(NeuroarmError):
    """Time integration produced non-finite values."""

    def __init__(self, step: int, message: str = "non-finite state"):
        self.step = step
        super().__init__(f"integration failed at step {step}: {message}")


class ConvergenceError(NeuroarmError):
    """An iterative solve did not reach its tolerance."""

    def __init__(self, residual: float, message: str = "did not converge"):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


class AnalysisError(NeuroarmError):
    """A closed-form or root-finding analysis step failed."""
