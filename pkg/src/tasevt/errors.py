"""Exception hierarchy shared by the numerical modules and the CLI."""


class TasEvtError(Exception):
    """Base class for all library errors."""


class DomainError(TasEvtError, ValueError):
    """Argument outside the mathematical domain of a function."""


class ConvergenceError(TasEvtError, ArithmeticError):
    """An iterative method exhausted its iteration budget."""


class BracketError(ConvergenceError):
    """Quantile solver could not bracket the requested probability."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class OutOfRegimeError(TasEvtError, ValueError):
    """A regime closed form is undefined for the given parameters."""


class GridError(TasEvtError, ValueError):
    """Diagnostic grid unusable (too short, or tail numerically unresolved)."""


class InsufficientTrialsError(TasEvtError, ValueError):
    """Too few Monte Carlo trials for the requested statistic."""


class ConfigError(TasEvtError, ValueError):
    """Malformed experiment configuration or command-line input."""
