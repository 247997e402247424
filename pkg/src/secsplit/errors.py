"""Typed exceptions raised across the package."""


class SecsplitError(Exception):
    """Base class for all package errors."""


class DomainError(SecsplitError, ValueError):
    """Input outside the admissible parameter or chart domain."""


class ConfigError(SecsplitError, ValueError):
    """Invalid run configuration; the message names the violated constraint."""


class QuadratureError(SecsplitError, ArithmeticError):
    """Adaptive quadrature did not reach the requested accuracy."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ReconciliationError(SecsplitError, ArithmeticError):
    """Closed-form and quadrature routes disagree beyond tolerance."""

    def __init__(self, message, cell=None, agreement=None):
        super().__init__(message)
        self.cell = cell
        self.agreement = agreement


class DynamicsError(SecsplitError, RuntimeError):
    """Base class for failures of the numerical flow machinery."""


class StepFailure(DynamicsError):
    """The ODE solver rejected a step or reported failure."""


class ChartDomainError(DynamicsError):
    """The trajectory left the chart domain (for instance G1 -> 0)."""


class MaxStepsExceeded(DynamicsError):
    """The step budget ran out before the integration finished."""


class EscapeError(DynamicsError):
    """The orbit did not reach the requested section or line in time."""


class NewtonDivergence(DynamicsError):
    """Newton iteration for a fixed point or energy lift failed."""


class ResolutionError(DynamicsError):
    """Manifold sampling too coarse for the requested measurement."""

    def __init__(self, message, hint=None):
        super().__init__(message if hint is None else f"{message} (hint: {hint})")
        self.hint = hint
