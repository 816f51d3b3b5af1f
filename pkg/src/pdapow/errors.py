"""Exception hierarchy for pdapow."""


class PDAError(Exception):
    """Base class for all pdapow errors."""


class DomainError(PDAError, ValueError):
    """An argument lies outside the domain of an operation."""


class SingularDifficultyError(DomainError):
    """A zero difficulty would give a player unbounded winning weight."""


class StateBudgetError(PDAError):
    """The full state space exceeds the configured budget."""


class LumpabilityError(PDAError):
    """The configuration does not admit the symmetry reduction."""


class ConvergenceError(PDAError, RuntimeError):
    """Power iteration did not reach the requested tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
