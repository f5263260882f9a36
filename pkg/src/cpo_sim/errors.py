"""Error and warning types shared across the package."""


class DomainError(ValueError):
    """Input outside the physical or mathematical domain of an operation."""


class UsageError(Exception):
    """Malformed user input: bad CLI flags, broken config or data files."""


class FitConvergenceError(RuntimeError):
    """Fit failed to converge. Carries the best parameters seen so far."""

    def __init__(self, message, best_params=None, diagnostic=None):
        super().__init__(message)
        self.best_params = best_params
        self.diagnostic = diagnostic


class ValidityWarning(UserWarning):
    """Evaluation outside the declared validity window of an approximation."""
