"""Exception hierarchy.

Everything raised on purpose by this package derives from :class:`EpciError`,
so callers can catch one type.  The CLI maps these onto its exit codes
(2 input, 3 degenerate fit, 4 numeric failure).
"""


class EpciError(Exception):
    """Base class for all epci errors."""


class DomainError(EpciError, ValueError):
    """An argument is outside the mathematical domain of an operation."""


class ValidationError(EpciError, ValueError):
    """A structural constraint on inputs or configuration is violated."""


class InsufficientDataError(ValidationError):
    """Too few observations for the requested fit (n < 2 or n <= d)."""


class SingularDesignError(ValidationError):
    """Design matrix is rank deficient after prepending the intercept."""


class WeightMatrixError(ValidationError):
    """Weight matrix is not symmetric positive definite."""


class DegenerateFitError(EpciError):
    """Fit has zero residual scale; the pivotal quantity is undefined."""


class NumericError(EpciError, ArithmeticError):
    """An iterative routine failed to converge within its budget."""
