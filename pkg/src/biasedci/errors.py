"""Exception hierarchy shared by every module."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class AssumptionViolation(ValueError):
    """The estimator pair violates the MSE bound (s2 > s1 or b2^2 + s2^2 > s1^2)."""


class DegenerateCombination(DomainError):
    """The convex combination of the two estimators has zero variance."""


class NumericalFailure(RuntimeError):
    """A solver did not meet its residual tolerance."""


class BootstrapFailure(RuntimeError):
    """An estimator kept failing on bootstrap resamples."""
