"""Exception types raised by the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class InfeasibleError(ValueError):
    """The steering-vector estimation problem has no feasible point."""


class BoundaryFeasibleError(InfeasibleError):
    """The feasible set is finite (Delta0 / M equals the smallest eigenvalue of C~).

    The dual search is not meaningful here; enumerate the unit-norm minimal
    eigenvectors of C~ scaled to sqrt(M) instead.
    """


class SingularCovarianceError(ValueError):
    """The sample covariance is (numerically) singular and loading is off."""


class ExtractionError(RuntimeError):
    """A rank-one vector could not be extracted from a relaxed solution."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InconsistencyError(RuntimeError):
    """The dual certificate contradicts the optimality structure."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
