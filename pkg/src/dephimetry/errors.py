"""Exception types shared across the toolkit.

Input-driven failures derive from ValueError so that callers (and the CLI)
can treat them uniformly as usage errors; consistency failures that point
at a broken internal invariant derive from RuntimeError instead.
"""


class SingularCovarianceError(ValueError):
    """Covariance matrix is singular and not of the collective (rank-one) form."""


class DegenerateMeasurementError(ValueError):
    """Every outcome probability fell below the probability floor."""


class UninformativeMeasurementError(ValueError):
    """The measurement carries no first-order phase information."""


class NumericalConsistencyError(RuntimeError):
    """An internally derived quantity violated a numerical sanity bound."""


class BoundViolationError(RuntimeError):
    """Computed information exceeded its theoretical ceiling."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
