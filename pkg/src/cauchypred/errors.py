"""Exception hierarchy shared across the package.

Degenerate-statistic errors signal that a test could not be computed on a
particular data set (zero denominator, zero group variance, perfect fit).
The Monte Carlo runner absorbs these per replication; everything else is a
caller error and propagates.
"""


class CauchyPredError(Exception):
    """Base class for all package errors."""


class DomainError(CauchyPredError, ValueError):
    """An argument is outside its mathematical domain."""


class DegenerateStatisticError(CauchyPredError):
    """A statistic is undefined on this data set (not a usage error)."""


class DegenerateDenominatorError(DegenerateStatisticError):
    """Sign-instrument denominator is zero."""


class DegenerateGroupsError(DegenerateStatisticError):
    """All group statistics are identical, so their spread is zero."""


class DegenerateVarianceError(DegenerateStatisticError):
    """Residual variance estimate is zero (perfect fit)."""


class SignDegeneracyError(DegenerateStatisticError):
    """Sign instruments are collinear across predictors."""


class SingularDesignError(DegenerateStatisticError):
    """Least-squares design matrix is rank deficient."""


class PartitionError(CauchyPredError, ValueError):
    """Requested group partition is impossible for this sample size."""


class SchemaError(CauchyPredError, ValueError):
    """Experiment file violates the schema."""


class CsvFormatError(CauchyPredError, ValueError):
    """CSV input is malformed."""


class InsufficientDataError(CauchyPredError, ValueError):
    """Too few usable observations."""
