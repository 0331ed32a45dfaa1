"""Exception hierarchy.

Errors fall into three families that the command line maps onto exit codes:
usage problems (2), bad input data (3) and numerical failures (4).
"""


class SurvextError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class UsageError(SurvextError):
    exit_code = 2


class ParseError(UsageError):
    """A textual distribution spec, measure name or option could not be parsed."""


class InvalidParameter(UsageError):
    """A distribution parameter is outside its admissible range."""


class WindowError(UsageError):
    """Window size for a spacing statistic is not in ``1 <= m < n/2``."""


class DataError(SurvextError):
    exit_code = 3


class FileError(DataError):
    pass


class SchemaError(DataError):
    pass


class DomainError(DataError):
    """Sample values fall outside the domain a statistic requires."""


class MissingCriticalValue(DataError):
    pass


class InsufficientData(DataError):
    pass


class NumericError(SurvextError):
    exit_code = 4


class NonConvergent(NumericError):
    """Adaptive quadrature did not reach the requested tolerance."""


class ZeroSurvival(NumericError):
    """The survival function vanishes at the truncation age."""


class ZeroSurvivalAtT(ZeroSurvival):
    """Empirical survival at ``t`` is zero for one of the samples."""


class DegenerateBase(NumericError):
    """Survival extropy of the reference model is zero."""


class DegenerateDenominator(NumericError):
    """All spacings of the reference sample are zero."""


class ZeroMean(NumericError):
    pass
