"""Exception hierarchy shared by every module.

Input-validation failures subclass :class:`ValueError` so callers that only
care about "bad input" can catch that.
"""


class NegDepError(Exception):
    """Base class for all errors raised by negdep."""


class MeasureError(NegDepError, ValueError):
    pass


class NegativeWeight(MeasureError):
    pass


class WeightsDontSumToOne(MeasureError):
    pass


class DuplicateSupportPoint(MeasureError):
    pass


class DimensionMismatch(MeasureError):
    pass


class PointOffGrid(MeasureError):
    pass


class EmptyIndexSet(MeasureError):
    pass


class IndexOutOfRange(MeasureError):
    pass


class LambdaOutOfRange(MeasureError):
    pass


class NonpositiveScale(MeasureError):
    pass


class EvaluationDomainError(MeasureError):
    pass


class PosetMismatch(NegDepError, ValueError):
    pass


class NotMonotone(NegDepError, ValueError):
    pass


class BudgetExceeded(NegDepError):
    """Enumeration or pair iteration would exceed the caller's budget.

    ``reached`` is the count produced (or required) when the limit was hit.
    """

    def __init__(self, message, reached=None, budget=None):
        super().__init__(message)
        self.reached = reached
        self.budget = budget


class DimensionTooSmall(NegDepError, ValueError):
    pass


class GridRequired(NegDepError, ValueError):
    pass


class WeightValidation(NegDepError, ValueError):
    pass


class HOutOfRange(NegDepError, ValueError):
    pass


class QOutOfRange(NegDepError, ValueError):
    pass


class ParameterOutOfRange(NegDepError, ValueError):
    pass


class MalformedProgram(NegDepError, ValueError):
    pass


class InfeasibleOnSupport(NegDepError):
    """No probability measure on the candidate support meets the constraints."""

    def __init__(self, message, farkas=None):
        super().__init__(message)
        self.farkas = farkas


class TargetNotPositive(NegDepError, ValueError):
    pass


class TooLarge(NegDepError, ValueError):
    pass


class NotOneDimensional(NegDepError, ValueError):
    pass


class OracleMismatch(NegDepError, AssertionError):
    """Two independent evaluations of the same quantity disagreed."""
