"""Exception hierarchy shared by all gffdecide modules."""


class GffError(Exception):
    """Base class for all library errors."""


class NotPrime(GffError):
    pass


class DegreeZero(GffError):
    pass


class DivisionByZero(GffError):
    pass


class FieldMismatch(GffError):
    pass


class NoEmbedding(GffError):
    pass


class ZeroPolynomial(GffError):
    pass


class PrecisionExhausted(GffError):
    """Raised when truncated series do not carry enough coefficients.

    ``suggested`` carries a precision that the caller may retry with.
    """

    def __init__(self, message, suggested=None):
        super().__init__(message)
        self.suggested = suggested


class NotSimple(GffError):
    pass


class Inseparable(GffError):
    pass


class InseparableInX(GffError):
    pass


class BudgetExceeded(GffError):
    """Raised when a computation would exceed a configured resource budget."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class NormalizationFailure(GffError):
    pass


class SentenceSyntaxError(GffError):
    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class UnknownVariable(GffError):
    pass


class ConstantNotInK(GffError):
    pass


class NotUnivExist(GffError):
    pass


class ValuationAtomPresent(GffError):
    pass


class CharTwo(GffError):
    pass


class NoSuchS(GffError):
    pass


class CurveParseError(GffError):
    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class ReducibleCurve(GffError):
    pass


class IrreducibilityUnknown(GffError):
    pass
