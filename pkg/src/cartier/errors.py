"""Exception types shared across the library."""


class CartierError(Exception):
    """Base class for all library-specific errors."""


class NotPrime(CartierError):
    pass


class NotEisenstein(CartierError):
    pass


class NotUnit(CartierError):
    pass


class PrecisionExhausted(CartierError):
    pass


class RingMismatch(CartierError):
    pass


class ArityMismatch(CartierError):
    pass


class NonzeroConstantTerm(CartierError):
    pass


class SingularLinearPart(CartierError):
    pass


class MalformedLog(CartierError):
    pass


class NotIntegral(CartierError):
    pass


class AxiomViolation(CartierError):
    pass


class OracleMismatch(CartierError):
    pass


class NotFiniteHeight(CartierError):
    pass


class InsufficientDeltaPrecision(CartierError):
    pass


class InsufficientPrecision(CartierError):
    pass


class CapExceeded(CartierError):
    pass


class ExactDivisionFailed(CartierError):
    pass


class UndeterminedAtPrecision(CartierError):
    pass


class NotGenerating(CartierError):
    pass


class ZeroParameter(CartierError):
    pass
