"""
Cobordism Calculator - Exceptions
Error hierarchy shared by the algebra layer, the services and the CLI.
"""

from typing import Optional


class CobcalcError(Exception):
    """Base class for every calculator error"""

    exit_code = 1


# =============================================
# SERIES / RING ERRORS
# =============================================

class SeriesError(CobcalcError):
    """Errors raised by coefficient rings and power series"""


class VariableMismatch(SeriesError):
    """Operands live in different variable frames"""


class RingMismatch(SeriesError):
    """Operands have different coefficient rings"""


class NotAUnit(SeriesError):
    """Constant term is not invertible in the coefficient ring"""


class DivergentSubstitution(SeriesError):
    """Substitution is not finitely computable at the stated precision"""


class BadLowestTerm(SeriesError):
    """Series does not start with x, so it has no compositional inverse"""


class UngradedRing(SeriesError):
    """Coefficient ring carries no grading"""


class PrecisionTooLow(SeriesError):
    """Requested data lies beyond the known precision"""


class SeriesParseError(SeriesError, ValueError):
    """Canonical text or JSON could not be read"""


class IntegralityFailure(SeriesError):
    """A denominator survived where an integral result was required"""


# =============================================
# FORMAL GROUP LAW ERRORS
# =============================================

class LawError(CobcalcError):
    """Errors raised while building or using formal group laws"""


class AxiomViolation(LawError):
    """A formal group law axiom fails at some degree"""

    def __init__(self, axiom: str, degree: Optional[int], detail: str = ''):
        self.axiom = axiom
        self.degree = degree
        self.detail = detail
        message = f"axiom '{axiom}' fails at degree {degree}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class NonNilpotentArgument(LawError):
    """Formal sum part has a nonzero constant term"""


# =============================================
# ZETA ERRORS
# =============================================

class ZetaError(CobcalcError):
    """Errors raised by subset decompositions"""


class NonPositiveMultiplicity(ZetaError):
    """Multiplicity is zero, or negative without opting in"""


class TooManyDivisors(ZetaError):
    """More divisors than the subset bitmask supports"""


class NotEnoughDivisors(ZetaError):
    """Splitting check needs at least two divisors"""


# =============================================
# CHERN ERRORS
# =============================================

class ChernError(CobcalcError):
    """Errors raised by Chern-root contexts"""


class NonNilpotent(ChernError):
    """Element has a nonzero constant part where an Euler class was expected"""


class StructureViolation(ChernError):
    """Coefficient matrix does not have units exactly on the anti-diagonal"""


class NotInvertible(ChernError):
    """No unit pivot was found during elimination"""


# =============================================
# THEORY ERRORS
# =============================================

class TheoryError(CobcalcError):
    """Errors raised by specialized theories and Riemann-Roch"""


class UnsupportedTheory(TheoryError):
    """Point classes of the theory are not known"""


class WrongLaw(TheoryError):
    """Operation requires a different formal group law"""


class NonIntegerResult(TheoryError):
    """Euler characteristic came out non-integral"""


# =============================================
# REQUEST ERRORS
# =============================================

class InvalidRequest(CobcalcError):
    """A command request failed validation before any computation"""

    exit_code = 2

    def __init__(self, message: str, flag: Optional[str] = None):
        self.flag = flag
        super().__init__(message)
