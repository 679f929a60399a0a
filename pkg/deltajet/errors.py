"""
Exception hierarchy for deltajet.

Errors fall into four families that the command-line front end maps to exit
codes: precision problems, parse problems, violated domain preconditions and
exceeded computational caps.
"""


class DeltaJetError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class PrecisionError(DeltaJetError):
    """Not enough p-adic digits to carry out an operation."""

    exit_code = 2


class InsufficientPrecision(PrecisionError):
    pass


class ParseError(DeltaJetError):
    """Malformed textual input; carries the offending position."""

    exit_code = 3

    def __init__(self, message: str, text: str = "", position: int = 0):
        self.text = text
        self.position = position
        if text:
            pointer = " " * position + "^"
            message = f"{message} at position {position}\n  {text}\n  {pointer}"
        super().__init__(message)


class DomainError(DeltaJetError):
    """An input lies outside the domain of the operation."""

    exit_code = 4


class NotPrime(DomainError):
    pass


class NotOnScheme(DomainError):
    pass


class NotInvertible(DomainError):
    pass


class NotInvertibleModP(NotInvertible):
    pass


class NotDivisibleByP(DomainError):
    pass


class ContextMismatch(DomainError):
    pass


class LengthMismatch(DomainError):
    pass


class NonIntegralInput(DomainError):
    pass


class NotOrdinary(DomainError):
    pass


class BadReduction(DomainError):
    pass


class PNotInDomain(DomainError):
    pass


class IntegralityFailure(DomainError):
    pass


class NonIntegralParametrization(DomainError):
    pass


class NotDeltaPSymmetric(DomainError):
    pass


class PresentationUnverified(DomainError):
    pass


class CapError(DeltaJetError):
    """A configured size cap would be exceeded."""

    exit_code = 5


class DegreeBoundExceeded(CapError):
    pass


class CapExceeded(CapError):
    pass


class SearchCapExceeded(CapError):
    pass


class TruncationOverflow(CapError):
    pass


class OrderOverflow(CapError):
    pass


class InexactDivision(RuntimeError):
    """A division by p that must be exact was not; this is a bug."""


class PrecisionLossWarning(UserWarning):
    """Digits were lost beyond what the caller asked for."""
