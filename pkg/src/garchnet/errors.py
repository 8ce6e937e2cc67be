"""Exception hierarchy.

Every error carries the CLI exit code for its class: 2 for data/format
problems, 3 for numeric or domain failures.
"""

from __future__ import annotations


class GarchNetError(Exception):
    exit_code = 1


class DataError(GarchNetError, ValueError):
    exit_code = 2


class DomainError(GarchNetError, ArithmeticError):
    exit_code = 3


# data / format
class FormatError(DataError):
    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class TooFewRows(DataError):
    pass


class DegenerateColumn(DataError):
    pass


class SeriesTooShort(DataError):
    pass


class MissingStatistic(DataError):
    pass


class NoValidationRows(DataError):
    pass


class LengthMismatch(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class KindMismatch(DataError):
    pass


# numeric / domain
class InvalidParams(DomainError):
    pass


class NonFiniteMoment(DomainError):
    pass


class NonStationary(DomainError):
    pass


class NonStationaryPair(DomainError):
    pass


class KurtosisTooLow(DomainError):
    pass


class NegativeRadicand(DomainError):
    pass


class BetaOutOfRange(DomainError):
    pass


class NoRootInRange(DomainError):
    pass


class AmbiguousRoot(DomainError):
    """More than one root; ``candidates`` holds every solution found."""

    def __init__(self, message: str, candidates: list):
        self.candidates = list(candidates)
        super().__init__(message)


class RejectionStall(DomainError):
    pass
