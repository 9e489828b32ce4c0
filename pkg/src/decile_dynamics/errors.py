"""Exception hierarchy.

Every error carries the process exit code the CLI reports for it:
2 parse, 3 validation, 4 fit, 5 I/O (``OSError`` is mapped separately).
"""

from __future__ import annotations


class DecileError(Exception):
    exit_code = 1


class ParseError(DecileError):
    exit_code = 2

    def __init__(self, message: str, *, row: int | None = None, col: int | None = None):
        self.row = row
        self.col = col
        where = []
        if row is not None:
            where.append(f"row {row}")
        if col is not None:
            where.append(f"column {col}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


class EmptyInput(ParseError):
    pass


class BadHeader(ParseError):
    pass


class WrongColumnCount(ParseError):
    pass


class NonNumericField(ParseError):
    pass


class ValidationError(DecileError):
    exit_code = 3


class SeriesInvalid(ValidationError):
    pass


class DuplicateSeries(ValidationError):
    pass


class NonPositiveIndex(ValidationError):
    pass


class DuplicateYear(ValidationError):
    pass


class MissingDeflatorYear(ValidationError):
    pass


class AlreadyReal(ValidationError):
    pass


class MetaMismatch(ValidationError):
    def __init__(self, field: str, left: object, right: object):
        self.field = field
        super().__init__(f"{field} differs: {left!r} vs {right!r}")


class NotChronological(ValidationError):
    pass


class InsufficientSeries(ValidationError):
    pass


class WrongDegree(ValidationError):
    pass


class LabelSetMismatch(ValidationError):
    def __init__(self, only_produced: set[str], only_reference: set[str]):
        self.only_produced = only_produced
        self.only_reference = only_reference
        super().__init__(
            f"pair labels differ: only in produced {sorted(only_produced)}, "
            f"only in reference {sorted(only_reference)}"
        )


class InvalidParameter(ValidationError):
    pass


class NotDivisibleByTen(ValidationError):
    pass


class FitError(DecileError):
    exit_code = 4


class DegreeTooHigh(FitError):
    pass


class RankDeficient(FitError):
    pass


class DegenerateVariance(FitError):
    pass
