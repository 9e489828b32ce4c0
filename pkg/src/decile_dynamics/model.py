"""Domain types for decile time series and fit results.

All types are frozen dataclasses; values are stored as tuples of floats so
instances are hashable and safe to share between threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import InvalidParameter, SeriesInvalid

N_DECILES = 10


class Variable(str, Enum):
    INCOME = "income"
    EXPENDITURE = "expenditure"


class Flow(str, Enum):
    GROSS = "gross"
    DISPOSABLE = "disposable"
    UNSPECIFIED = "unspecified"


class Measure(str, Enum):
    """How a decile's value summarises its members: group mean or group minimum."""

    MEAN = "mean"
    LOWER_LIMIT = "lower_limit"

    @property
    def ladder(self) -> tuple[float, ...]:
        """Cumulative population percentages assigned to the sorted deltas."""
        if self is Measure.MEAN:
            return (90.0, 80.0, 70.0, 60.0, 50.0, 40.0, 30.0, 20.0, 10.0, 0.0)
        return (100.0, 90.0, 80.0, 70.0, 60.0, 50.0, 40.0, 30.0, 20.0, 10.0)


class Period(str, Enum):
    ANNUAL = "annual"
    WEEKLY = "weekly"


@dataclass(frozen=True)
class VariableKind:
    variable: Variable
    flow: Flow = Flow.UNSPECIFIED

    def __post_init__(self):
        object.__setattr__(self, "variable", Variable(self.variable))
        object.__setattr__(self, "flow", Flow(self.flow))
        if self.flow is Flow.UNSPECIFIED and self.variable is not Variable.INCOME:
            raise InvalidParameter("expenditure requires flow gross or disposable")

    def __str__(self) -> str:
        if self.flow is Flow.UNSPECIFIED:
            return self.variable.value
        return f"{self.flow.value} {self.variable.value}"


@dataclass(frozen=True)
class Basis:
    kind: str = "nominal"
    base_year: str | None = None

    def __post_init__(self):
        if self.kind not in ("nominal", "real"):
            raise InvalidParameter(f"unknown basis {self.kind!r}")
        if (self.kind == "real") != (self.base_year is not None):
            raise InvalidParameter("a real basis needs a base year, a nominal one must not have one")

    @classmethod
    def nominal(cls) -> Basis:
        return cls("nominal")

    @classmethod
    def real(cls, base_year: str) -> Basis:
        return cls("real", str(base_year))

    @property
    def is_real(self) -> bool:
        return self.kind == "real"

    def __str__(self) -> str:
        return f"real({self.base_year})" if self.is_real else "nominal"


@dataclass(frozen=True)
class DecileSeries:
    """One year's ten decile values for a single variable/measure/basis.

    ``values[i]`` belongs to decile ``i + 1``; deciles are ranked by income.
    Only the length is enforced at construction; everything else is
    reported by :func:`validate_series`.
    """

    label: str
    variable_kind: VariableKind
    measure: Measure
    basis: Basis
    period: Period
    unit: str
    values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) != N_DECILES:
            raise SeriesInvalid(f"series {self.label!r} has {len(values)} values, expected {N_DECILES}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "label", str(self.label))
        object.__setattr__(self, "measure", Measure(self.measure))
        object.__setattr__(self, "period", Period(self.period))


@dataclass(frozen=True)
class Violation:
    severity: str  # "error" or "warning"
    message: str


def validate_series(series: DecileSeries) -> list[Violation]:
    """Check a series against the domain invariants. Never raises."""
    report = []
    bad = [i + 1 for i, v in enumerate(series.values) if not math.isfinite(v)]
    if bad:
        report.append(Violation("error", f"non-finite values at deciles {bad}"))
    elif series.variable_kind.variable is Variable.INCOME:
        # expenditure deciles follow income rank and may go down
        if any(b < a for a, b in zip(series.values, series.values[1:])):
            report.append(Violation("error", "income deciles not non-decreasing"))
    expected = Period.ANNUAL if series.variable_kind.variable is Variable.INCOME else Period.WEEKLY
    if series.period is not expected:
        report.append(
            Violation("warning", f"{series.variable_kind.variable.value} data is usually {expected.value}")
        )
    return report


def series_key(series: DecileSeries) -> tuple:
    return (series.label, series.variable_kind, series.measure, series.basis, series.period)


@dataclass(frozen=True)
class FitRecord:
    """One row of a coefficient table; coefficients run highest power first.

    A record whose fit failed keeps its pair label, has no coefficients and
    names the failure in ``error``.
    """

    pair_label: str
    coefficients: tuple[float, ...]
    r_squared_percent: float
    error: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "r_squared_percent", float(self.r_squared_percent))
        if self.error is None:
            if len(self.coefficients) < 2:
                raise InvalidParameter(f"{self.pair_label}: need at least two coefficients")
            if not self.r_squared_percent <= 100.0:
                raise InvalidParameter(f"{self.pair_label}: R² {self.r_squared_percent} exceeds 100")

    @classmethod
    def failed(cls, pair_label: str, error: str) -> FitRecord:
        return cls(pair_label, (), math.nan, error)

    @property
    def degree(self) -> int | None:
        return len(self.coefficients) - 1 if self.coefficients else None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class FitTable:
    """Year-pair keyed fit records, in chronological order.

    The meta fields are ``None`` for tables read from files that do not
    carry them (e.g. the appendix fixtures).
    """

    degree: int
    records: tuple[FitRecord, ...]
    variable_kind: VariableKind | None = None
    measure: Measure | None = None
    basis: Basis | None = None
    title: str = ""
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        records = tuple(self.records)
        object.__setattr__(self, "records", records)
        index = {}
        for rec in records:
            if rec.pair_label in index:
                raise InvalidParameter(f"duplicate pair label {rec.pair_label!r}")
            if rec.ok and rec.degree != self.degree:
                raise InvalidParameter(
                    f"{rec.pair_label}: degree {rec.degree} in a degree-{self.degree} table"
                )
            index[rec.pair_label] = rec
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, label: str) -> FitRecord:
        return self._index[label]

    @property
    def labels(self) -> list[str]:
        return [r.pair_label for r in self.records]
