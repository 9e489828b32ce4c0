"""Synthetic household microdata and its aggregation into decile series.

Incomes come from the exponential (Boltzmann-Gibbs), lognormal (Gibrat)
or Pareto families. The expenditure rule is test scaffolding, not an
economic model: disposable spending is a fixed share of income with
bounded multiplicative noise, gross spending adds a flat tax wedge on top.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyInput, InvalidParameter, NotDivisibleByTen
from .model import N_DECILES, Basis, DecileSeries, Flow, Measure, Period, Variable, VariableKind

RNG_ALGORITHM = "numpy PCG64"


@dataclass(frozen=True)
class HouseholdRecord:
    income: float
    expenditure_gross: float
    expenditure_disposable: float

    def __post_init__(self):
        if not self.income > 0:
            raise InvalidParameter(f"income must be positive, got {self.income}")
        if self.expenditure_gross < 0 or self.expenditure_disposable < 0:
            raise InvalidParameter("expenditure must be non-negative")


@dataclass(frozen=True)
class Exponential:
    temperature: float

    def __post_init__(self):
        if not self.temperature > 0:
            raise InvalidParameter("temperature must be positive")

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.exponential(self.temperature, n)

    @property
    def mean(self) -> float:
        return self.temperature


@dataclass(frozen=True)
class Lognormal:
    mu: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidParameter("sigma must be positive")

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.lognormal(self.mu, self.sigma, n)

    @property
    def mean(self) -> float:
        return float(np.exp(self.mu + self.sigma**2 / 2))


@dataclass(frozen=True)
class Pareto:
    alpha: float
    xmin: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.xmin > 0):
            raise InvalidParameter("alpha and xmin must be positive")

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        # numpy's pareto is the Lomax form, shifted to start at 0
        return self.xmin * (1.0 + rng.pareto(self.alpha, n))

    @property
    def mean(self) -> float:
        return self.alpha * self.xmin / (self.alpha - 1) if self.alpha > 1 else float("inf")


IncomeModel = Exponential | Lognormal | Pareto


@dataclass(frozen=True)
class ExpenditureRule:
    propensity: float = 0.8
    noise: float = 0.1
    tax_wedge: float = 0.2

    def __post_init__(self):
        if not 0 < self.propensity <= 1:
            raise InvalidParameter("propensity must be in (0, 1]")
        if not 0 <= self.noise < 1:
            raise InvalidParameter("noise must be in [0, 1)")
        if self.tax_wedge < 0:
            raise InvalidParameter("tax wedge must be non-negative")

    def apply(self, rng: np.random.Generator, income: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        disposable = self.propensity * income * (1.0 + rng.uniform(-self.noise, self.noise, len(income)))
        return disposable * (1.0 + self.tax_wedge), disposable


def _records(income, gross, disposable) -> list[HouseholdRecord]:
    return [HouseholdRecord(*row) for row in zip(income.tolist(), gross.tolist(), disposable.tolist())]


def sample_households(
    model: IncomeModel,
    n: int,
    rule: ExpenditureRule = ExpenditureRule(),
    seed: int = 0,
) -> list[HouseholdRecord]:
    if n < 1:
        raise InvalidParameter(f"need at least one household, got {n}")
    rng = np.random.default_rng(seed)
    income = np.maximum(model.draw(rng, n), np.finfo(float).tiny)
    gross, disposable = rule.apply(rng, income)
    return _records(income, gross, disposable)


def _selected(record: HouseholdRecord, kind: VariableKind) -> float:
    if kind.variable is Variable.INCOME:
        return record.income
    if kind.flow is Flow.GROSS:
        return record.expenditure_gross
    return record.expenditure_disposable


def deciles_from_microdata(
    records: Sequence[HouseholdRecord],
    variable_kind: VariableKind,
    measure: Measure,
    label: str,
    unit: str = "",
    period: Period = Period.ANNUAL,
    basis: Basis = Basis(),
) -> DecileSeries:
    """Rank households by income, cut into ten equal groups, summarise each.

    Expenditure deciles are the spending of each income decile, so they
    need not be monotone. Equal incomes keep their input order.
    """
    if not records:
        raise EmptyInput("no household records")
    if len(records) % N_DECILES:
        raise NotDivisibleByTen(f"{len(records)} records do not split into {N_DECILES} equal groups")
    income = np.array([r.income for r in records])
    chosen = np.array([_selected(r, variable_kind) for r in records])
    groups = chosen[np.argsort(income, kind="stable")].reshape(N_DECILES, -1)
    values = groups.mean(axis=1) if measure is Measure.MEAN else groups.min(axis=1)
    return DecileSeries(label, variable_kind, measure, basis, period, unit, tuple(values.tolist()))


@dataclass(frozen=True)
class Panel:
    """Households followed over several years."""

    labels: tuple[str, ...]
    years: tuple[tuple[HouseholdRecord, ...], ...]
    seed: int
    rng: str = RNG_ALGORITHM

    def deciles(
        self, variable_kind: VariableKind, measure: Measure, unit: str = "", period: Period | None = None
    ) -> list[DecileSeries]:
        if period is None:
            period = Period.ANNUAL if variable_kind.variable is Variable.INCOME else Period.WEEKLY
        return [
            deciles_from_microdata(recs, variable_kind, measure, label, unit, period)
            for label, recs in zip(self.labels, self.years)
        ]


def sample_panel(
    model: IncomeModel,
    labels: Sequence[str],
    n: int,
    rule: ExpenditureRule = ExpenditureRule(),
    seed: int = 0,
    growth: float = 0.02,
    shock: float = 0.05,
) -> Panel:
    """Draw a base population once, then age it year by year.

    Each year every income grows by ``growth`` times an independent
    multiplicative shock uniform in ``[1 - shock, 1 + shock]``; expenditure
    is redrawn from the rule each year.
    """
    if not labels:
        raise InvalidParameter("need at least one year label")
    if not 0 <= shock < 1:
        raise InvalidParameter("shock must be in [0, 1)")
    rng = np.random.default_rng(seed)
    income = np.maximum(model.draw(rng, n), np.finfo(float).tiny)
    years = []
    for k in range(len(labels)):
        if k:
            income = income * (1.0 + growth) * rng.uniform(1 - shock, 1 + shock, n)
        gross, disposable = rule.apply(rng, income)
        years.append(tuple(_records(income, gross, disposable)))
    return Panel(tuple(str(lab) for lab in labels), tuple(years), seed)


def arithmetic_panel(
    base: Sequence[float],
    step: float,
    labels: Sequence[str],
    variable_kind: VariableKind = VariableKind(Variable.INCOME),
    measure: Measure = Measure.MEAN,
    unit: str = "",
    period: Period = Period.ANNUAL,
) -> list[DecileSeries]:
    """Decile series where decile ``i`` gains ``step * i`` every year.

    Consecutive-year differences are then ``step * (1..10)``, so every
    plot set lies exactly on a line.
    """
    base = list(base)
    if len(base) != N_DECILES:
        raise InvalidParameter(f"need {N_DECILES} base values")
    return [
        DecileSeries(
            label, variable_kind, measure, Basis(), period, unit,
            tuple(b + k * step * (i + 1) for i, b in enumerate(base)),
        )
        for k, label in enumerate(labels)
    ]
