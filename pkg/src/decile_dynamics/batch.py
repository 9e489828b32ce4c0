"""Fits over every year pair of a panel, the degree/lag grid, slope signs."""

from __future__ import annotations

import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from .dyndist import build_plot_set, check_same_meta, diff_series
from .errors import FitError, InsufficientSeries, InvalidParameter, NotChronological, WrongDegree
from .ingest import DatasetManifest
from .model import DecileSeries, FitRecord, FitTable
from .polyfit import fit

log = logging.getLogger(__name__)

ZERO_SLOPE = 1e-12


def fit_pair(earlier: DecileSeries, later: DecileSeries, degree: int, manifest: DatasetManifest | None = None):
    """Difference two years, build the plot set and fit it. Returns ``(plot_set, fit)``."""
    plot_set = build_plot_set(diff_series(earlier, later, manifest))
    return plot_set, fit(plot_set, degree)


def _fit_record(earlier: DecileSeries, later: DecileSeries, degree: int) -> FitRecord:
    plot_set = build_plot_set(diff_series(earlier, later))
    try:
        result = fit(plot_set, degree)
    except FitError as exc:
        log.info("%s: %s", plot_set.pair_label, exc)
        return FitRecord.failed(plot_set.pair_label, type(exc).__name__)
    return FitRecord(plot_set.pair_label, result.coefficients, result.r_squared_percent)


def _check_panel(series: Sequence[DecileSeries], manifest: DatasetManifest | None) -> None:
    for other in series[1:]:
        check_same_meta(series[0], other)
    if manifest is not None:
        positions = [manifest.position(s.label) for s in series]
        if None in positions:
            raise NotChronological("panel has labels missing from the chronology")
        if any(b <= a for a, b in zip(positions, positions[1:])):
            raise NotChronological("panel is not in chronological order")


def pair_fits(
    series: Sequence[DecileSeries],
    lag: int,
    degree: int,
    manifest: DatasetManifest | None = None,
    workers: int | None = None,
) -> FitTable:
    """Fit every pair ``(series[i], series[i + lag])``.

    ``series`` must already be in chronological order; lag counts positions,
    not calendar years. Pairs whose fit fails stay in the table as failed
    records. With ``workers`` the pairs are fitted on a thread pool; output
    order is chronological either way.
    """
    series = list(series)
    if lag < 1:
        raise InvalidParameter(f"lag must be >= 1, got {lag}")
    if len(series) < lag + 1:
        raise InsufficientSeries(f"lag {lag} needs at least {lag + 1} series, got {len(series)}")
    _check_panel(series, manifest)
    pairs = [(series[i], series[i + lag]) for i in range(len(series) - lag)]
    if workers and workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            records = list(pool.map(lambda ab: _fit_record(*ab, degree), pairs))
    else:
        records = [_fit_record(a, b, degree) for a, b in pairs]
    first = series[0]
    return FitTable(degree, tuple(records), first.variable_kind, first.measure, first.basis)


@dataclass(frozen=True)
class GridRow:
    lag: int
    degree: int
    mean_r2: float
    min_r2: float
    max_r2: float
    pairs: int


@dataclass(frozen=True)
class GridResult:
    rows: tuple[GridRow, ...]
    absent: tuple[tuple[int, int], ...] = ()

    def cell(self, lag: int, degree: int) -> GridRow:
        for row in self.rows:
            if (row.lag, row.degree) == (lag, degree):
                return row
        raise KeyError((lag, degree))


def degree_lag_grid(
    series: Sequence[DecileSeries],
    degrees: Iterable[int],
    lags: Iterable[int],
    manifest: DatasetManifest | None = None,
    workers: int | None = None,
) -> GridResult:
    """Summarise R² across all pairs for each (lag, degree) cell.

    Cells without a successful fit (lag too long for the panel, or every
    pair failing) are listed in ``absent`` instead of raising.
    """
    degrees, lags = sorted(set(degrees)), sorted(set(lags))
    if not degrees or not lags:
        raise InvalidParameter("need at least one degree and one lag")
    if degrees[0] < 1 or lags[0] < 1:
        raise InvalidParameter("degrees and lags must be >= 1")
    series = list(series)
    rows, absent = [], []
    for lag in lags:
        for degree in degrees:
            if len(series) < lag + 1:
                absent.append((lag, degree))
                continue
            r2 = [r.r_squared_percent for r in pair_fits(series, lag, degree, manifest, workers) if r.ok]
            if not r2:
                absent.append((lag, degree))
                continue
            rows.append(GridRow(lag, degree, sum(r2) / len(r2), min(r2), max(r2), len(r2)))
    return GridResult(tuple(rows), tuple(absent))


def serialize_grid(grid: GridResult) -> str:
    buf = io.StringIO()
    buf.write("lag,degree,mean_r2,min_r2,max_r2,pairs\n")
    for r in grid.rows:
        buf.write(f"{r.lag},{r.degree},{r.mean_r2:.6f},{r.min_r2:.6f},{r.max_r2:.6f},{r.pairs}\n")
    return buf.getvalue()


def slope_sign_report(table: FitTable) -> list[tuple[str, str]]:
    """Sign of P1 per successful record: ``positive``, ``negative`` or ``zero``."""
    if table.degree != 1:
        raise WrongDegree(f"slope signs need a degree-1 table, got degree {table.degree}")
    report = []
    for rec in table:
        if not rec.ok:
            continue
        slope = rec.coefficients[0]
        if abs(slope) < ZERO_SLOPE:
            sign = "zero"
        else:
            sign = "positive" if slope > 0 else "negative"
        report.append((rec.pair_label, sign))
    return report


def positive_slopes(table: FitTable) -> list[str]:
    return [label for label, sign in slope_sign_report(table) if sign == "positive"]
