import time
from contextlib import contextmanager

import pytest

from decile_dynamics import Basis, DecileSeries, Measure, Period, Variable, VariableKind

INCOME = VariableKind(Variable.INCOME)
GROSS_EXP = VariableKind(Variable.EXPENDITURE, "gross")
DISP_EXP = VariableKind(Variable.EXPENDITURE, "disposable")

_criteria = []


def make_series(values, label="2010", kind=INCOME, measure=Measure.MEAN, basis=Basis(), period=None, unit="GBP"):
    if period is None:
        period = Period.ANNUAL if kind.variable is Variable.INCOME else Period.WEEKLY
    return DecileSeries(label, kind, measure, basis, period, unit, tuple(values))


@contextmanager
def criterion(number, text, max_seconds=None):
    """Time an acceptance criterion and record a pass/fail line for the summary."""
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        if max_seconds is not None:
            assert elapsed < max_seconds, f"took {elapsed:.2f}s, limit {max_seconds}s"
    except BaseException as exc:
        _criteria.append((number, "FAIL", text, f"{time.perf_counter() - start:.2f}s", str(exc).splitlines()[0] if str(exc) else type(exc).__name__))
        raise
    _criteria.append((number, "PASS", text, f"{elapsed:.2f}s", ""))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, text, elapsed, why in sorted(_criteria):
        line = f"[{status}] criterion {number}: {text} ({elapsed})"
        terminalreporter.write_line(line + (f" -- {why}" if why else ""))


@pytest.fixture
def linear_points():
    return [(x, -0.5 * x + 70) for x in (-40.0, -10.0, 0.0, 15.0, 30.0, 55.0, 80.0, 100.0, 120.0, 140.0)]
