"""Row-by-row comparison of a produced coefficient table against a reference one."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Mapping

from .errors import LabelSetMismatch
from .model import FitTable

DEFAULT_TOLERANCES = {"p1": 0.0, "p2": 0.0, "r2": 0.0}


@dataclass(frozen=True)
class RowComparison:
    pair_label: str
    deltas: dict  # column name -> produced - reference
    passed: bool


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[RowComparison, ...]
    tolerances: dict

    @property
    def n_passed(self) -> int:
        return sum(r.passed for r in self.rows)

    @property
    def n_failed(self) -> int:
        return len(self.rows) - self.n_passed

    @property
    def all_passed(self) -> bool:
        return self.n_failed == 0

    def to_csv(self) -> str:
        columns = list(self.tolerances)
        buf = io.StringIO()
        buf.write(",".join(["pair"] + [f"d_{c}" for c in columns] + ["passed"]) + "\n")
        for r in self.rows:
            buf.write(",".join([r.pair_label] + [repr(r.deltas[c]) for c in columns] + [str(r.passed).lower()]) + "\n")
        return buf.getvalue()


def _columns(table: FitTable, label: str) -> dict[str, float]:
    rec = table[label]
    if not rec.ok:
        return {}
    values = {f"p{i}": c for i, c in enumerate(rec.coefficients, start=1)}
    values["r2"] = rec.r_squared_percent
    return values


def compare_tables(
    produced: FitTable,
    reference: FitTable,
    tolerances: Mapping[str, float] | None = None,
) -> ComparisonReport:
    """Absolute per-column differences; a row passes when every one is within tolerance.

    Rows follow the reference order. A failed fit on either side fails the row.
    """
    tolerances = dict(DEFAULT_TOLERANCES if tolerances is None else tolerances)
    mine, theirs = set(produced.labels), set(reference.labels)
    if mine != theirs:
        raise LabelSetMismatch(mine - theirs, theirs - mine)
    rows = []
    for label in reference.labels:
        got, want = _columns(produced, label), _columns(reference, label)
        deltas, passed = {}, bool(got) and bool(want)
        for col, tol in tolerances.items():
            if col in got and col in want:
                deltas[col] = got[col] - want[col]
                passed = passed and abs(deltas[col]) <= tol
            else:
                deltas[col] = math.nan
                passed = False
        rows.append(RowComparison(label, deltas, passed))
    return ComparisonReport(tuple(rows), tolerances)
