"""Inter-year decile differences and their cumulative plot sets.

For two years of the same decile measure, each decile's change is taken,
the ten changes are sorted ascending and paired with a fixed ladder of
cumulative population percentages: 90..0 for group means, 100..10 for
lower limits. The x values are the sorted changes themselves, on a linear
scale; only the percentages are cumulative.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import InvalidParameter, MetaMismatch, NotChronological
from .ingest import DatasetManifest, format_number
from .model import N_DECILES, Basis, DecileSeries, Measure, Period, VariableKind

_META_FIELDS = ("variable_kind", "measure", "basis", "period", "unit")


def pair_label(later: str, earlier: str) -> str:
    return f"{later}/{earlier}"


@dataclass(frozen=True)
class DifferenceSet:
    earlier_label: str
    later_label: str
    deltas: tuple[float, ...]
    variable_kind: VariableKind
    measure: Measure
    basis: Basis
    period: Period
    unit: str = ""

    def __post_init__(self):
        deltas = tuple(float(d) for d in self.deltas)
        if len(deltas) != N_DECILES or not all(math.isfinite(d) for d in deltas):
            raise InvalidParameter(f"need {N_DECILES} finite deltas, got {deltas}")
        object.__setattr__(self, "deltas", deltas)

    @property
    def pair_label(self) -> str:
        return pair_label(self.later_label, self.earlier_label)


@dataclass(frozen=True)
class CumulativePlotSet:
    points: tuple[tuple[float, float], ...]
    measure: Measure
    pair_label: str

    @property
    def xs(self) -> tuple[float, ...]:
        return tuple(x for x, _ in self.points)

    @property
    def ps(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.points)


def check_same_meta(a: DecileSeries, b: DecileSeries) -> None:
    for name in _META_FIELDS:
        left, right = getattr(a, name), getattr(b, name)
        if left != right:
            raise MetaMismatch(name, left, right)


def diff_series(
    earlier: DecileSeries,
    later: DecileSeries,
    manifest: DatasetManifest | None = None,
) -> DifferenceSet:
    """Per-decile change ``later - earlier``.

    The years need not be consecutive. With a manifest, ``later`` must come
    strictly after ``earlier`` in its chronology.
    """
    check_same_meta(earlier, later)
    if manifest is not None:
        pos_e, pos_l = manifest.position(earlier.label), manifest.position(later.label)
        if pos_e is None or pos_l is None:
            raise NotChronological(f"{earlier.label} or {later.label} missing from the chronology")
        if pos_l <= pos_e:
            raise NotChronological(f"{later.label} does not come after {earlier.label}")
    deltas = tuple(b - a for a, b in zip(earlier.values, later.values))
    return DifferenceSet(
        earlier.label, later.label, deltas,
        earlier.variable_kind, earlier.measure, earlier.basis, earlier.period, earlier.unit,
    )


def build_plot_set(diffs: DifferenceSet) -> CumulativePlotSet:
    # sorted() is stable: tied deltas keep decile order
    xs = sorted(diffs.deltas)
    return CumulativePlotSet(tuple(zip(xs, diffs.measure.ladder)), diffs.measure, diffs.pair_label)


def serialize_points(points: Sequence[tuple[float, float]], header: Sequence[str] = ("x", "p")) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for x, p in points:
        buf.write(f"{format_number(x)},{format_number(p)}\n")
    return buf.getvalue()
