"""Reading and writing the comma-separated file formats.

Decile table::

    label,d1,d2,d3,d4,d5,d6,d7,d8,d9,d10
    2010,100,110,120,130,140,150,160,170,180,190

Deflator::

    year,index
    2009,100

Fit table (``p1 .. p{degree+1}`` are the coefficients, highest power first;
an optional trailing ``error`` column marks pairs whose fit failed)::

    pair,p1,p2,r2
    1979/1978,-0.0138,77.85,94.29

Manifest (JSON)::

    {"chronology": ["1977", "1978"], "unit": "GBP", "notes": ""}
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import (
    AlreadyReal,
    BadHeader,
    DuplicateSeries,
    DuplicateYear,
    EmptyInput,
    InvalidParameter,
    MissingDeflatorYear,
    NonNumericField,
    NonPositiveIndex,
    ParseError,
    SeriesInvalid,
    WrongColumnCount,
)
from .model import (
    N_DECILES,
    Basis,
    DecileSeries,
    FitRecord,
    FitTable,
    Measure,
    Period,
    VariableKind,
    series_key,
    validate_series,
)

log = logging.getLogger(__name__)

DECILE_HEADER = ["label"] + [f"d{i}" for i in range(1, N_DECILES + 1)]
DEFLATOR_HEADER = ["year", "index"]

# plain decimal or scientific notation; no thousands separators, no nan/inf
_NUMBER = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")

APPENDIX_TITLES = {
    1: "mean income difference",
    2: "mean disposable expenditure difference",
    3: "mean gross expenditure difference",
    4: "lower limit on disposable expenditure difference",
    5: "lower limit on gross expenditure difference",
}


@dataclass(frozen=True)
class Deflator:
    index: Mapping[str, float]
    description: str = ""

    def __post_init__(self):
        for year, value in self.index.items():
            if not value > 0:
                raise NonPositiveIndex(f"index for {year} is {value}, must be positive")
        object.__setattr__(self, "index", MappingProxyType(dict(self.index)))


@dataclass(frozen=True)
class DatasetManifest:
    chronology: tuple[str, ...]
    unit: str = ""
    notes: str = ""
    _position: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        chronology = tuple(str(c) for c in self.chronology)
        if len(set(chronology)) != len(chronology):
            dupes = sorted({c for c in chronology if chronology.count(c) > 1})
            raise DuplicateYear(f"chronology repeats {dupes}")
        object.__setattr__(self, "chronology", chronology)
        object.__setattr__(self, "_position", {c: i for i, c in enumerate(chronology)})

    def position(self, label: str) -> int | None:
        return self._position.get(label)

    def order(self, series: Iterable[DecileSeries]) -> list[DecileSeries]:
        """Sort series by chronology; labels absent from the manifest are an error."""
        series = list(series)
        missing = [s.label for s in series if s.label not in self._position]
        if missing:
            raise InvalidParameter(f"labels not in manifest chronology: {missing}")
        return sorted(series, key=lambda s: self._position[s.label])


def parse_number(token: str, row: int, col: int) -> float:
    token = token.strip()
    if not _NUMBER.fullmatch(token):
        raise NonNumericField(f"not a number: {token!r}", row=row, col=col)
    return float(token)


def format_number(value: float) -> str:
    """Shortest text that parses back to exactly ``value``."""
    if math.isfinite(value) and value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def _rows(text: str, header: list[str] | None, what: str):
    """Split into the normalised header and (line number, fields) data rows; blank lines dropped."""
    reader = csv.reader(io.StringIO(text))
    rows = [(n, r) for n, r in enumerate(reader, start=1) if r and any(f.strip() for f in r)]
    if not rows:
        raise EmptyInput(f"empty {what}")
    line, head = rows[0]
    head = [h.strip().lower() for h in head]
    if header is not None and head != header:
        raise BadHeader(f"{what} header must be {','.join(header)}, got {','.join(head)}", row=line)
    return head, rows[1:]


def parse_decile_table(
    text: str,
    *,
    variable_kind: VariableKind,
    measure: Measure,
    basis: Basis,
    period: Period,
    unit: str,
    validate: bool = True,
) -> list[DecileSeries]:
    """Parse a decile table into series, one per row, in row order.

    Each series is checked with :func:`validate_series`; the first error
    raises :class:`SeriesInvalid` and warnings are logged. ``validate=False``
    skips the check so a caller can collect every violation itself.
    """
    _, rows = _rows(text, DECILE_HEADER, "decile table")
    if not rows:
        raise EmptyInput("decile table has a header but no rows")
    out = []
    seen = set()
    for line, fields in rows:
        if len(fields) != N_DECILES + 1:
            raise WrongColumnCount(f"expected {N_DECILES + 1} fields, got {len(fields)}", row=line)
        values = [parse_number(tok, line, col) for col, tok in enumerate(fields[1:], start=2)]
        series = DecileSeries(fields[0].strip(), variable_kind, measure, basis, period, unit, tuple(values))
        key = series_key(series)
        if key in seen:
            raise DuplicateSeries(f"row {line}: series {series.label!r} appears twice")
        seen.add(key)
        for v in validate_series(series) if validate else ():
            if v.severity == "error":
                raise SeriesInvalid(f"row {line}: {series.label}: {v.message}")
            log.warning("row %d: %s: %s", line, series.label, v.message)
        out.append(series)
    return out


def serialize_decile_table(series: Iterable[DecileSeries]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(DECILE_HEADER)
    for s in series:
        writer.writerow([s.label] + [format_number(v) for v in s.values])
    return buf.getvalue()


def parse_deflator(text: str, description: str = "") -> Deflator:
    _, rows = _rows(text, DEFLATOR_HEADER, "deflator")
    index = {}
    for line, fields in rows:
        if len(fields) != 2:
            raise WrongColumnCount(f"expected 2 fields, got {len(fields)}", row=line)
        year = fields[0].strip()
        value = parse_number(fields[1], line, 2)
        if not value > 0:
            raise NonPositiveIndex(f"row {line}: index for {year} is {fields[1].strip()}, must be positive")
        if year in index:
            raise DuplicateYear(f"row {line}: year {year} listed twice")
        index[year] = value
    return Deflator(index, description)


def to_real(series: DecileSeries, deflator: Deflator, base_year: str) -> DecileSeries:
    """Express a nominal series in ``base_year`` prices: v * index[base] / index[year]."""
    if series.basis.is_real:
        raise AlreadyReal(f"series {series.label} is already real ({series.basis})")
    base_year = str(base_year)
    for year in (series.label, base_year):
        if year not in deflator.index:
            raise MissingDeflatorYear(f"deflator has no index for {year}")
    base, own = deflator.index[base_year], deflator.index[series.label]
    return replace(series, values=tuple(v * base / own for v in series.values), basis=Basis.real(base_year))


def fit_table_header(degree: int, with_error: bool = False) -> list[str]:
    head = ["pair"] + [f"p{i}" for i in range(1, degree + 2)] + ["r2"]
    return head + ["error"] if with_error else head


def parse_fit_table(text: str, title: str = "") -> FitTable:
    head, rows = _rows(text, None, "fit table")
    with_error = head[-1] == "error"
    n_coef = len(head) - 2 - with_error
    if n_coef < 2 or head != fit_table_header(n_coef - 1, with_error):
        raise BadHeader(f"fit table header must look like pair,p1,p2,r2; got {','.join(head)}")
    records = []
    for line, fields in rows:
        if len(fields) != len(head):
            raise WrongColumnCount(f"expected {len(head)} fields, got {len(fields)}", row=line)
        label = fields[0].strip()
        error = fields[-1].strip() if with_error else ""
        if error:
            records.append(FitRecord.failed(label, error))
            continue
        numbers = [parse_number(tok, line, col) for col, tok in enumerate(fields[1 : 2 + n_coef], start=2)]
        records.append(FitRecord(label, tuple(numbers[:-1]), numbers[-1]))
    return FitTable(n_coef - 1, tuple(records), title=title)


def _sig(value: float, digits: int) -> str:
    text = f"{value:.{digits}g}"
    return "0" if float(text) == 0 else text


def _decimals(value: float, places: int) -> str:
    text = f"{value:.{places}f}"
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if float(text) == 0 else text


def format_fit_values(record: FitRecord, precision: str = "appendix") -> list[str]:
    """Coefficients and R² as text.

    ``appendix`` precision gives coefficients four significant digits and R²
    at most two decimals, the layout of the published tables; ``full`` gives
    round-trip exact values.
    """
    if precision == "full":
        return [repr(c) for c in record.coefficients] + [repr(record.r_squared_percent)]
    if precision != "appendix":
        raise InvalidParameter(f"unknown precision {precision!r}")
    return [_sig(c, 4) for c in record.coefficients] + [_decimals(record.r_squared_percent, 2)]


def serialize_fit_table(table: FitTable, precision: str = "appendix") -> str:
    with_error = any(not r.ok for r in table.records)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fit_table_header(table.degree, with_error))
    blanks = [""] * (table.degree + 2)
    for rec in table.records:
        if rec.ok:
            row = [rec.pair_label] + format_fit_values(rec, precision)
            writer.writerow(row + [""] if with_error else row)
        else:
            writer.writerow([rec.pair_label] + blanks + [rec.error])
    return buf.getvalue()


def parse_manifest(text: str) -> DatasetManifest:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"manifest is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("chronology"), list):
        raise BadHeader("manifest needs a 'chronology' list")
    return DatasetManifest(tuple(doc["chronology"]), doc.get("unit", ""), doc.get("notes", ""))


def serialize_manifest(manifest: DatasetManifest) -> str:
    doc = {"chronology": list(manifest.chronology), "unit": manifest.unit, "notes": manifest.notes}
    return json.dumps(doc, indent=2) + "\n"


def appendix_text(number: int) -> str:
    if number not in APPENDIX_TITLES:
        raise InvalidParameter(f"no appendix {number}; choose 1-5")
    return resources.files("decile_dynamics.data").joinpath(f"appendix{number}.csv").read_text("utf-8")


def load_appendix(number: int) -> FitTable:
    """Published degree-1 coefficient table ``number`` (1-5), exactly as printed."""
    return parse_fit_table(appendix_text(number), title=APPENDIX_TITLES[number])
