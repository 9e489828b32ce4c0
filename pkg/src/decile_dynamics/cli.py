"""Command-line interface.

Every command reads plain-text inputs, never modifies them, and writes its
output atomically (temporary file, then rename) or to stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .batch import degree_lag_grid, fit_pair, pair_fits, serialize_grid
from .compare import compare_tables
from .dyndist import serialize_points
from .errors import DecileError, FitError, InvalidParameter
from .ingest import (
    DatasetManifest,
    format_fit_values,
    load_appendix,
    parse_decile_table,
    parse_deflator,
    parse_fit_table,
    parse_manifest,
    serialize_decile_table,
    serialize_fit_table,
    serialize_manifest,
    to_real,
)
from .model import Basis, FitRecord, FitTable, Flow, Measure, Period, Variable, VariableKind, validate_series
from .polyfit import curve
from .synthgen import ExpenditureRule, Exponential, Lognormal, Pareto, sample_panel

log = logging.getLogger("decile_dynamics")

EXIT_CODES = {
    0: "success",
    2: "parse error (malformed file, bad flags)",
    3: "validation error (invalid data, mismatched series, failed comparison)",
    4: "fit error (too few points, rank deficient, degenerate variance)",
    5: "I/O error",
}

CURVE_SAMPLES = 200


class _SourceError(Exception):
    """A module error tagged with the file it came from."""

    def __init__(self, source: str, error: DecileError):
        self.source = source
        self.error = error
        super().__init__(f"{source}: {error}")


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _parse(path: str, parser, *args, **kwargs):
    try:
        return parser(_read(path), *args, **kwargs)
    except DecileError as exc:
        raise _SourceError(path, exc) from None


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _as_json(header: list[str], rows: list[list]) -> str:
    return json.dumps([dict(zip(header, row)) for row in rows], indent=2) + "\n"


def _variable_kind(args) -> VariableKind:
    flow = args.flow or ("unspecified" if args.variable == "income" else None)
    if flow is None:
        raise InvalidParameter("--flow gross|disposable is required for expenditure")
    return VariableKind(Variable(args.variable), Flow(flow))


def _measure(args) -> Measure:
    return Measure(args.measure.replace("-", "_"))


def _period(args, kind: VariableKind) -> Period:
    if args.period:
        return Period(args.period)
    return Period.ANNUAL if kind.variable is Variable.INCOME else Period.WEEKLY


def load_panel(args, validate: bool = True):
    """Series from ``--input`` in chronological order, plus the manifest used."""
    kind = _variable_kind(args)
    if args.deflator and not args.base_year:
        raise InvalidParameter("--deflator needs --base-year")
    if args.basis == "real" and not args.deflator:
        if not args.base_year:
            raise InvalidParameter("--basis real needs --base-year")
        basis = Basis.real(args.base_year)
    else:
        basis = Basis.nominal()
    series = _parse(
        args.input, parse_decile_table,
        variable_kind=kind, measure=_measure(args), basis=basis,
        period=_period(args, kind), unit=args.unit, validate=validate,
    )
    if args.deflator:
        deflator = _parse(args.deflator, parse_deflator)
        try:
            series = [to_real(s, deflator, args.base_year) for s in series]
        except DecileError as exc:
            raise _SourceError(args.deflator, exc) from None
    if args.manifest:
        manifest = _parse(args.manifest, parse_manifest)
        try:
            series = manifest.order(series)
        except DecileError as exc:
            raise _SourceError(args.manifest, exc) from None
    else:
        manifest = DatasetManifest(tuple(s.label for s in series))
    return series, manifest


def _fit_table_output(table: FitTable, args) -> str:
    if args.format == "csv":
        return serialize_fit_table(table, args.precision)
    with_error = any(not r.ok for r in table)
    header = ["pair"] + [f"p{i}" for i in range(1, table.degree + 2)] + ["r2"] + (["error"] if with_error else [])
    rows = []
    for rec in table:
        if rec.ok:
            row = [rec.pair_label] + [float(v) for v in format_fit_values(rec, args.precision)]
            rows.append(row + [None] if with_error else row)
        else:
            rows.append([rec.pair_label] + [None] * (table.degree + 2) + [rec.error])
    return _as_json(header, rows)


def _points_output(points, fmt: str) -> str:
    if fmt == "csv":
        return serialize_points(points)
    return _as_json(["x", "p"], [[x, p] for x, p in points])


def _select_pair(series, years: str | None):
    by_label = {s.label: s for s in series}
    if years is None:
        if len(series) < 2:
            raise InvalidParameter("need at least two years for a pair")
        return series[0], series[-1]
    parts = years.split(",")
    if len(parts) != 2:
        raise InvalidParameter(f"--years takes EARLIER,LATER, got {years!r}")
    missing = [p for p in parts if p not in by_label]
    if missing:
        raise InvalidParameter(f"years {missing} not in {years!r} input")
    return by_label[parts[0]], by_label[parts[1]]


def cmd_validate(args) -> int:
    series, _ = load_panel(args, validate=False)
    errors = 0
    for s in series:
        for v in validate_series(s):
            print(f"{args.input}: {s.label}: {v.severity}: {v.message}")
            errors += v.severity == "error"
    print(f"{args.input}: {len(series)} series, {errors} error(s)")
    return 3 if errors else 0


def cmd_fit_pair(args) -> int:
    series, manifest = load_panel(args)
    earlier, later = _select_pair(series, args.years)
    try:
        _, result = fit_pair(earlier, later, args.degree, manifest)
    except FitError as exc:
        raise type(exc)(f"{later.label}/{earlier.label}: {exc}") from None
    record = FitRecord(f"{later.label}/{earlier.label}", result.coefficients, result.r_squared_percent)
    first = series[0]
    table = FitTable(args.degree, (record,), first.variable_kind, first.measure, first.basis)
    _write(args.output, _fit_table_output(table, args))
    return 0


def cmd_batch(args) -> int:
    series, manifest = load_panel(args)
    table = pair_fits(series, args.lag, args.degree, manifest, args.workers)
    for rec in table:
        if not rec.ok:
            log.warning("%s: fit failed (%s)", rec.pair_label, rec.error)
    _write(args.output, _fit_table_output(table, args))
    return 0


def cmd_grid(args) -> int:
    series, manifest = load_panel(args)
    grid = degree_lag_grid(series, args.degrees, args.lags, manifest, args.workers)
    for lag, degree in grid.absent:
        log.warning("no successful fits for lag %d, degree %d", lag, degree)
    if args.format == "csv":
        text = serialize_grid(grid)
    else:
        header = ["lag", "degree", "mean_r2", "min_r2", "max_r2", "pairs"]
        text = _as_json(header, [[r.lag, r.degree, r.mean_r2, r.min_r2, r.max_r2, r.pairs] for r in grid.rows])
    _write(args.output, text)
    return 0


def cmd_plot_data(args) -> int:
    if not args.output:
        raise InvalidParameter("plot-data needs --output PREFIX")
    series, manifest = load_panel(args)
    earlier, later = _select_pair(series, args.years)
    plot_set, result = fit_pair(earlier, later, args.degree, manifest)
    xs = plot_set.xs
    ext = args.format
    _write(f"{args.output}.points.{ext}", _points_output(plot_set.points, ext))
    _write(f"{args.output}.curve.{ext}", _points_output(curve(result, min(xs), max(xs), CURVE_SAMPLES), ext))
    return 0


def _income_model(args):
    if args.model == "exponential":
        return Exponential(args.temperature)
    if args.model == "lognormal":
        return Lognormal(args.mu, args.sigma)
    return Pareto(args.alpha, args.xmin)


def cmd_synth(args) -> int:
    labels = [str(args.start_year + k) for k in range(args.years)]
    rule = ExpenditureRule(args.propensity, args.noise, args.tax_wedge)
    panel = sample_panel(_income_model(args), labels, args.households, rule, args.seed, args.growth, args.shock)
    kind = _variable_kind(args)
    series = panel.deciles(kind, _measure(args), args.unit, _period(args, kind))
    if args.format == "csv":
        text = serialize_decile_table(series)
    else:
        header = ["label"] + [f"d{i}" for i in range(1, 11)]
        text = _as_json(header, [[s.label, *s.values] for s in series])
    _write(args.output, text)
    if args.manifest:
        notes = f"synthetic {args.model} panel, seed {args.seed}, rng {panel.rng}"
        _write(args.manifest, serialize_manifest(DatasetManifest(tuple(labels), args.unit, notes)))
    return 0


def _fit_table_source(spec: str) -> FitTable:
    if spec.startswith("appendix:"):
        return load_appendix(int(spec.split(":", 1)[1]))
    return _parse(spec, parse_fit_table)


def cmd_compare(args) -> int:
    produced = _fit_table_source(args.input)
    reference = _fit_table_source(args.reference)
    tolerances = {"p1": args.tol_p1, "p2": args.tol_p2, "r2": args.tol_r2}
    report = compare_tables(produced, reference, tolerances)
    _write(args.output, report.to_csv())
    print(f"{report.n_passed} passed, {report.n_failed} failed", file=sys.stderr)
    return 0 if report.all_passed else 3


def _add_data_flags(p: argparse.ArgumentParser, *, needs_input: bool = True) -> None:
    if needs_input:
        p.add_argument("--input", required=True, help="decile table (label,d1..d10)")
        p.add_argument("--manifest", help="JSON manifest with the chronology of labels")
        p.add_argument("--basis", choices=["nominal", "real"], default="nominal",
                       help="basis of the input values (real without --deflator means already deflated)")
        p.add_argument("--deflator", help="price index file (year,index); converts nominal input to real")
        p.add_argument("--base-year", help="base year of a real basis")
    p.add_argument("--variable", choices=["income", "expenditure"], default="income")
    p.add_argument("--flow", choices=["gross", "disposable"], help="required for expenditure")
    p.add_argument("--measure", choices=["mean", "lower-limit"], default="mean")
    p.add_argument("--period", choices=["annual", "weekly"],
                   help="default: annual for income, weekly for expenditure")
    p.add_argument("--unit", default="", help="currency unit label, carried but never converted")


def _add_output_flags(p: argparse.ArgumentParser, *, precision: bool = False) -> None:
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", help="output path (default stdout)")
    if precision:
        p.add_argument("--precision", choices=["appendix", "full"], default="appendix",
                       help="appendix: 4 significant digits, R² to 2 decimals; full: exact")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="decile-dynamics",
        description="Fit polynomials to cumulative distributions of inter-year decile changes.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a decile table against the domain rules")
    _add_data_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("fit-pair", help="fit one year pair")
    _add_data_flags(p)
    p.add_argument("--years", help="EARLIER,LATER labels (default: first and last)")
    p.add_argument("--degree", type=int, default=1)
    _add_output_flags(p, precision=True)
    p.set_defaults(func=cmd_fit_pair)

    p = sub.add_parser("batch", help="fit every pair at a given lag")
    _add_data_flags(p)
    p.add_argument("--lag", type=int, default=1, help="positions between the paired years")
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--workers", type=int, help="fit pairs on this many threads")
    _add_output_flags(p, precision=True)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("grid", help="R² summary over degrees and lags")
    _add_data_flags(p)
    p.add_argument("--degrees", type=_csv_list, default=[1], help="comma-separated degrees")
    p.add_argument("--lags", type=_csv_list, default=[1], help="comma-separated lags")
    p.add_argument("--workers", type=int, help="fit pairs on this many threads")
    _add_output_flags(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("plot-data", help="points and fitted curve for one pair")
    _add_data_flags(p)
    p.add_argument("--years", help="EARLIER,LATER labels (default: first and last)")
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", required=True, help="prefix; writes PREFIX.points.EXT and PREFIX.curve.EXT")
    p.set_defaults(func=cmd_plot_data)

    p = sub.add_parser("synth", help="synthetic decile panel from sampled households")
    _add_data_flags(p, needs_input=False)
    p.add_argument("--model", choices=["exponential", "lognormal", "pareto"], default="exponential")
    p.add_argument("--temperature", type=float, default=20000.0)
    p.add_argument("--mu", type=float, default=10.0)
    p.add_argument("--sigma", type=float, default=0.6)
    p.add_argument("--alpha", type=float, default=2.5)
    p.add_argument("--xmin", type=float, default=10000.0)
    p.add_argument("--households", type=int, default=1000)
    p.add_argument("--years", type=int, default=10, help="number of years")
    p.add_argument("--start-year", type=int, default=2000)
    p.add_argument("--growth", type=float, default=0.02)
    p.add_argument("--shock", type=float, default=0.05)
    p.add_argument("--propensity", type=float, default=0.8)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--tax-wedge", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--manifest", help="also write the chronology manifest here")
    _add_output_flags(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compare", help="compare a fit table against a reference (file or appendix:N)")
    p.add_argument("--input", required=True, help="produced fit table, or appendix:N")
    p.add_argument("--reference", required=True, help="reference fit table, or appendix:N")
    p.add_argument("--tol-p1", type=float, default=0.0)
    p.add_argument("--tol-p2", type=float, default=0.0)
    p.add_argument("--tol-r2", type=float, default=0.0)
    p.add_argument("--output", help="comparison report path (default stdout)")
    p.set_defaults(func=cmd_compare)

    usages = "\n".join(
        "  " + sp.format_usage().replace("usage: ", "").strip() for sp in sub.choices.values()
    )
    codes = "\n".join(f"  {code}  {text}" for code, text in EXIT_CODES.items())
    parser.epilog = f"commands and flags:\n{usages}\n\nexit codes:\n{codes}"
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except _SourceError as exc:
        print(f"error: {exc.source}: {type(exc.error).__name__}: {exc.error}", file=sys.stderr)
        return exc.error.exit_code
    except FitError as exc:
        print(f"error: fit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except DecileError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc.filename or ''}: {exc.strerror or exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
