"""Dynamic analysis of income and expenditure deciles.

Differences between two years of decile values are sorted and paired with
cumulative population percentages, then fitted with least-squares
polynomials; the slope, intercept and R² form the coefficient tables.
"""

__version__ = "0.1.0"

from .batch import GridResult, GridRow, degree_lag_grid, pair_fits, positive_slopes, slope_sign_report
from .compare import ComparisonReport, compare_tables
from .dyndist import CumulativePlotSet, DifferenceSet, build_plot_set, diff_series
from .ingest import (
    DatasetManifest,
    Deflator,
    load_appendix,
    parse_decile_table,
    parse_deflator,
    parse_fit_table,
    parse_manifest,
    serialize_decile_table,
    serialize_fit_table,
    to_real,
)
from .model import (
    Basis,
    DecileSeries,
    FitRecord,
    FitTable,
    Flow,
    Measure,
    Period,
    Variable,
    VariableKind,
    series_key,
    validate_series,
)
from .polyfit import PolynomialFit, evaluate, fit, r_squared
from .synthgen import (
    ExpenditureRule,
    Exponential,
    HouseholdRecord,
    Lognormal,
    Pareto,
    deciles_from_microdata,
    sample_households,
    sample_panel,
)
