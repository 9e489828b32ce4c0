import numpy as np
import pytest

from conftest import make_series
from oracles import ols_line
from decile_dynamics import (
    Basis,
    DatasetManifest,
    FitRecord,
    FitTable,
    Measure,
    degree_lag_grid,
    load_appendix,
    pair_fits,
    positive_slopes,
    serialize_fit_table,
    slope_sign_report,
)
from decile_dynamics.batch import serialize_grid
from decile_dynamics.errors import InsufficientSeries, MetaMismatch, NotChronological, WrongDegree
from decile_dynamics.synthgen import Exponential, arithmetic_panel, sample_panel
from decile_dynamics.model import VariableKind

BASE = [100.0 * i for i in range(1, 11)]


def random_panel(n_years, seed=0):
    rng = np.random.default_rng(seed)
    rows = np.sort(rng.uniform(0, 1000, (n_years, 10)), axis=1)
    return [make_series(r, label=str(1977 + i)) for i, r in enumerate(rows)]


class TestPairFits:
    def test_counts(self):
        panel = random_panel(3)
        assert len(pair_fits(panel, 1, 1)) == 2
        table = pair_fits(panel, 2, 1)
        assert table.labels == ["1979/1977"]

    def test_linear_growth_gives_exact_lines(self):
        # deltas are 5, 10, ..., 50 against 90..0: p = 100 - 2x
        panel = arithmetic_panel(BASE, 5.0, ["2000", "2001", "2002", "2003"])
        slope, intercept, r2 = ols_line([5.0 * i for i in range(1, 11)], Measure.MEAN.ladder)
        assert (slope, intercept, r2) == pytest.approx((-2.0, 100.0, 100.0))
        table = pair_fits(panel, 1, 1)
        for rec in table:
            assert rec.coefficients == pytest.approx((slope, intercept), rel=1e-12)
            assert rec.r_squared_percent == pytest.approx(100, abs=1e-9)

    def test_record_count_is_series_minus_lag(self):
        panel = random_panel(12)
        for lag in range(1, 12):
            assert len(pair_fits(panel, lag, 1)) == 12 - lag

    def test_insufficient(self):
        with pytest.raises(InsufficientSeries):
            pair_fits(random_panel(2), 2, 1)

    def test_meta_mismatch(self):
        panel = random_panel(2) + [make_series(BASE, "1990", basis=Basis.real("1980"))]
        with pytest.raises(MetaMismatch):
            pair_fits(panel, 1, 1)

    def test_manifest_order_checked(self):
        panel = random_panel(3)
        with pytest.raises(NotChronological):
            pair_fits(panel, 1, 1, DatasetManifest(("1979", "1978", "1977")))

    def test_failed_fit_recorded(self):
        panel = [make_series(BASE, "1"), make_series(BASE, "2"), make_series([v + 3 * i for i, v in enumerate(BASE)], "3")]
        table = pair_fits(panel, 1, 1)
        assert table["2/1"].error == "RankDeficient"
        assert table["3/2"].ok

    def test_threads_do_not_change_output(self):
        panel = random_panel(30, seed=4)
        serial = serialize_fit_table(pair_fits(panel, 1, 2), "full")
        for workers in (2, 8):
            assert serialize_fit_table(pair_fits(panel, 1, 2, workers=workers), "full") == serial


class TestGrid:
    def test_single_cell_summarises_pair_fits(self):
        panel = random_panel(6)
        r2 = [r.r_squared_percent for r in pair_fits(panel, 1, 1)]
        row = degree_lag_grid(panel, {1}, {1}).cell(1, 1)
        assert (row.pairs, row.min_r2, row.max_r2) == (5, min(r2), max(r2))
        assert row.mean_r2 == pytest.approx(np.mean(r2))

    def test_higher_degree_never_lowers_mean(self):
        grid = degree_lag_grid(random_panel(10, seed=2), {1, 2, 3}, {1, 3})
        for lag in (1, 3):
            means = [grid.cell(lag, d).mean_r2 for d in (1, 2, 3)]
            assert all(b >= a - 1e-9 for a, b in zip(means, means[1:]))
        assert [(r.lag, r.degree) for r in grid.rows] == [(1, 1), (1, 2), (1, 3), (3, 1), (3, 2), (3, 3)]

    def test_long_lag_has_one_pair(self):
        panel = sample_panel(Exponential(20000), [str(1977 + k) for k in range(35)], 200, seed=1).deciles(
            VariableKind("income"), Measure.MEAN
        )
        grid = degree_lag_grid(panel, {1}, {1, 34})
        assert grid.cell(34, 1).pairs == 1 and grid.cell(1, 1).pairs == 34

    def test_absent_cells(self):
        grid = degree_lag_grid(random_panel(3), {1, 9}, {1, 5})
        assert (5, 1) in grid.absent and (5, 9) in grid.absent
        assert grid.cell(1, 9).pairs == 2

    def test_serialization(self):
        text = serialize_grid(degree_lag_grid(random_panel(4), {1}, {1}))
        assert text.splitlines()[0] == "lag,degree,mean_r2,min_r2,max_r2,pairs"
        assert text.splitlines()[1].startswith("1,1,") and text.splitlines()[1].endswith(",3")


class TestSlopeSigns:
    @pytest.mark.parametrize(
        "n, positive",
        [
            (1, ["1978/1977", "2011-2010/2010-2009"]),
            (2, ["2009/2008"]),
            (3, ["2006-2005/2005-2004", "2009/2008"]),
            (4, ["2009/2008", "2012/2011"]),
            (5, ["2009/2008", "2012/2011"]),
        ],
    )
    def test_appendix_positive_rows(self, n, positive):
        assert positive_slopes(load_appendix(n)) == positive

    def test_all_negative(self):
        table = FitTable(1, (FitRecord("2/1", (-1, 50), 90), FitRecord("3/2", (-0.5, 60), 80)))
        assert positive_slopes(table) == []
        assert slope_sign_report(table) == [("2/1", "negative"), ("3/2", "negative")]

    def test_zero_and_failed(self):
        table = FitTable(1, (FitRecord("2/1", (1e-13, 50), 90), FitRecord.failed("3/2", "RankDeficient")))
        assert slope_sign_report(table) == [("2/1", "zero")]

    def test_wrong_degree(self):
        with pytest.raises(WrongDegree):
            slope_sign_report(FitTable(2, (FitRecord("2/1", (1, 2, 3), 90),)))
