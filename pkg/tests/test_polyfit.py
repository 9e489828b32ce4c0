import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ols_line
from decile_dynamics import Measure, PolynomialFit, evaluate, fit, r_squared
from decile_dynamics.errors import DegenerateVariance, DegreeTooHigh, InvalidParameter, RankDeficient
from decile_dynamics.polyfit import curve

LADDERS = [Measure.MEAN.ladder, Measure.LOWER_LIMIT.ladder]


def random_plot_set(rng, measure_ladder=None):
    xs = np.sort(rng.uniform(-200, 200, 10))
    ladder = measure_ladder or LADDERS[rng.integers(2)]
    return list(zip(xs.tolist(), ladder))


def sse(points, coefficients):
    return sum((p - np.polyval(coefficients, x)) ** 2 for x, p in points)


class TestFitExamples:
    def test_exact_line(self, linear_points):
        f = fit(linear_points, 1)
        assert f.coefficients == pytest.approx((-0.5, 70), rel=1e-12)
        assert f.r_squared_percent == pytest.approx(100, abs=1e-9)

    def test_three_point_line(self):
        # closed form: slope 3/2, intercept -1/6, R² = 2700/28
        f = fit([(0, 0), (1, 1), (2, 3)], 1)
        assert f.coefficients == pytest.approx((1.5, -1 / 6), rel=1e-12)
        assert f.r_squared_percent == pytest.approx(2700 / 28, abs=1e-10)
        assert ols_line([0, 1, 2], [0, 1, 3])[2] == pytest.approx(2700 / 28)

    def test_degree_nine_interpolates(self):
        pts = random_plot_set(np.random.default_rng(3))
        f = fit(pts, 9)
        assert f.ss_res <= 1e-6
        assert f.r_squared_percent == pytest.approx(100, abs=1e-6)
        assert len(f.coefficients) == 10 and f.n_points == 10

    def test_fields(self, linear_points):
        f = fit(linear_points, 2)
        assert f.degree == 2 and f.ss_res >= 0 and f.ss_tot > 0
        assert f.r_squared_percent == pytest.approx(100 * (1 - f.ss_res / f.ss_tot))


class TestFitErrors:
    def test_too_few_points(self):
        with pytest.raises(DegreeTooHigh):
            fit([(0, 1), (1, 2)], 2)

    def test_rank_deficient(self):
        with pytest.raises(RankDeficient):
            fit([(0, 1), (0, 2), (1, 3), (1, 4)], 2)
        with pytest.raises(RankDeficient):
            fit([(0.0, p) for p in Measure.MEAN.ladder], 1)

    def test_bad_degree(self):
        with pytest.raises(InvalidParameter):
            fit([(0, 1), (1, 2)], 0)

    def test_constant_data_exact_fit_is_100(self):
        assert fit([(0, 5), (1, 5), (2, 5)], 1).r_squared_percent == 100

    def test_degenerate_variance(self):
        with pytest.raises(DegenerateVariance):
            r_squared([(0, 5), (1, 5)], PolynomialFit.from_coefficients((1.0, 0.0)))


class TestEvaluate:
    def test_line(self):
        line = PolynomialFit.from_coefficients((-0.5, 70))
        assert evaluate(line, 0) == 70
        assert evaluate(line, 100) == 20

    def test_monomial(self):
        assert evaluate(PolynomialFit.from_coefficients((1, 0, 0)), 3) == 9

    def test_scaled_basis_matches_raw(self):
        pts = random_plot_set(np.random.default_rng(0))
        f = fit(pts, 3)
        xs = np.linspace(-200, 200, 7)
        assert evaluate(f, xs) == pytest.approx(np.polyval(f.coefficients, xs), rel=1e-9, abs=1e-9)

    def test_curve_samples(self, linear_points):
        c = curve(fit(linear_points, 1), -40, 140)
        assert len(c) == 200 and c[0][0] == -40 and c[-1][0] == 140
        assert c[-1][1] == pytest.approx(0.0, abs=1e-9)


class TestRSquared:
    def test_perfect(self, linear_points):
        assert r_squared(linear_points, PolynomialFit.from_coefficients((-0.5, 70))) == pytest.approx(100)

    def test_mean_constant_is_zero(self):
        pts = [(0, 0), (1, 1), (2, 3)]
        assert r_squared(pts, PolynomialFit.from_coefficients((0, 4 / 3))) == pytest.approx(0, abs=1e-12)

    def test_matches_fit(self):
        pts = [(0, 0), (1, 1), (2, 3)]
        assert r_squared(pts, fit(pts, 1)) == pytest.approx(2700 / 28)

    def test_can_go_negative(self):
        pts = [(0, 0), (1, 1), (2, 3)]
        assert r_squared(pts, PolynomialFit.from_coefficients((-1, 0))) < 0


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 3))
    def test_perturbing_a_coefficient_never_lowers_sse(self, seed, degree):
        pts = random_plot_set(np.random.default_rng(seed))
        coefs = np.array(fit(pts, degree).coefficients)
        best = sse(pts, coefs)
        for i in range(len(coefs)):
            eps = 1e-6 * max(1.0, abs(coefs[i]))
            for sign in (1, -1):
                bumped = coefs.copy()
                bumped[i] += sign * eps
                assert sse(pts, bumped) >= best * (1 - 1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 9))
    def test_normal_equations_hold(self, seed, degree):
        pts = random_plot_set(np.random.default_rng(seed))
        f = fit(pts, degree)
        x, y = np.array(pts).T
        t = (x - f.center) / f.scale
        vander = np.vander(t, degree + 1)
        gradient = vander.T @ (y - vander @ np.array(f.basis_coefficients))
        # relative to the problem scale; degree 9 Vandermonde conditioning reaches ~1e7
        assert np.max(np.abs(gradient)) <= 1e-8 * np.linalg.norm(vander) * np.linalg.norm(y)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_nesting(self, seed):
        pts = random_plot_set(np.random.default_rng(seed))
        r2 = [fit(pts, d).r_squared_percent for d in range(1, 10)]
        assert all(b >= a - 1e-9 for a, b in zip(r2, r2[1:]))

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3), min_size=2, max_size=4),
        st.integers(0, 2**32 - 1),
    )
    def test_exact_recovery(self, coefs, seed):
        degree = len(coefs) - 1
        xs = np.sort(np.random.default_rng(seed).choice(np.arange(-50, 51), 10, replace=False)).astype(float)
        pts = list(zip(xs, np.polyval(coefs, xs)))
        f = fit(pts, degree)
        assert f.coefficients == pytest.approx(coefs, rel=1e-9, abs=1e-9)
        assert f.r_squared_percent == pytest.approx(100, abs=1e-9)

    def test_matches_closed_form(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            pts = random_plot_set(rng)
            slope, intercept, r2 = ols_line(*zip(*pts))
            f = fit(pts, 1)
            assert f.coefficients == pytest.approx((slope, intercept), rel=1e-9)
            assert f.r_squared_percent == pytest.approx(r2, abs=1e-9)
