from __future__ import annotations

import math

import numpy as np
import pytest

from tgclust.errors import DataError
from tgclust.stats import (
    chi_square_upper_tail,
    correlation_critical_point,
    correlation_matrix,
    default_ljung_box_lag,
    delta_threshold,
    ljung_box,
    pearson,
    sample_acf,
    significance_thresholds,
    t_upper_quantile,
    t_upper_tail,
)

from conftest import make_panel

# Published critical points for the zero-correlation test, indexed by (alpha, n)
CRITICAL_POINTS = {
    0.05: {5: 0.8783, 10: 0.6319, 20: 0.4438, 40: 0.3120, 60: 0.2542, 240: 0.1267},
    0.01: {5: 0.9587, 10: 0.7646, 20: 0.5614, 40: 0.4026, 60: 0.3301, 240: 0.1660},
}

# Frozen with statsmodels.stats.diagnostic.acorr_ljungbox before the build:
# x = default_rng(20240601).standard_normal(256), lags=[6]
LB_FIXTURE_SEED = 20240601
LB_FIXTURE_STAT = 2.591896234745
LB_FIXTURE_P = 0.858044574371


class TestPearson:
    def test_exact_linear_dependence(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == 1.0

    def test_exact_negative_dependence(self):
        assert pearson([1, 2, 3], [3, 2, 1]) == -1.0

    def test_hand_evaluated_value(self):
        # centered cross sum 6.5, variance product 5 * 8.75 = 43.75
        assert pearson([1, 2, 3, 4], [1, 2, 3, 5]) == pytest.approx(
            6.5 / math.sqrt(43.75), abs=1e-12
        )

    def test_constant_vector_rejected(self):
        with pytest.raises(DataError, match="degenerate"):
            pearson([1, 1, 1], [1, 2, 3])

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            pearson([1, 2], [1, 2])

    def test_symmetry_bounds_affine_invariance(self, rng):
        for _ in range(50):
            n = int(rng.integers(3, 40))
            x = rng.normal(size=n)
            y = rng.normal(size=n)
            r = pearson(x, y)
            assert -1.0 <= r <= 1.0
            assert pearson(y, x) == pytest.approx(r, abs=1e-12)
            a, b = float(rng.uniform(0.1, 5.0)), float(rng.normal())
            assert pearson(a * x + b, y) == pytest.approx(r, abs=1e-12)


class TestSampleAcf:
    def test_lag_zero_is_one(self, rng):
        assert sample_acf(rng.normal(size=30), 0) == 1.0

    def test_alternating_series_lag_one(self):
        # mean 0, autocovariance(1) = -3/4, autocovariance(0) = 1
        assert sample_acf([1, -1, 1, -1], 1) == pytest.approx(-0.75, abs=1e-12)

    def test_alternating_series_lag_two(self):
        assert sample_acf([1, -1, 1, -1], 2) == pytest.approx(0.5, abs=1e-12)

    def test_constant_rejected(self):
        with pytest.raises(DataError):
            sample_acf([2, 2, 2, 2], 1)

    def test_lag_at_least_n_rejected(self):
        with pytest.raises(ValueError):
            sample_acf([1, 2, 3], 3)


class TestLjungBox:
    def test_zero_autocorrelation_gives_unit_p(self):
        # products across lag 1 always hit a zero: acf(1) = 0 exactly
        x = [1, 0, -1, 0, 1, 0, -1, 0]
        res = ljung_box(x, 1)
        assert res.statistic == 0.0
        assert res.p_value == 1.0

    def test_hand_computed_statistic(self):
        # n=4, acf = (-0.75, 0.5): Q = 4*6*(0.5625/3 + 0.25/2) = 7.5
        res = ljung_box([1, -1, 1, -1], 2)
        assert res.statistic == pytest.approx(7.5, abs=1e-12)

    def test_frozen_reference_fixture(self):
        x = np.random.default_rng(LB_FIXTURE_SEED).standard_normal(256)
        res = ljung_box(x, 6)
        assert res.statistic == pytest.approx(LB_FIXTURE_STAT, abs=1e-6)
        assert res.p_value == pytest.approx(LB_FIXTURE_P, abs=1e-6)

    def test_ar1_dependence_detected(self):
        rng = np.random.default_rng(77)
        e = rng.standard_normal(256)
        x = np.empty(256)
        x[0] = e[0]
        for i in range(1, 256):
            x[i] = 0.9 * x[i - 1] + e[i]
        assert ljung_box(x, 6).p_value < 0.01

    def test_matches_reference_implementation(self, rng):
        acorr_ljungbox = pytest.importorskip(
            "statsmodels.stats.diagnostic"
        ).acorr_ljungbox
        for _ in range(5):
            x = rng.normal(size=128)
            ref = acorr_ljungbox(x, lags=[4])
            res = ljung_box(x, 4)
            assert res.statistic == pytest.approx(float(ref["lb_stat"].iloc[0]), rel=1e-10)
            assert res.p_value == pytest.approx(float(ref["lb_pvalue"].iloc[0]), abs=1e-10)

    def test_affine_invariance(self, rng):
        x = rng.normal(size=100)
        base = ljung_box(x, 5).statistic
        assert ljung_box(3.5 * x - 2.0, 5).statistic == pytest.approx(base, rel=1e-9)

    def test_default_lag_rule(self):
        assert default_ljung_box_lag(256) == 6  # ln(256) ~ 5.55
        assert default_ljung_box_lag(40) == 4   # ln(40) ~ 3.69
        assert default_ljung_box_lag(2) == 1


class TestChiSquareUpperTail:
    def test_zero_statistic_full_mass(self):
        for df in (1, 2, 5, 20):
            assert chi_square_upper_tail(0.0, df) == 1.0

    def test_two_df_closed_form(self):
        # chi^2_2 is exponential with rate 1/2: tail at 2 ln 2 is exactly 1/2
        assert chi_square_upper_tail(2 * math.log(2), 2) == pytest.approx(0.5, abs=1e-12)

    def test_one_df_table_value(self):
        assert chi_square_upper_tail(3.8415, 1) == pytest.approx(0.05, abs=1e-4)

    def test_against_reference(self):
        special = pytest.importorskip("scipy.special")
        for df in (1, 2, 3, 6, 10, 50):
            for q in (0.01, 0.5, 1.0, 3.0, 10.0, 40.0, 120.0):
                assert chi_square_upper_tail(q, df) == pytest.approx(
                    float(special.chdtrc(df, q)), abs=1e-9
                )

    def test_monotone_decreasing_in_q(self):
        qs = np.linspace(0, 30, 200)
        for df in (1, 4, 9):
            vals = [chi_square_upper_tail(float(q), df) for q in qs]
            assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))

    def test_negative_q_rejected(self):
        with pytest.raises(ValueError):
            chi_square_upper_tail(-1.0, 2)


class TestTUpperQuantile:
    def test_table_values(self):
        assert t_upper_quantile(0.025, 3) == pytest.approx(3.1824, abs=1e-3)
        assert t_upper_quantile(0.025, 38) == pytest.approx(2.0244, abs=1e-3)

    def test_near_median_limit(self):
        assert abs(t_upper_quantile(0.4999, 10)) < 1e-3

    def test_inverts_forward_tail(self):
        for alpha_half in (0.4, 0.1, 0.025, 0.005, 1e-4):
            for df in (1, 3, 10, 58, 238):
                t = t_upper_quantile(alpha_half, df)
                assert t_upper_tail(t, df) == pytest.approx(alpha_half, abs=1e-9)

    def test_against_reference(self):
        stats = pytest.importorskip("scipy.stats")
        for alpha_half in (0.25, 0.05, 0.025, 0.005):
            for df in (1, 2, 8, 38, 238):
                assert t_upper_quantile(alpha_half, df) == pytest.approx(
                    float(stats.t.ppf(1 - alpha_half, df)), abs=1e-6
                )

    def test_domain_checks(self):
        with pytest.raises(ValueError):
            t_upper_quantile(0.5, 10)
        with pytest.raises(ValueError):
            t_upper_quantile(0.025, 0)


class TestCriticalPoints:
    def test_published_table_reproduced(self):
        for alpha, row in CRITICAL_POINTS.items():
            for n, expected in row.items():
                assert correlation_critical_point(n, alpha) == pytest.approx(
                    expected, abs=5e-4
                ), (alpha, n)

    def test_spot_values(self):
        assert correlation_critical_point(40, 0.05) == pytest.approx(0.3120, abs=5e-4)
        assert correlation_critical_point(5, 0.01) == pytest.approx(0.9587, abs=5e-4)
        assert correlation_critical_point(240, 0.05) == pytest.approx(0.1267, abs=5e-4)

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            correlation_critical_point(4, 0.05)


class TestDeltaThreshold:
    def test_forty_day_midpoint(self):
        assert delta_threshold(40, 0.05, "positive") == pytest.approx(0.656, abs=5e-4)

    def test_long_window_midpoint(self):
        assert delta_threshold(240, 0.05, "positive") == pytest.approx(0.56335, abs=5e-4)

    def test_negative_mirror(self):
        assert delta_threshold(40, 0.05, "negative") == pytest.approx(-0.656, abs=5e-4)

    def test_threshold_bundle_rejects_delta_below_critical_point(self):
        with pytest.raises(DataError):
            significance_thresholds(40, 0.05, "positive", delta_override=0.2)

    def test_threshold_bundle_negates_override_for_negative_sign(self):
        th = significance_thresholds(40, 0.05, "negative", delta_override=0.65)
        assert th.delta == -0.65


class TestCorrelationMatrix:
    def test_proportional_columns(self):
        panel = make_panel({"A": [0.1, 0.2, -0.1, 0.3], "B": [0.2, 0.4, -0.2, 0.6]})
        corr = correlation_matrix(panel)
        assert corr.values[0, 1] == 1.0
        assert corr.n == 4

    def test_constant_column_excluded_with_warning(self):
        panel = make_panel(
            {"A": [0.1, 0.2, -0.1], "B": [0.2, 0.1, 0.0], "C": [0.5, 0.5, 0.5]}
        )
        with pytest.warns(UserWarning, match="C"):
            corr = correlation_matrix(panel)
        assert corr.tickers == ("A", "B")
        assert corr.values.shape == (2, 2)

    def test_too_few_usable_columns(self):
        panel = make_panel({"A": [0.1, 0.2, 0.3], "B": [1.0, 1.0, 1.0]})
        with pytest.warns(UserWarning):
            with pytest.raises(DataError, match="usable"):
                correlation_matrix(panel)

    def test_matches_scalar_pearson(self, rng):
        cols = {t: rng.normal(size=25).tolist() for t in ("A", "B", "C", "D")}
        panel = make_panel(cols)
        corr = correlation_matrix(panel)
        for i, a in enumerate(corr.tickers):
            assert corr.values[i, i] == 1.0
            for j, b in enumerate(corr.tickers):
                if i < j:
                    expected = pearson(panel.columns[a], panel.columns[b])
                    assert corr.values[i, j] == pytest.approx(expected, abs=1e-12)
                    assert corr.values[i, j] == corr.values[j, i]
