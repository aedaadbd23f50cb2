"""Tests for special functions, hypothesis tests, and composite scoring.

Reference values were computed once with an independent numerical library
and frozen here as constants.
"""
from __future__ import annotations

import math

import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from themeloop.stats import (
    CohortBounds,
    CompositeWeights,
    DEFAULT_WEIGHTS,
    MeasurementError,
    ReadingMeasurement,
    SpecialFunctionError,
    StatInputError,
    chi2_sf,
    chi_square,
    cohens_d,
    composite_score,
    consistency,
    f_sf,
    filter_wpm,
    log_gamma,
    measurement_speed,
    one_way_anova,
    performance_table,
    regularized_incomplete_beta,
    regularized_lower_gamma,
    regularized_upper_gamma,
    score_trial,
    student_t,
    student_t_two_sided_p,
    summarize_by_theme,
    welch_t,
)

A1 = [1.0, 2.0, 3.0, 4.0, 5.0]
B1 = [2.0, 3.0, 4.0, 5.0, 6.0]
A2 = [12.1, 14.3, 11.8, 13.5, 15.2, 12.9, 14.8]
B2 = [10.2, 11.5, 9.8, 10.9]
AP = [3.1, 4.2, 5.0, 3.8, 4.4, 5.1]
BP = [2.8, 4.5, 4.1, 3.0, 4.9, 4.2]


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------


def test_incomplete_beta_frozen_values():
    assert abs(regularized_incomplete_beta(2.5, 3.5, 0.3) - 0.29675298929566646) < 1e-10
    assert abs(regularized_incomplete_beta(0.5, 0.5, 0.7) - 0.6309898804344546) < 1e-10
    assert abs(regularized_incomplete_beta(10.0, 2.0, 0.9) - 0.6973568802000002) < 1e-10
    assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
    assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0


def test_incomplete_gamma_frozen_values():
    assert abs(regularized_lower_gamma(3.0, 2.5) - 0.45618688411667035) < 1e-10
    assert abs(regularized_upper_gamma(0.5, 1.2) - 0.12133525035848208) < 1e-10
    assert abs(regularized_upper_gamma(8.0, 10.0) - 0.22022064660169907) < 1e-10
    assert abs(log_gamma(7.3) - 7.147892523022249) < 1e-10


def test_special_function_domains():
    with pytest.raises(SpecialFunctionError):
        regularized_incomplete_beta(-1.0, 2.0, 0.5)
    with pytest.raises(SpecialFunctionError):
        regularized_incomplete_beta(1.0, 2.0, 1.5)
    with pytest.raises(SpecialFunctionError):
        regularized_lower_gamma(0.0, 1.0)
    with pytest.raises(SpecialFunctionError):
        log_gamma(-2.0)


def test_beta_cdf_monotone_on_dense_grid():
    for a, b in ((0.5, 0.5), (2.5, 3.5), (10.0, 2.0), (1.0, 7.0)):
        prev = -1.0
        for i in range(1001):
            x = i / 1000.0
            v = regularized_incomplete_beta(a, b, x)
            assert v >= prev - 1e-13, (a, b, x)
            assert -1e-12 <= v <= 1.0 + 1e-12
            prev = v


def test_gamma_cdf_monotone_on_dense_grid():
    for a in (0.5, 1.0, 3.0, 8.0):
        prev = -1.0
        for i in range(1001):
            x = 20.0 * i / 1000.0
            v = regularized_lower_gamma(a, x)
            assert v >= prev - 1e-13, (a, x)
            prev = v


def test_tail_helpers_match_identities():
    # P + Q = 1
    for a, x in ((0.5, 1.2), (3.0, 2.5), (8.0, 10.0)):
        total = regularized_lower_gamma(a, x) + regularized_upper_gamma(a, x)
        assert abs(total - 1.0) < 1e-12
    # symmetric t: p at t=0 is 1
    assert abs(student_t_two_sided_p(0.0, 7.0) - 1.0) < 1e-12
    assert f_sf(0.0, 2.0, 10.0) == 1.0
    assert chi2_sf(0.0, 3.0) == 1.0


# ---------------------------------------------------------------------------
# hypothesis tests against frozen oracle values (tolerance 1e-8)
# ---------------------------------------------------------------------------


def test_welch_t_oracle_values():
    r1 = welch_t(A1, B1)
    assert abs(r1.statistic - (-1.0)) < 1e-8
    assert abs(r1.df - 8.0) < 1e-8
    assert abs(r1.p_value - 0.34659350708733416) < 1e-8

    r2 = welch_t(A2, B2)
    assert abs(r2.statistic - 4.666795421146587) < 1e-8
    assert abs(r2.df - 8.96382656253463) < 1e-8
    assert abs(r2.p_value - 0.0011866368266282177) < 1e-8


def test_student_t_oracle_values():
    r = student_t(A2, B2)
    assert abs(r.statistic - 4.005264765284029) < 1e-8
    assert r.df == 9.0
    assert abs(r.p_value - 0.0030858266367417525) < 1e-8

    rp = student_t(AP, BP, paired=True)
    assert abs(rp.statistic - 1.3710563068012334) < 1e-8
    assert rp.df == 5.0
    assert abs(rp.p_value - 0.22869444725582075) < 1e-8


def test_cohens_d_oracle_values():
    assert abs(cohens_d(A2, B2) - 2.5104325483888443) < 1e-8
    assert abs(cohens_d(AP, BP, paired=True) - 0.5597313933813013) < 1e-8


def test_anova_oracle_values():
    g1 = [85.0, 86.0, 88.0, 75.0, 78.0, 94.0, 98.0]
    g2 = [91.0, 92.0, 93.0, 85.0, 87.0, 84.0, 82.0]
    g3 = [79.0, 78.0, 88.0, 94.0, 92.0, 85.0, 83.0]
    r = one_way_anova(g1, g2, g3)
    assert abs(r.statistic - 0.2042007001166862) < 1e-8
    assert r.df == (2.0, 18.0)
    assert abs(r.p_value - 0.8171614396136415) < 1e-8
    assert abs(r.effect_size - 0.022185598377281828) < 1e-8


def test_chi_square_oracle_values():
    r = chi_square([[10, 20], [20, 10]])
    assert abs(r.statistic - 6.666666666666667) < 1e-8
    assert r.df == 1.0
    assert abs(r.p_value - 0.009823274507519235) < 1e-8
    assert abs(r.effect_size - 0.33333333333333337) < 1e-8

    r2 = chi_square([[12, 7, 9, 4], [5, 9, 14, 8], [7, 4, 6, 15]])
    assert abs(r2.statistic - 15.289562491130978) < 1e-8
    assert r2.df == 6.0
    assert abs(r2.p_value - 0.018120263656139345) < 1e-8
    assert abs(r2.effect_size - 0.2764919753910679) < 1e-8


def test_stat_error_conditions():
    with pytest.raises(StatInputError):
        welch_t([1.0, 1.0], [2.0, 2.0])  # both zero variance
    with pytest.raises(StatInputError):
        welch_t([1.0], [1.0, 2.0])  # too small
    with pytest.raises(StatInputError):
        student_t([1.0, 2.0], [1.0, 2.0, 3.0], paired=True)  # length mismatch
    with pytest.raises(StatInputError):
        one_way_anova([1.0, 2.0])  # single group
    with pytest.raises(StatInputError):
        chi_square([[0, 0], [1, 2]])  # empty marginal
    with pytest.raises(StatInputError):
        chi_square([[1, 2]])  # not 2x2


@hyp_settings(max_examples=50)
@given(
    a=st.lists(st.floats(-50, 50), min_size=3, max_size=12),
    b=st.lists(st.floats(-50, 50), min_size=3, max_size=12),
)
def test_welch_symmetry_property(a, b):
    try:
        r_ab = welch_t(a, b)
        r_ba = welch_t(b, a)
    except StatInputError:
        return
    assert abs(r_ab.statistic + r_ba.statistic) < 1e-9
    assert abs(r_ab.p_value - r_ba.p_value) < 1e-12


# ---------------------------------------------------------------------------
# composite scoring
# ---------------------------------------------------------------------------


def test_weights_sum_exactly_to_one():
    w = DEFAULT_WEIGHTS
    assert (w.comprehension_pct, w.comfort_pct, w.speed_pct) == (42, 39, 19)
    assert w.comprehension + w.comfort + w.speed == 1.0  # exact float identity


def test_weights_reject_bad_percents():
    with pytest.raises(ValueError):
        CompositeWeights(42, 39, 20)
    with pytest.raises(ValueError):
        CompositeWeights(-1, 50, 51)


def test_composite_worked_example_exact():
    # comprehension 0.75, comfort 3 -> 0.5, speed exactly mid-bounds -> 0.5
    m = ReadingMeasurement("p", "t", comfort=3, comprehension=0.75, screen_wpm=(200.0,))
    bounds = CohortBounds(wpm_min=100.0, wpm_max=300.0)
    score = composite_score(m, bounds)
    assert abs(score - 0.605) < 1e-12


def test_composite_bounds_behavior():
    fast = ReadingMeasurement("p", "t", 5, 1.0, (300.0,))
    slow = ReadingMeasurement("p", "t", 1, 0.0, (100.0,))
    bounds = CohortBounds(100.0, 300.0)
    assert composite_score(fast, bounds) == 1.0
    assert composite_score(slow, bounds) == 0.0
    # degenerate bounds pin the speed term at 0.5
    degenerate = CohortBounds(200.0, 200.0)
    mid = ReadingMeasurement("p", "t", 3, 0.5, (200.0,))
    expected = 0.42 * 0.5 + 0.39 * 0.5 + 0.19 * 0.5
    assert abs(composite_score(mid, degenerate) - expected) < 1e-12
    # speeds outside the bounds clamp
    flying = ReadingMeasurement("p", "t", 3, 0.5, (600.0,))
    assert composite_score(flying, bounds) <= 1.0


def test_filter_wpm_boundaries_inclusive():
    assert filter_wpm([49.999, 50.0, 300.0, 650.0, 650.001]) == [50.0, 300.0, 650.0]
    assert filter_wpm([]) == []


@hyp_settings(max_examples=80)
@given(st.lists(st.floats(0.1, 2000.0), max_size=12))
def test_filter_wpm_idempotent_property(values):
    once = filter_wpm(values)
    assert filter_wpm(once) == once
    assert all(50.0 <= v <= 650.0 for v in once)


def test_measurement_speed_uses_only_plausible_screens():
    m = ReadingMeasurement("p", "t", 3, 0.5, (40.0, 200.0, 300.0, 700.0))
    assert measurement_speed(m) == 250.0
    hopeless = ReadingMeasurement("p", "t", 3, 0.5, (10.0, 700.0))
    with pytest.raises(MeasurementError):
        measurement_speed(hopeless)


def test_cohort_bounds_from_measurements():
    ms = [
        ReadingMeasurement("p1", "t", 3, 0.5, (100.0, 200.0)),
        ReadingMeasurement("p2", "t", 3, 0.5, (400.0,)),
    ]
    bounds = CohortBounds.from_measurements(ms)
    assert bounds.wpm_min == 150.0 and bounds.wpm_max == 400.0


def test_score_trial_hand_arithmetic():
    # 50 words in 12s -> 250 wpm; 48 words in 20s -> 144 wpm
    timings = [(1000.0, 13000.0), (13500.0, 33500.0)]
    wpm, comprehension = score_trial(
        timings, [50, 48], ["a", "c", "b", "b"], ["a", "b", "b", "d"]
    )
    assert abs(wpm[0] - 250.0) < 1e-12
    assert abs(wpm[1] - 144.0) < 1e-12
    assert comprehension == 0.5


def test_score_trial_rejects_bad_timings():
    with pytest.raises(MeasurementError):
        score_trial([(1000.0, 900.0)], [50], ["a"], ["a"])  # press before show
    with pytest.raises(MeasurementError):
        score_trial(
            [(1000.0, 5000.0), (4000.0, 9000.0)], [50, 50], ["a"], ["a"]
        )  # next screen shown before previous press
    with pytest.raises(MeasurementError):
        score_trial([(0.0, 1000.0)], [50], ["a", "b"], ["a"])  # answer mismatch


def test_measurement_validation():
    with pytest.raises(MeasurementError):
        ReadingMeasurement("p", "t", 0, 0.5, (100.0,))
    with pytest.raises(MeasurementError):
        ReadingMeasurement("p", "t", 3, 1.5, (100.0,))
    with pytest.raises(MeasurementError):
        ReadingMeasurement("p", "t", 3, 0.5, ())
    with pytest.raises(MeasurementError):
        ReadingMeasurement("p", "t", 3, 0.5, (-5.0,))


def test_consistency_directions():
    def m(pid, theme, comfort, comp, wpm):
        return ReadingMeasurement(pid, theme, comfort, comp, (wpm,))

    study_a = [
        m("p1", "control", 3, 0.5, 200.0),
        m("p1", "open", 4, 0.75, 250.0),
        m("p2", "control", 3, 0.5, 200.0),
        m("p2", "open", 2, 0.25, 150.0),
    ]
    study_b = [
        m("p1", "control", 3, 0.5, 210.0),
        m("p1", "open", 5, 0.25, 260.0),  # comfort same dir, comprehension flips
        m("p2", "control", 3, 0.5, 190.0),
        m("p2", "open", 1, 0.25, 140.0),
    ]
    report = consistency(study_a, study_b, control_theme_id="control")
    assert report.n_pairs == 2
    assert report.speed_agreement == 1.0
    assert report.comfort_agreement == 1.0
    assert report.comprehension_agreement == 0.5


def test_summaries_and_markdown_table():
    ms = [
        ReadingMeasurement("p1", "open", 4, 0.75, (250.0,)),
        ReadingMeasurement("p1", "control", 3, 0.5, (200.0,)),
        ReadingMeasurement("p2", "open", 5, 1.0, (300.0,)),
        ReadingMeasurement("p2", "control", 2, 0.25, (180.0,)),
    ]
    summary = summarize_by_theme(ms)
    assert set(summary) == {"open", "control"}
    assert summary["open"]["n"] == 2
    table = performance_table(ms)
    assert table.startswith("| theme |")
    assert "| open |" in table and "| control |" in table
