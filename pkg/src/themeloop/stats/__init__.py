"""Statistics: special functions, hypothesis tests, composite scoring."""
from .composite import (
    COMFORT_MAX,
    COMFORT_MIN,
    DEFAULT_WEIGHTS,
    WPM_MAX,
    WPM_MIN,
    CohortBounds,
    CompositeWeights,
    ConsistencyReport,
    MeasurementError,
    ReadingMeasurement,
    composite_score,
    consistency,
    filter_wpm,
    measurement_speed,
    score_trial,
)
from .inference import (
    StatInputError,
    StatResult,
    chi_square,
    cohens_d,
    one_way_anova,
    student_t,
    welch_t,
)
from .report import markdown_table, performance_table, summarize_by_theme
from .special import (
    SpecialFunctionError,
    chi2_sf,
    f_sf,
    log_gamma,
    regularized_incomplete_beta,
    regularized_lower_gamma,
    regularized_upper_gamma,
    student_t_two_sided_p,
)

__all__ = [
    "COMFORT_MAX",
    "COMFORT_MIN",
    "CohortBounds",
    "CompositeWeights",
    "ConsistencyReport",
    "DEFAULT_WEIGHTS",
    "MeasurementError",
    "ReadingMeasurement",
    "SpecialFunctionError",
    "StatInputError",
    "StatResult",
    "WPM_MAX",
    "WPM_MIN",
    "chi2_sf",
    "chi_square",
    "cohens_d",
    "composite_score",
    "consistency",
    "f_sf",
    "filter_wpm",
    "log_gamma",
    "markdown_table",
    "measurement_speed",
    "one_way_anova",
    "performance_table",
    "regularized_incomplete_beta",
    "regularized_lower_gamma",
    "regularized_upper_gamma",
    "score_trial",
    "student_t",
    "student_t_two_sided_p",
    "summarize_by_theme",
    "welch_t",
]
