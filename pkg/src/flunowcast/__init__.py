"""Search-query influenza nowcasting: lagged correlation screening,
greedy query selection, weekly-updated least-squares nowcasts, and
table/figure emission, with a seeded synthetic-data generator."""

from .regress import (
    CoefficientStats,
    EvaluationResult,
    ModelFit,
    NowcastMode,
    NowcastSeries,
    QueryPanel,
    evaluate,
    fit_ols,
    predict,
    rolling_weekly_fit,
)
from .selection import SelectionResult, greedy_select, prefix_sweep
from .stats import (
    CorrelationResult,
    NAReason,
    SignificanceConfig,
    correlate,
    pearson,
    rank_queries,
    student_t_two_sided_p,
)
from .timeseries import (
    ShiftSpec,
    WeekStamp,
    WeeklySeries,
    align,
    scale_0_100,
    shift_pair,
    slice_year,
)

__all__ = [
    "CoefficientStats",
    "CorrelationResult",
    "EvaluationResult",
    "ModelFit",
    "NAReason",
    "NowcastMode",
    "NowcastSeries",
    "QueryPanel",
    "SelectionResult",
    "ShiftSpec",
    "SignificanceConfig",
    "WeekStamp",
    "WeeklySeries",
    "align",
    "correlate",
    "evaluate",
    "fit_ols",
    "greedy_select",
    "pearson",
    "predict",
    "prefix_sweep",
    "rank_queries",
    "rolling_weekly_fit",
    "scale_0_100",
    "shift_pair",
    "slice_year",
    "student_t_two_sided_p",
]

__version__ = "0.1.0"
