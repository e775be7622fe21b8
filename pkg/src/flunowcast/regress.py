"""Multi-query linear nowcast model: OLS fit, inference, rolling refits.

The model is y_t = b0 + b1*x_1t + ... + bn*x_nt, fit by least squares.
The solver is QR-based (Householder); normal equations exist only as a
test oracle elsewhere. Rolling mode refits the coefficients once per
week on all strictly-prior weeks, so estimates never see the future.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import stats
from .errors import (
    EmptyOverlap,
    MissingQuery,
    SingularDesign,
    TooFewPairs,
    Underdetermined,
    ZeroVariance,
)
from .stats import CorrelationResult, SignificanceConfig
from .timeseries import ShiftSpec, WeekStamp, WeeklySeries, align

PIVOT_TOL = 1e-10


@dataclass(frozen=True)
class QueryPanel:
    """Named collection of weekly search-volume series on one week range."""

    labels: tuple[str, ...]
    series: tuple[WeeklySeries, ...]

    def __post_init__(self):
        if len(self.labels) < 1:
            raise ValueError("panel needs at least one query")
        if len(self.labels) != len(set(self.labels)):
            raise ValueError("panel labels must be distinct")
        if len(self.labels) != len(self.series):
            raise ValueError("labels and series length mismatch")
        first = self.series[0]
        for s in self.series[1:]:
            if s.start != first.start or len(s) != len(first):
                raise ValueError("panel series must share start and length")

    @classmethod
    def build(cls, series: list[WeeklySeries]) -> "QueryPanel":
        return cls(tuple(s.label for s in series), tuple(series))

    @property
    def start(self) -> WeekStamp:
        return self.series[0].start

    @property
    def n_weeks(self) -> int:
        return len(self.series[0])

    def __len__(self) -> int:
        return len(self.labels)

    def items(self):
        return list(zip(self.labels, self.series))

    def get(self, label: str) -> WeeklySeries:
        try:
            return self.series[self.labels.index(label)]
        except ValueError:
            raise MissingQuery(f"query {label!r} not in panel") from None

    def subset(self, labels: list[str]) -> "QueryPanel":
        return QueryPanel(tuple(labels), tuple(self.get(l) for l in labels))


class NowcastMode(enum.Enum):
    FULL_PERIOD = "full"
    ROLLING_WEEKLY = "rolling"


@dataclass(frozen=True)
class CoefficientStats:
    estimate: float
    std_error: float
    ci_low: float
    ci_high: float
    p_value: float


@dataclass(frozen=True)
class ModelFit:
    intercept: CoefficientStats
    coefficients: tuple[tuple[str, CoefficientStats], ...]
    r_squared: float
    residual_dof: int
    shift: ShiftSpec
    fitted: WeeklySeries  # in-sample estimates, stamped at case weeks

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(l for l, _ in self.coefficients)

    @property
    def betas(self) -> np.ndarray:
        return np.array([self.intercept.estimate] + [c.estimate for _, c in self.coefficients])


@dataclass(frozen=True)
class NowcastSeries:
    """Weekly model estimates stamped at case weeks.

    NaN marks a week with no estimate (rolling warmup); such weeks are
    excluded from evaluation.
    """

    start: WeekStamp
    values: tuple[float, ...]
    mode: NowcastMode
    clamp_nonnegative: bool = False

    def __len__(self) -> int:
        return len(self.values)

    def weeks(self):
        return [self.start.add(i) for i in range(len(self.values))]

    def valid_items(self) -> list[tuple[WeekStamp, float]]:
        return [
            (self.start.add(i), v)
            for i, v in enumerate(self.values)
            if not math.isnan(v)
        ]


def _design_rows(panel: QueryPanel, y: WeeklySeries, s: ShiftSpec):
    """Joint rows (x vector at week t, y at week t+k, stamp of that y week)."""
    probe, ya = align(panel.series[0], y)
    x_off = panel.start.weeks_until(probe.start)
    n = len(probe)
    k = s.weeks
    X, yv, stamps = [], [], []
    for t in range(n):
        u = t + k
        if 0 <= u < n:
            X.append([sr.values[x_off + t] for sr in panel.series])
            yv.append(ya.values[u])
            stamps.append(ya.start.add(u))
    return np.array(X, dtype=float), np.array(yv, dtype=float), stamps


def _row_estimates(X: np.ndarray, beta: np.ndarray) -> np.ndarray:
    # per-row dot keeps fit_ols and predict bit-identical on shared weeks
    return np.array([beta[0] + float(np.dot(row, beta[1:])) for row in X])


def _qr_solve(X: np.ndarray, yv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Least squares via Householder QR; raises SingularDesign on rank loss.

    Returns (beta, unscaled covariance (X'X)^-1).
    """
    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    if diag.size == 0 or np.min(diag) <= PIVOT_TOL * max(np.max(diag), 1.0):
        raise SingularDesign("design matrix columns are collinear")
    beta = np.linalg.solve(r, q.T @ yv)
    r_inv = np.linalg.solve(r, np.eye(r.shape[0]))
    return beta, r_inv @ r_inv.T


def _coef_stats(est: float, se: float, dof: int, alpha: float) -> CoefficientStats:
    if se == 0.0:
        return CoefficientStats(est, 0.0, est, est, 0.0)
    tcrit = stats.t_critical(alpha, dof)
    p = stats.student_t_two_sided_p(est / se, dof)
    return CoefficientStats(est, se, est - tcrit * se, est + tcrit * se, p)


def fit_ols(
    panel: QueryPanel,
    y: WeeklySeries,
    s: ShiftSpec,
    alpha: float = 0.05,
) -> ModelFit:
    """Fit the nowcast model on the full overlapping period."""
    X, yv, stamps = _design_rows(panel, y, s)
    m, nq = X.shape
    if m < nq + 2:
        raise Underdetermined(f"{m} fitted weeks for {nq} queries (need >= {nq + 2})")
    Xd = np.hstack([np.ones((m, 1)), X])
    beta, cov_unscaled = _qr_solve(Xd, yv)
    fitted = _row_estimates(X, beta)
    resid = yv - fitted
    rss = float(resid @ resid)
    dof = m - (nq + 1)
    sigma2 = rss / dof
    ses = np.sqrt(np.maximum(sigma2 * np.diag(cov_unscaled), 0.0))
    tss = float(np.sum((yv - yv.mean()) ** 2))
    r2 = 1.0 if tss == 0.0 else min(max(1.0 - rss / tss, 0.0), 1.0)
    coef = tuple(
        (label, _coef_stats(float(beta[j + 1]), float(ses[j + 1]), dof, alpha))
        for j, label in enumerate(panel.labels)
    )
    return ModelFit(
        intercept=_coef_stats(float(beta[0]), float(ses[0]), dof, alpha),
        coefficients=coef,
        r_squared=r2,
        residual_dof=dof,
        shift=s,
        fitted=WeeklySeries(stamps[0], tuple(float(v) for v in fitted), "fitted"),
    )


def predict(
    fit: ModelFit,
    panel: QueryPanel,
    clamp_nonnegative: bool = False,
    mode: NowcastMode = NowcastMode.FULL_PERIOD,
) -> NowcastSeries:
    """Evaluate the fitted model on every week of the panel.

    Estimates are stamped at case weeks (search week + shift). Negative
    estimates are kept unless clamping is requested.
    """
    sub = panel.subset(list(fit.labels))
    X = np.array([sr.values for sr in sub.series], dtype=float).T
    est = _row_estimates(X, fit.betas)
    if clamp_nonnegative:
        est = np.maximum(est, 0.0)
    return NowcastSeries(
        start=sub.start.add(fit.shift.weeks),
        values=tuple(float(v) for v in est),
        mode=mode,
        clamp_nonnegative=clamp_nonnegative,
    )


def rolling_weekly_fit(
    panel: QueryPanel,
    y: WeeklySeries,
    s: ShiftSpec,
    warmup: int | None = None,
    alpha: float = 0.05,
    clamp_nonnegative: bool = False,
) -> NowcastSeries:
    """One-step-ahead estimates with weekly coefficient updates.

    The estimate for week t comes from a model fit on all weeks strictly
    before t (expanding window). Weeks inside the warmup carry NaN.
    """
    X, yv, stamps = _design_rows(panel, y, s)
    m, nq = X.shape
    if warmup is None:
        warmup = nq + 4
    if warmup < nq + 2:
        raise Underdetermined(f"warmup {warmup} < {nq + 2} minimum for {nq} queries")
    values = [math.nan] * min(warmup, m)
    for t in range(warmup, m):
        Xd = np.hstack([np.ones((t, 1)), X[:t]])
        try:
            beta, _ = _qr_solve(Xd, yv[:t])
        except SingularDesign:
            # the very first window must be fittable; later singular
            # windows (e.g. still-flat query columns) just yield no estimate
            if t == warmup:
                raise
            values.append(math.nan)
            continue
        est = float(beta[0] + X[t] @ beta[1:])
        if clamp_nonnegative:
            est = max(est, 0.0)
        values.append(est)
    return NowcastSeries(
        start=stamps[0],
        values=tuple(values),
        mode=NowcastMode.ROLLING_WEEKLY,
        clamp_nonnegative=clamp_nonnegative,
    )


@dataclass(frozen=True)
class EvaluationResult:
    overall: CorrelationResult
    by_year: tuple[tuple[int, CorrelationResult], ...]


def evaluate(
    estimates: NowcastSeries,
    y: WeeklySeries,
    cfg: SignificanceConfig = SignificanceConfig(),
) -> EvaluationResult:
    """Correlate non-sentinel estimates against actual cases, overall and per year."""
    pairs_by_week = []
    for week, est in estimates.valid_items():
        try:
            pairs_by_week.append((week, est, y.value_at(week)))
        except KeyError:
            continue
    all_pairs = [(e, v) for _, e, v in pairs_by_week]
    overall = stats.gated_result(all_pairs, cfg)
    years = sorted({w.iso_year for w, _, _ in pairs_by_week})
    by_year = tuple(
        (yr, stats.gated_result([(e, v) for w, e, v in pairs_by_week if w.iso_year == yr], cfg))
        for yr in years
    )
    return EvaluationResult(overall=overall, by_year=by_year)


def in_sample_objective(panel: QueryPanel, y: WeeklySeries, s: ShiftSpec) -> float | None:
    """Plain Pearson r between full-period model estimates and cases.

    The selection objective: no significance gating, None when the fit
    or the correlation is undefined.
    """
    try:
        fit = fit_ols(panel, y, s)
    except (Underdetermined, SingularDesign, EmptyOverlap):
        return None
    pairs = []
    for week, est in zip(fit.fitted.weeks(), fit.fitted.values):
        pairs.append((est, y.value_at(week)))
    try:
        r, _ = stats.pearson(pairs)
    except (TooFewPairs, ZeroVariance):
        return None
    return r
