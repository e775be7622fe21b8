"""Pearson correlation with t-test significance and NA semantics.

A correlation that cannot be computed (constant series, too few pairs)
or fails the significance gate is reported as NA with a reason code,
never as an exception, mirroring how surveillance tables mark cells.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import EmptyOverlap, InsufficientOverlap, InvalidDof, TooFewPairs, ZeroVariance
from .timeseries import ShiftSpec, WeeklySeries, shift_pair

_BETA_TOL = 1e-12
_BETA_MAX_ITER = 300


class NAReason(enum.Enum):
    ZERO_VARIANCE = "ZeroVariance"
    TOO_FEW_PAIRS = "TooFewPairs"
    NOT_SIGNIFICANT = "NotSignificant"


@dataclass(frozen=True)
class SignificanceConfig:
    alpha: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p_value: float
    n: int
    na: bool = False
    na_reason: NAReason | None = None

    @classmethod
    def not_applicable(cls, reason: NAReason, r: float = math.nan,
                       p_value: float = math.nan, n: int = 0) -> "CorrelationResult":
        return cls(r=r, p_value=p_value, n=n, na=True, na_reason=reason)


def pearson(pairs: list[tuple[float, float]]) -> tuple[float, int]:
    """Product-moment correlation of the pair list.

    Raises ZeroVariance / TooFewPairs on degenerate input; `correlate`
    converts those into NA cells.
    """
    n = len(pairs)
    if n < 3:
        raise TooFewPairs(f"need at least 3 pairs, got {n}")
    mx = sum(p[0] for p in pairs) / n
    my = sum(p[1] for p in pairs) / n
    sxx = sum((p[0] - mx) ** 2 for p in pairs)
    syy = sum((p[1] - my) ** 2 for p in pairs)
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("a coordinate has zero variance")
    sxy = sum((p[0] - mx) * (p[1] - my) for p in pairs)
    r = sxy / math.sqrt(sxx * syy)
    # guard against rounding pushing |r| past 1
    r = max(-1.0, min(1.0, r))
    return r, n


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Lentz's continued fraction for the regularized incomplete beta."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_TOL:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) via the continued-fraction expansion."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_two_sided_p(t: float, dof: int) -> float:
    """P(|T| >= |t|) for Student's t with `dof` degrees of freedom."""
    if dof < 1:
        raise InvalidDof(f"dof must be >= 1, got {dof}")
    if not math.isfinite(t):
        raise InvalidDof("t statistic must be finite")
    if t == 0.0:
        return 1.0
    # use whichever tail argument is computed without cancellation
    x = dof / (dof + t * t)
    cx = t * t / (dof + t * t)
    if cx < 0.5:
        return 1.0 - regularized_incomplete_beta(0.5, dof / 2.0, cx)
    return regularized_incomplete_beta(dof / 2.0, 0.5, x)


def t_critical(alpha: float, dof: int) -> float:
    """Two-sided critical value: the t with student_t_two_sided_p(t) = alpha."""
    if dof < 1:
        raise InvalidDof(f"dof must be >= 1, got {dof}")
    lo, hi = 0.0, 1.0
    while student_t_two_sided_p(hi, dof) > alpha:
        hi *= 2.0
        if hi > 1e12:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_two_sided_p(mid, dof) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def correlation_p_value(r: float, n: int) -> float:
    """Two-sided p for the null of zero correlation, t with n-2 dof."""
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return student_t_two_sided_p(t, n - 2)


def gated_result(
    pairs: list[tuple[float, float]],
    cfg: SignificanceConfig = SignificanceConfig(),
) -> CorrelationResult:
    """Correlate a pair list, mapping degenerate or insignificant cases to NA."""
    try:
        r, n = pearson(pairs)
    except TooFewPairs:
        return CorrelationResult.not_applicable(NAReason.TOO_FEW_PAIRS)
    except ZeroVariance:
        return CorrelationResult.not_applicable(NAReason.ZERO_VARIANCE)
    p = correlation_p_value(r, n)
    if p >= cfg.alpha:
        return CorrelationResult.not_applicable(NAReason.NOT_SIGNIFICANT, r=r, p_value=p, n=n)
    return CorrelationResult(r=r, p_value=p, n=n)


def correlate(
    x: WeeklySeries,
    y: WeeklySeries,
    s: ShiftSpec,
    cfg: SignificanceConfig = SignificanceConfig(),
) -> CorrelationResult:
    """Shift, correlate, and significance-gate one query against cases.

    Total over valid series: degenerate inputs come back as NA with a
    reason, never raise.
    """
    try:
        pairs = shift_pair(x, y, s)
    except (InsufficientOverlap, EmptyOverlap):
        return CorrelationResult.not_applicable(NAReason.TOO_FEW_PAIRS)
    return gated_result(pairs, cfg)


def rank_queries(
    panel,
    y: WeeklySeries,
    s: ShiftSpec,
    cfg: SignificanceConfig = SignificanceConfig(),
) -> list[tuple[str, CorrelationResult]]:
    """Each query correlated against cases, best first, NA cells last.

    Ties break on label code points so downstream selection is
    deterministic.
    """
    scored = [(label, correlate(series, y, s, cfg)) for label, series in panel.items()]

    def key(item):
        label, res = item
        if res.na:
            return (1, 0.0, label)
        return (0, -res.r, label)

    return sorted(scored, key=key)
