"""Date-anchored weekly series: alignment, shifting, slicing, 0-100 scaling.

Sign convention for shifts: +k ("lagging") pairs search week t with case
week t+k, i.e. the case data are moved later relative to the searches.
-k ("preceding") is the mirror image. Shifts beyond +/-max_shift (default
2) are rejected.
"""

from __future__ import annotations

import datetime as _dt
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import (
    EmptyOverlap,
    EmptySlice,
    InsufficientOverlap,
    NegativeValue,
)

DEFAULT_MAX_SHIFT = 2
MIN_PAIRS = 3


@dataclass(frozen=True, order=True)
class WeekStamp:
    """One ISO-8601 week, ordered lexicographically by (year, week)."""

    iso_year: int
    iso_week: int

    def __post_init__(self):
        # fromisocalendar validates the week number against the year
        try:
            _dt.date.fromisocalendar(self.iso_year, self.iso_week, 1)
        except ValueError as exc:
            raise ValueError(f"invalid ISO week {self.iso_year}-W{self.iso_week:02d}") from exc

    @classmethod
    def parse(cls, text: str) -> "WeekStamp":
        """Parse the 'YYYY-Www' interchange form."""
        if len(text) < 8 or text[4:6] != "-W":
            raise ValueError(f"not a YYYY-Www week stamp: {text!r}")
        return cls(int(text[:4]), int(text[6:]))

    def __str__(self) -> str:
        return f"{self.iso_year:04d}-W{self.iso_week:02d}"

    def _monday(self) -> _dt.date:
        return _dt.date.fromisocalendar(self.iso_year, self.iso_week, 1)

    def add(self, weeks: int) -> "WeekStamp":
        d = self._monday() + _dt.timedelta(weeks=weeks)
        y, w, _ = d.isocalendar()
        return WeekStamp(y, w)

    def weeks_until(self, other: "WeekStamp") -> int:
        """Signed number of weeks from self to other."""
        return (other._monday() - self._monday()).days // 7


@dataclass(frozen=True)
class WeeklySeries:
    """Contiguous weekly values anchored at a start week."""

    start: WeekStamp
    values: tuple[float, ...]
    label: str = ""

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 1:
            raise ValueError("series must contain at least one week")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("series values must be finite")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def end(self) -> WeekStamp:
        """Last week covered (inclusive)."""
        return self.start.add(len(self.values) - 1)

    def weeks(self) -> Iterator[WeekStamp]:
        for i in range(len(self.values)):
            yield self.start.add(i)

    def value_at(self, week: WeekStamp) -> float:
        i = self.start.weeks_until(week)
        if not 0 <= i < len(self.values):
            raise KeyError(f"{week} outside series range")
        return self.values[i]

    def with_label(self, label: str) -> "WeeklySeries":
        return WeeklySeries(self.start, self.values, label)


@dataclass(frozen=True)
class ShiftSpec:
    """Signed week offset: +k lagging, -k preceding."""

    weeks: int
    max_shift: int = field(default=DEFAULT_MAX_SHIFT, compare=False)

    def __post_init__(self):
        if abs(self.weeks) > self.max_shift:
            raise ValueError(f"|shift| = {abs(self.weeks)} exceeds maximum {self.max_shift}")


def align(a: WeeklySeries, b: WeeklySeries) -> tuple[WeeklySeries, WeeklySeries]:
    """Restrict both series to the intersection of their week ranges."""
    start = max(a.start, b.start)
    end = min(a.end, b.end)
    if start > end:
        raise EmptyOverlap(f"series ranges {a.start}..{a.end} and {b.start}..{b.end} are disjoint")
    ai = a.start.weeks_until(start)
    bi = b.start.weeks_until(start)
    n = start.weeks_until(end) + 1
    return (
        WeeklySeries(start, a.values[ai:ai + n], a.label),
        WeeklySeries(start, b.values[bi:bi + n], b.label),
    )


def shift_pair(x: WeeklySeries, y: WeeklySeries, s: ShiftSpec) -> list[tuple[float, float]]:
    """Pairs (x_t, y_{t+k}) for shift +k; (x_t, y_{t-k}) for -k."""
    return [(xv, yv) for xv, yv, _ in shift_pair_stamped(x, y, s)]


def shift_pair_stamped(
    x: WeeklySeries, y: WeeklySeries, s: ShiftSpec
) -> list[tuple[float, float, WeekStamp]]:
    """Like shift_pair, but each pair carries the week stamp of its y value.

    The y-side stamp is what annual tables slice on.
    """
    xa, ya = align(x, y)
    k = s.weeks
    n = len(xa)
    pairs = []
    for t in range(n):
        u = t + k
        if 0 <= u < n:
            pairs.append((xa.values[t], ya.values[u], ya.start.add(u)))
    if len(pairs) < MIN_PAIRS:
        raise InsufficientOverlap(
            f"only {len(pairs)} pairs remain after shifting by {k} (need {MIN_PAIRS})"
        )
    return pairs


def slice_year(s: WeeklySeries, year: int) -> WeeklySeries:
    """The contiguous block of weeks whose ISO year equals `year`."""
    idx = [i for i, w in enumerate(s.weeks()) if w.iso_year == year]
    if not idx:
        raise EmptySlice(f"no weeks of {s.start}..{s.end} fall in ISO year {year}")
    lo, hi = idx[0], idx[-1]
    return WeeklySeries(s.start.add(lo), s.values[lo:hi + 1], s.label)


def covered_years(s: WeeklySeries) -> list[int]:
    """Distinct ISO years touched by the series, ascending."""
    return sorted({w.iso_year for w in s.weeks()})


def _round_half_up(v: float) -> int:
    return math.floor(v + 0.5)


def scale_0_100(s: WeeklySeries) -> WeeklySeries:
    """Rescale so the max maps to 100, rounding half-up to integers.

    Matches the integer normalization of search-volume exports; an
    all-zero series is returned unchanged.
    """
    if any(v < 0 for v in s.values):
        raise NegativeValue(f"negative value in series {s.label!r}")
    top = max(s.values)
    if top == 0:
        return s
    scaled = tuple(float(_round_half_up(100.0 * v / top)) for v in s.values)
    return WeeklySeries(s.start, scaled, s.label)


def from_weekly_values(start: WeekStamp, values: Sequence[float], label: str = "") -> WeeklySeries:
    return WeeklySeries(start, tuple(values), label)
