"""Parsers and writers for the weekly-data interchange formats.

Three fixed CSV layouts, all UTF-8 with LF endings and no quoting:

  search panel:  week,<label1>,<label2>,...   rows YYYY-Www,<int 0-100>,...
  case counts:   week,cases                   rows YYYY-Www,<int >= 0>
  query lexicon: query,language,source        language en|ar, source
                 prior|wikipedia|related

Search-volume files may omit zero weeks (zero-filled on parse); case
files must be complete, a gap there is an error.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import (
    DuplicateEntry,
    EmptyQuery,
    GapInCases,
    MalformedHeader,
    MalformedRow,
    NegativeCount,
    NonContiguousAfterFill,
    ValueOutOfRange,
)
from .regress import QueryPanel
from .timeseries import WeekStamp, WeeklySeries


class Language(enum.Enum):
    ENGLISH = "en"
    ARABIC = "ar"


class LexiconSource(enum.Enum):
    PRIOR_RESEARCH = "prior"
    WIKIPEDIA = "wikipedia"
    RELATED_SEARCHES = "related"


@dataclass(frozen=True)
class LexiconEntry:
    query_text: str
    language: Language
    source: LexiconSource


@dataclass(frozen=True)
class QueryLexicon:
    entries: tuple[LexiconEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)


def _decode_lines(data: bytes) -> list[str]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedRow(f"input is not valid UTF-8: {exc}") from None
    if "\r" in text:
        raise MalformedRow("CRLF line endings are not accepted (LF only)")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def _parse_week(text: str, lineno: int) -> WeekStamp:
    try:
        return WeekStamp.parse(text)
    except ValueError as exc:
        raise MalformedRow(f"line {lineno}: {exc}") from None


def _parse_int(text: str, lineno: int) -> int:
    if not text or not (text.isdigit() or (text[0] == "-" and text[1:].isdigit())):
        raise MalformedRow(f"line {lineno}: not an integer: {text!r}")
    return int(text)


def parse_trends_csv(data: bytes) -> QueryPanel:
    """Parse a search-volume panel, zero-filling omitted weeks."""
    lines = _decode_lines(data)
    if not lines:
        raise MalformedHeader("empty input")
    header = lines[0].split(",")
    if len(header) < 2 or header[0] != "week":
        raise MalformedHeader(f"expected 'week,<label>,...', got {lines[0]!r}")
    labels = header[1:]
    if len(labels) != len(set(labels)) or any(not l for l in labels):
        raise MalformedHeader("query labels must be non-empty and distinct")

    rows: list[tuple[WeekStamp, list[int]]] = []
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(header):
            raise MalformedRow(f"line {i}: expected {len(header)} cells, got {len(cells)}")
        week = _parse_week(cells[0], i)
        vals = [_parse_int(c, i) for c in cells[1:]]
        for v in vals:
            if not 0 <= v <= 100:
                raise ValueOutOfRange(f"line {i}: search volume {v} outside 0-100")
        rows.append((week, vals))
    if not rows:
        raise MalformedRow("panel has no data rows")

    # zero-fill omitted weeks between the first and last stamp
    filled: list[list[int]] = []
    expected = rows[0][0]
    for week, vals in rows:
        gap = expected.weeks_until(week)
        if gap < 0:
            raise NonContiguousAfterFill(f"week {week} out of order or duplicated")
        filled.extend([0] * len(labels) for _ in range(gap))
        filled.append(vals)
        expected = week.add(1)

    start = rows[0][0]
    series = tuple(
        WeeklySeries(start, tuple(float(r[j]) for r in filled), label)
        for j, label in enumerate(labels)
    )
    return QueryPanel(tuple(labels), series)


def parse_cases_csv(data: bytes) -> WeeklySeries:
    """Parse weekly case counts; the series must have no gaps."""
    lines = _decode_lines(data)
    if not lines:
        raise MalformedHeader("empty input")
    if lines[0] != "week,cases":
        raise MalformedHeader(f"expected 'week,cases', got {lines[0]!r}")
    weeks: list[WeekStamp] = []
    counts: list[int] = []
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != 2:
            raise MalformedRow(f"line {i}: expected 2 cells, got {len(cells)}")
        week = _parse_week(cells[0], i)
        count = _parse_int(cells[1], i)
        if count < 0:
            raise NegativeCount(f"line {i}: negative case count {count}")
        if weeks:
            gap = weeks[-1].add(1).weeks_until(week)
            if gap > 0:
                raise GapInCases(f"missing week(s) before {week}")
            if gap < 0:
                raise NonContiguousAfterFill(f"week {week} out of order or duplicated")
        weeks.append(week)
        counts.append(count)
    if not weeks:
        raise MalformedRow("case file has no data rows")
    return WeeklySeries(weeks[0], tuple(float(c) for c in counts), "cases")


def load_lexicon(data: bytes) -> QueryLexicon:
    """Parse the pre-translated query lexicon."""
    lines = _decode_lines(data)
    if not lines:
        raise MalformedHeader("empty input")
    if lines[0] != "query,language,source":
        raise MalformedHeader(f"expected 'query,language,source', got {lines[0]!r}")
    entries: list[LexiconEntry] = []
    seen: set[tuple[str, Language]] = set()
    for i, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != 3:
            raise MalformedRow(f"line {i}: expected 3 cells, got {len(cells)}")
        query, lang_text, source_text = cells
        if not query:
            raise EmptyQuery(f"line {i}: empty query text")
        try:
            lang = Language(lang_text)
            source = LexiconSource(source_text)
        except ValueError:
            raise MalformedRow(
                f"line {i}: language must be en|ar, source prior|wikipedia|related"
            ) from None
        key = (query, lang)
        if key in seen:
            raise DuplicateEntry(f"line {i}: duplicate entry {query!r} ({lang.value})")
        seen.add(key)
        entries.append(LexiconEntry(query, lang, source))
    return QueryLexicon(tuple(entries))


def write_trends_csv(panel: QueryPanel) -> bytes:
    lines = ["week," + ",".join(panel.labels)]
    for i in range(panel.n_weeks):
        week = panel.start.add(i)
        lines.append(f"{week}," + ",".join(str(int(s.values[i])) for s in panel.series))
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_cases_csv(cases: WeeklySeries) -> bytes:
    lines = ["week,cases"]
    for week, v in zip(cases.weeks(), cases.values):
        lines.append(f"{week},{int(v)}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_lexicon_csv(lexicon: QueryLexicon) -> bytes:
    lines = ["query,language,source"]
    for e in lexicon.entries:
        lines.append(f"{e.query_text},{e.language.value},{e.source.value}")
    return ("\n".join(lines) + "\n").encode("utf-8")
