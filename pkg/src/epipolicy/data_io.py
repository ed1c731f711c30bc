"""Ingestion of per-country daily cumulative case CSVs.

Accepts the common dashboard export layout: a header row with Date,
Country/Region, Confirmed, Deaths, Recovered (extra columns ignored),
comma-separated UTF-8 with optional RFC 4180 quoting.  Dates may be ISO-8601
or legacy M/D/YY; they are normalized to ISO internally.

Reporting corrections occasionally make cumulative columns dip.  Those dips
are repaired by clamping each value to the running maximum per country,
which keeps the date grid regular for regression.  (The right repair is not
knowable from the data; clamping is this package's documented choice.)
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources

import numpy as np

from .errors import EmptyWindow, MalformedCsv, TooFewPoints, UnknownCountry

REQUIRED_COLUMNS = ("Date", "Country/Region", "Confirmed", "Deaths", "Recovered")


class Field(str, Enum):
    CONFIRMED = "confirmed"
    DEATHS = "deaths"
    RECOVERED = "recovered"


@dataclass(frozen=True)
class CaseRow:
    date: dt.date
    country: str
    confirmed: int
    deaths: int
    recovered: int


@dataclass(frozen=True)
class CaseTable:
    """Rows grouped and sorted by (country, date), cumulative columns cleaned."""

    rows: tuple[CaseRow, ...]

    def countries(self) -> list[str]:
        return sorted({r.country for r in self.rows})

    def for_country(self, country: str) -> list[CaseRow]:
        return [r for r in self.rows if r.country == country]


@dataclass(frozen=True)
class TimeSeries:
    country: str
    field: Field
    dates: tuple[dt.date, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.dates) != len(self.values):
            raise ValueError("dates and values must have equal length")
        for a, b in zip(self.dates, self.dates[1:]):
            if b <= a:
                raise ValueError("dates must be strictly increasing")


@dataclass(frozen=True)
class RegressionSeries:
    """Normalized-time log-cumulative series for change-point regression."""

    t: np.ndarray          # in [0, 1], t[0] == 0, t[-1] == 1
    y: np.ndarray          # natural log of the cumulative count
    date_range: tuple[dt.date, dt.date]

    @property
    def span_days(self) -> int:
        return (self.date_range[1] - self.date_range[0]).days

    def date_of(self, t_value: float) -> dt.date:
        """Calendar day for a normalized-time coordinate (rounded)."""
        return self.date_range[0] + dt.timedelta(
            days=round(t_value * self.span_days))


def _parse_date(text: str, row_index: int) -> dt.date:
    text = text.strip()
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        pass
    try:
        m, d, y = text.split("/")
        year = int(y)
        if year < 100:
            year += 2000
        return dt.date(year, int(m), int(d))
    except Exception:
        raise MalformedCsv(f"unparseable date {text!r}", row_index) from None


def _parse_count(text: str, column: str, row_index: int) -> int:
    text = text.strip()
    try:
        value = float(text) if text else 0.0
    except ValueError:
        raise MalformedCsv(f"unparseable {column} {text!r}", row_index) from None
    if not math.isfinite(value) or value < 0:
        raise MalformedCsv(f"negative or non-finite {column} {text!r}", row_index)
    return int(round(value))


def parse_case_csv(raw) -> CaseTable:
    """Parse a CSV byte stream (or str / file-like) into a cleaned CaseTable."""
    if isinstance(raw, bytes):
        text = raw.decode("utf-8-sig")
    elif isinstance(raw, str):
        text = raw
    elif hasattr(raw, "read"):
        data = raw.read()
        text = data.decode("utf-8-sig") if isinstance(data, bytes) else data
    else:
        raise TypeError("expected bytes, str or a readable stream")

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedCsv("empty input") from None
    header = [h.strip().lstrip("﻿") for h in header]
    positions = {}
    for col in REQUIRED_COLUMNS:
        if col not in header:
            raise MalformedCsv(f"missing required column {col!r}")
        positions[col] = header.index(col)

    rows: list[CaseRow] = []
    seen: set[tuple[str, dt.date]] = set()
    for row_index, cells in enumerate(reader, start=1):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) < len(header):
            raise MalformedCsv("too few fields", row_index)
        date = _parse_date(cells[positions["Date"]], row_index)
        country = cells[positions["Country/Region"]].strip()
        if not country:
            raise MalformedCsv("empty country", row_index)
        key = (country, date)
        if key in seen:
            raise MalformedCsv(f"duplicate date {date} for {country}", row_index)
        seen.add(key)
        rows.append(CaseRow(
            date=date,
            country=country,
            confirmed=_parse_count(cells[positions["Confirmed"]], "Confirmed", row_index),
            deaths=_parse_count(cells[positions["Deaths"]], "Deaths", row_index),
            recovered=_parse_count(cells[positions["Recovered"]], "Recovered", row_index),
        ))

    rows.sort(key=lambda r: (r.country, r.date))
    cleaned: list[CaseRow] = []
    running: dict[str, tuple[int, int, int]] = {}
    for r in rows:
        c, d, rec = running.get(r.country, (0, 0, 0))
        c = max(c, r.confirmed)
        d = max(d, r.deaths)
        rec = max(rec, r.recovered)
        running[r.country] = (c, d, rec)
        cleaned.append(CaseRow(r.date, r.country, c, d, rec))
    return CaseTable(tuple(cleaned))


def serialize_case_table(table: CaseTable) -> str:
    """Emit the canonical CSV form (ISO dates, required columns only)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REQUIRED_COLUMNS)
    for r in table.rows:
        writer.writerow([r.date.isoformat(), r.country, r.confirmed, r.deaths, r.recovered])
    return out.getvalue()


def select_series(table: CaseTable, country: str,
                  date_range: tuple[dt.date, dt.date],
                  field: Field = Field.CONFIRMED) -> TimeSeries:
    """Cleaned cumulative counts for one country within [start, end].

    Missing days inside the window are forward-filled with the previous
    cumulative value.
    """
    rows = table.for_country(country)
    if not rows:
        raise UnknownCountry(country)
    start, end = date_range
    window = [r for r in rows if start <= r.date <= end]
    if not window:
        raise EmptyWindow(f"{country} has no data in [{start}, {end}]")

    by_date = {r.date: r for r in window}
    dates: list[dt.date] = []
    values: list[float] = []
    day = window[0].date
    last = window[0]
    while day <= window[-1].date:
        last = by_date.get(day, last)
        dates.append(day)
        values.append(float(getattr(last, field.value)))
        day += dt.timedelta(days=1)
    return TimeSeries(country=country, field=field,
                      dates=tuple(dates), values=tuple(values))


def to_log_cumulative(series: TimeSeries, min_points: int = 10) -> RegressionSeries:
    """Log-transform and map time affinely onto [0, 1].

    Days with a cumulative count below 1 (only possible at the head of a
    cleaned series) are dropped so that y = ln(value) stays finite.
    """
    kept = [(d, v) for d, v in zip(series.dates, series.values) if v >= 1.0]
    if len(kept) < min_points:
        raise TooFewPoints(
            f"need >= {min_points} points with value >= 1, got {len(kept)}")
    dates = [d for d, _ in kept]
    values = np.array([v for _, v in kept])
    day0, day1 = dates[0], dates[-1]
    span = (day1 - day0).days
    t = np.array([(d - day0).days / span for d in dates])
    return RegressionSeries(t=t, y=np.log(values), date_range=(day0, day1))


def sample_data_path():
    """Path to the bundled per-country daily case extract used by tests/demos."""
    return resources.files("epipolicy.data").joinpath("covid_sample.csv")
