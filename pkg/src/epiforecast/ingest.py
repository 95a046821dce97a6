"""Reading the upstream confirmed-cases CSV and shaping it for modeling.

The wire format is one row per province/state with cumulative counts in
date columns (``m/d/yy`` headers). A country's series is the per-date sum
of its rows; the values stay cumulative, which is what the models fit.
"""

from __future__ import annotations

import csv
import importlib.resources
import io
from dataclasses import dataclass
from datetime import date, datetime

import warnings

from .errors import (
    CellError,
    EmptyInput,
    FormatError,
    InsufficientData,
    InvalidInterval,
    NotFound,
    OutOfRange,
)
from .series import ONE_DAY, TimeSeries

FIXED_COLUMNS = ("Province/State", "Country/Region", "Lat", "Long")


@dataclass(frozen=True)
class JhuRow:
    province: str
    country: str
    lat: float
    long: float
    values: tuple[float, ...]


@dataclass(frozen=True)
class RawCaseTable:
    dates: tuple[date, ...]
    rows: tuple[JhuRow, ...]

    def countries(self) -> tuple[str, ...]:
        return tuple(sorted({row.country for row in self.rows}))


@dataclass(frozen=True)
class IntervalSpec:
    label: str
    start: date
    end: date

    def __post_init__(self):
        if not self.label:
            raise InvalidInterval("interval label must be non-empty")
        if self.end < self.start:
            raise InvalidInterval(
                f"interval {self.label!r} ends {self.end} before it starts {self.start}"
            )

    @property
    def days(self) -> int:
        return (self.end - self.start).days + 1


DEFAULT_INTERVALS = (
    IntervalSpec("6MAY-15MAY", date(2020, 5, 6), date(2020, 5, 15)),
    IntervalSpec("21JUL-30JUL", date(2020, 7, 21), date(2020, 7, 30)),
    IntervalSpec("1AUG-10AUG", date(2020, 8, 1), date(2020, 8, 10)),
)


def _parse_header_date(token: str, column: int) -> date:
    try:
        return datetime.strptime(token.strip(), "%m/%d/%y").date()
    except ValueError:
        raise FormatError(
            f"header column {column} is not an m/d/yy date: {token!r}"
        ) from None


def _parse_float(token: str, row: int, column: int, allow_empty: bool) -> float:
    token = token.strip()
    if token == "" and allow_empty:
        return 0.0
    try:
        return float(token)
    except ValueError:
        raise CellError(f"not a number: {token!r}", row=row, column=column) from None


def parse_jhu_csv(text: str) -> RawCaseTable:
    """Parse the cumulative confirmed-cases wire format."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyInput("CSV is empty") from None
    if tuple(h.strip() for h in header[:4]) != FIXED_COLUMNS:
        raise FormatError(
            "header must start with 'Province/State,Country/Region,Lat,Long', "
            f"got {','.join(header[:4])!r}"
        )
    if len(header) < 5:
        raise FormatError("header has no date columns")

    dates = tuple(
        _parse_header_date(tok, col) for col, tok in enumerate(header[4:], start=5)
    )
    for i in range(1, len(dates)):
        if dates[i] - dates[i - 1] != ONE_DAY:
            raise FormatError(
                f"date columns must be consecutive days: {dates[i - 1]} is followed by {dates[i]}"
            )

    rows = []
    for line_no, record in enumerate(reader, start=2):
        if not record or all(tok.strip() == "" for tok in record):
            continue
        if len(record) != len(header):
            raise FormatError(
                f"row {line_no} has {len(record)} fields, expected {len(header)}"
            )
        country = record[1].strip()
        if not country:
            raise CellError("country is empty", row=line_no, column=2)
        lat = _parse_float(record[2], line_no, 3, allow_empty=True)
        long = _parse_float(record[3], line_no, 4, allow_empty=True)
        values = []
        for col, tok in enumerate(record[4:], start=5):
            value = _parse_float(tok, line_no, col, allow_empty=False)
            if value < 0:
                raise CellError(f"negative count: {value}", row=line_no, column=col)
            values.append(value)
        rows.append(JhuRow(record[0].strip(), country, lat, long, tuple(values)))

    if not rows:
        raise EmptyInput("CSV has a header but no data rows")
    return RawCaseTable(dates=dates, rows=tuple(rows))


def _levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb))
            )
        previous = current
    return previous[-1]


def aggregate_country(table: RawCaseTable, country: str) -> TimeSeries:
    """Cumulative cases for one country: per-date sums over its province rows.

    Downward revisions (a day whose total is below the previous day's) are
    kept as-is but reported with a warning.
    """
    matches = [row for row in table.rows if row.country == country]
    if not matches:
        known = table.countries()
        folded = {c.lower(): c for c in known}
        if country.lower() in folded:
            suggestions = (folded[country.lower()],)
        else:
            suggestions = tuple(
                c for c in known if _levenshtein(c.lower(), country.lower()) <= 2
            )
        raise NotFound(f"country {country!r} not in table", suggestions=suggestions)
    totals = [0.0] * len(table.dates)
    for row in matches:
        for i, v in enumerate(row.values):
            totals[i] += v
    drops = [i for i in range(1, len(totals)) if totals[i] < totals[i - 1]]
    if drops:
        warnings.warn(
            f"cumulative counts for {country!r} decrease on {len(drops)} day(s) "
            f"(first: {table.dates[drops[0]]}); keeping the raw values",
            UserWarning,
            stacklevel=2,
        )
    return TimeSeries(name=country, dates=table.dates, values=tuple(totals))


def slice_for_interval(series: TimeSeries, interval: IntervalSpec) -> TimeSeries:
    """Window a daily series for one evaluation interval.

    The window runs from the first day with at least one case through the
    interval's last day, so the interval itself forms the tail of the slice.
    """
    if interval.start < series.start or interval.end > series.end:
        raise OutOfRange(
            f"interval {interval.label!r} ({interval.start}..{interval.end}) is not "
            f"covered by data ({series.start}..{series.end})"
        )
    first = next((i for i, v in enumerate(series.values) if v >= 1.0), None)
    if first is None:
        raise InsufficientData(f"{series.name!r} never reaches one case")
    end_idx = series.index_of(interval.end)
    start_idx = series.index_of(interval.start)
    if start_idx - first < 1:
        raise InsufficientData(
            f"no training data before {interval.label!r} for {series.name!r}"
        )
    return series.slice(first, end_idx + 1)


def sample_csv_text() -> str:
    """Bundled sample in the upstream wire format (for offline use)."""
    resource = importlib.resources.files("epiforecast") / "data" / "jhu_confirmed_sample.csv"
    return resource.read_text(encoding="utf-8")
