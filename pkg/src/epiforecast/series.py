"""Core series types and transforms shared by every forecasting model.

All types here are immutable after construction and all operations are pure
functions, so values can be shared freely across concurrent tasks.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from datetime import date, timedelta
from typing import Iterable

import numpy as np

from .errors import (
    DegenerateScale,
    FormatError,
    InsufficientData,
    OutOfRange,
    StateMismatch,
)

ONE_DAY = timedelta(days=1)

#: z-quantile used for all 90% prediction intervals.
Z90 = 1.6449


@dataclass(frozen=True)
class TimeSeries:
    """A univariate series on a strictly contiguous daily calendar."""

    name: str
    dates: tuple[date, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        dates = tuple(self.dates)
        values = tuple(float(v) for v in self.values)
        if len(dates) != len(values):
            raise FormatError(
                f"series {self.name!r}: {len(dates)} dates vs {len(values)} values"
            )
        if not dates:
            raise FormatError(f"series {self.name!r} must hold at least one point")
        for a, b in zip(dates, dates[1:]):
            if b - a != ONE_DAY:
                raise FormatError(
                    f"series {self.name!r}: dates must advance one day at a time, got {a} -> {b}"
                )
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def start(self) -> date:
        return self.dates[0]

    @property
    def end(self) -> date:
        return self.dates[-1]

    def to_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def slice(self, start: int, stop: int) -> "TimeSeries":
        return TimeSeries(self.name, self.dates[start:stop], self.values[start:stop])

    def index_of(self, day: date) -> int:
        """Position of ``day`` in the series; OutOfRange if absent."""
        offset = (day - self.start).days
        if offset < 0 or offset >= len(self):
            raise OutOfRange(
                f"series {self.name!r} covers {self.start}..{self.end}, not {day}"
            )
        return offset

    @staticmethod
    def from_values(name: str, start: date, values: Iterable[float]) -> "TimeSeries":
        values = tuple(values)
        dates = tuple(start + k * ONE_DAY for k in range(len(values)))
        return TimeSeries(name, dates, values)


@dataclass(frozen=True)
class DiffState:
    """Leading values consumed by repeated first-differencing, one per pass."""

    order: int
    seeds: tuple[float, ...]

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("differencing order must be >= 0")
        if len(self.seeds) != self.order:
            raise StateMismatch(
                f"expected {self.order} seeds, got {len(self.seeds)}"
            )


@dataclass(frozen=True)
class ScaleState:
    """Min-max bounds learned on training data."""

    min: float
    max: float


@dataclass(frozen=True)
class SplitSpec:
    """Train/test split: the final ``test_len`` points ending at ``interval_end``."""

    test_len: int = 10
    interval_end: date | None = None

    def __post_init__(self):
        if self.test_len < 1:
            raise ValueError("test_len must be >= 1")


@dataclass(frozen=True)
class ForecastResult:
    """Point forecasts with 90% bounds for consecutive future days."""

    model: str
    dates: tuple[date, ...]
    point: tuple[float, ...]
    lower90: tuple[float, ...]
    upper90: tuple[float, ...]
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.dates)
        if not (len(self.point) == len(self.lower90) == len(self.upper90) == n):
            raise FormatError("forecast arrays must share one length")


def difference(series: TimeSeries, d: int) -> tuple[TimeSeries, DiffState]:
    """Apply first-differencing ``d`` times, recording the consumed leading values."""
    if d < 0:
        raise ValueError("differencing order must be >= 0")
    if len(series) <= d:
        raise InsufficientData(
            f"cannot difference {len(series)} points {d} times"
        )
    vals = series.to_array()
    seeds = []
    for _ in range(d):
        seeds.append(float(vals[0]))
        vals = np.diff(vals)
    out = TimeSeries(series.name, series.dates[d:], tuple(vals))
    return out, DiffState(order=d, seeds=tuple(seeds))


def inverse_difference(diff: TimeSeries, state: DiffState) -> TimeSeries:
    """Exact inverse of :func:`difference` given its recorded state."""
    vals = diff.to_array()
    dates = diff.dates
    for seed in reversed(state.seeds):
        vals = np.concatenate(([seed], seed + np.cumsum(vals)))
        dates = (dates[0] - ONE_DAY,) + dates
    return TimeSeries(diff.name, dates, tuple(vals))


def train_test_split(series: TimeSeries, spec: SplitSpec) -> tuple[TimeSeries, TimeSeries]:
    """Split off the final ``spec.test_len`` points (ending at ``spec.interval_end``)."""
    end = spec.interval_end if spec.interval_end is not None else series.end
    end_idx = series.index_of(end)
    train_len = end_idx + 1 - spec.test_len
    if train_len < 1:
        raise InsufficientData(
            f"need more than {spec.test_len} points before {end}, have {end_idx + 1}"
        )
    return series.slice(0, train_len), series.slice(train_len, end_idx + 1)


def minmax_scale(series: TimeSeries) -> tuple[TimeSeries, ScaleState]:
    """Map values linearly onto [0, 1]; rejects constant series."""
    vals = series.to_array()
    lo, hi = float(np.min(vals)), float(np.max(vals))
    if hi <= lo:
        raise DegenerateScale(
            f"series {series.name!r} is constant at {lo}; cannot min-max scale"
        )
    scaled = (vals - lo) / (hi - lo)
    return TimeSeries(series.name, series.dates, tuple(scaled)), ScaleState(lo, hi)


def inverse_scale(series: TimeSeries, state: ScaleState) -> TimeSeries:
    vals = series.to_array() * (state.max - state.min) + state.min
    return TimeSeries(series.name, series.dates, tuple(vals))


def format_value(v: float) -> str:
    """Full-precision decimal rendering; integral values print without '.0'."""
    if np.isfinite(v) and v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(float(v))


def write_series_csv(series: TimeSeries) -> str:
    """Canonical `date,value` CSV (ISO dates, LF line endings)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", "value"])
    for day, val in zip(series.dates, series.values):
        writer.writerow([day.isoformat(), format_value(val)])
    return buf.getvalue()


def read_series_csv(text: str, name: str = "series") -> TimeSeries:
    """Parse the canonical `date,value` format produced by ingest."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["date", "value"]:
        raise FormatError("expected header 'date,value'")
    dates, values = [], []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise FormatError(f"row {i}: expected 2 fields, got {len(row)}")
        try:
            dates.append(date.fromisoformat(row[0].strip()))
            values.append(float(row[1]))
        except ValueError as exc:
            raise FormatError(f"row {i}: {exc}") from None
    if not dates:
        raise FormatError("no data rows")
    return TimeSeries(name, tuple(dates), tuple(values))
