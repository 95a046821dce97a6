"""Benchmark harness: fixed-interval splits, per-cell fits, ranked tables.

Every (country, interval, model) cell is independent: it slices the
country's daily series for the interval, holds out the final ``horizon``
days, fits on the rest, forecasts, and scores. Failures become error
cells rather than aborting the run. Cell seeds are derived from the
spec-level seed so serial and concurrent execution agree.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass
from datetime import date

from . import additive, arima, hybrid, smoothing
from .errors import ConvergenceError, EpiForecastError, InvalidInterval
from .ingest import DEFAULT_INTERVALS, IntervalSpec, slice_for_interval
from .metrics import MetricReport, coverage90_pct, mae, mape_pct, rmse
from .neural.lstm import LstmConfig, lstm_fit, lstm_forecast
from .neural.narnn import NarnnConfig
from .series import (
    ForecastResult,
    SplitSpec,
    TimeSeries,
    format_value,
    train_test_split,
)

MODEL_LABELS = ("arima", "holt-winters", "lstm", "additive", "hybrid")
DEFAULT_SEED = 2020
DEFAULT_HORIZON = 10

RANK_CSV_COLUMNS = (
    "country",
    "interval",
    "model",
    "rmse",
    "mae",
    "mape_pct",
    "coverage90_pct",
    "rank",
    "error",
)


@dataclass(frozen=True)
class BenchmarkSpec:
    countries: tuple[str, ...]
    intervals: tuple[IntervalSpec, ...]
    models: tuple[str, ...]
    seed: int = DEFAULT_SEED
    horizon: int = DEFAULT_HORIZON

    def __post_init__(self):
        if not self.countries or not self.intervals or not self.models:
            raise InvalidInterval("countries, intervals, and models must be non-empty")
        for label in self.models:
            if label not in MODEL_LABELS:
                raise InvalidInterval(
                    f"unknown model {label!r}; choose from {', '.join(MODEL_LABELS)}"
                )
        for interval in self.intervals:
            if interval.days != self.horizon:
                raise InvalidInterval(
                    f"interval {interval.label!r} spans {interval.days} days "
                    f"but the horizon is {self.horizon}"
                )


DEFAULT_PROTOCOL = (
    BenchmarkSpec(countries=("India",), intervals=DEFAULT_INTERVALS, models=MODEL_LABELS),
    BenchmarkSpec(
        countries=("US", "Brazil"),
        intervals=(DEFAULT_INTERVALS[0],),
        models=("arima", "hybrid"),
    ),
)


@dataclass(frozen=True)
class CellOutcome:
    country: str
    interval: IntervalSpec
    model: str
    seed: int
    report: MetricReport | None
    error: str | None
    result: ForecastResult | None
    actual: tuple[float, ...] | None
    test_dates: tuple[date, ...] | None


@dataclass(frozen=True)
class RankRow:
    country: str
    interval: str
    model: str
    rmse: float | None
    mae: float | None
    mape_pct: float | None
    coverage90_pct: float | None
    rank: int
    error: str | None = None


@dataclass(frozen=True)
class RankTable:
    rows: tuple[RankRow, ...]


def derive_seed(seed: int, country: str, interval_label: str, model: str) -> int:
    """Stable 32-bit cell seed from the run seed and cell coordinates."""
    digest = hashlib.sha256(f"{seed}:{country}:{interval_label}:{model}".encode()).digest()
    return int.from_bytes(digest[:4], "big")


def _fit_and_forecast(
    model: str,
    train: TimeSeries,
    horizon: int,
    cell_seed: int,
    order_cache: dict,
    cache_key: tuple[str, str],
) -> ForecastResult:
    if model in ("arima", "hybrid"):
        if cache_key not in order_cache:
            order_cache[cache_key] = arima.select_order(train)
        order = order_cache[cache_key]
    if model == "arima":
        try:
            fitted = arima.fit(train, order)
        except ConvergenceError as exc:
            fitted = exc.best
        return arima.forecast(fitted, horizon)
    if model == "hybrid":
        fitted = hybrid.fit(train, order, NarnnConfig(seed=cell_seed))
        return hybrid.forecast(fitted, horizon)
    if model == "holt-winters":
        return smoothing.forecast(smoothing.fit(train), horizon)
    if model == "lstm":
        return lstm_forecast(lstm_fit(train, LstmConfig(seed=cell_seed)), horizon)
    if model == "additive":
        return additive.forecast(additive.fit(train), horizon)
    raise InvalidInterval(f"unknown model {model!r}")


def run_cells(
    dataset: dict[str, TimeSeries],
    specs: BenchmarkSpec | tuple[BenchmarkSpec, ...],
) -> tuple[CellOutcome, ...]:
    """Evaluate every cell of one or more specs, in declaration order."""
    if isinstance(specs, BenchmarkSpec):
        specs = (specs,)
    order_cache: dict = {}
    outcomes = []
    for spec in specs:
        for country in spec.countries:
            for interval in spec.intervals:
                for model in spec.models:
                    cell_seed = derive_seed(spec.seed, country, interval.label, model)
                    try:
                        if country not in dataset:
                            known = ", ".join(sorted(dataset))
                            raise InvalidInterval(
                                f"no series for {country!r} (have: {known})"
                            )
                        sliced = slice_for_interval(dataset[country], interval)
                        train, test = train_test_split(
                            sliced, SplitSpec(test_len=spec.horizon)
                        )
                        result = _fit_and_forecast(
                            model,
                            train,
                            spec.horizon,
                            cell_seed,
                            order_cache,
                            (country, interval.label),
                        )
                        actual = test.values
                        report = MetricReport(
                            model=model,
                            country=country,
                            interval=interval.label,
                            rmse=rmse(actual, result.point),
                            mae=mae(actual, result.point),
                            mape_pct=mape_pct(actual, result.point),
                            coverage90_pct=coverage90_pct(
                                actual, result.lower90, result.upper90
                            ),
                        )
                        outcomes.append(
                            CellOutcome(
                                country=country,
                                interval=interval,
                                model=model,
                                seed=cell_seed,
                                report=report,
                                error=None,
                                result=result,
                                actual=actual,
                                test_dates=test.dates,
                            )
                        )
                    except EpiForecastError as exc:
                        outcomes.append(
                            CellOutcome(
                                country=country,
                                interval=interval,
                                model=model,
                                seed=cell_seed,
                                report=None,
                                error=f"{type(exc).__name__}: {exc}",
                                result=None,
                                actual=None,
                                test_dates=None,
                            )
                        )
    return tuple(outcomes)


def _group_order(keys):
    seen = []
    for key in keys:
        if key not in seen:
            seen.append(key)
    return seen


def rank(reports) -> RankTable:
    """Rank reports within each (country, interval) group by error size.

    Ascending RMSE; ties break on MAE, then MAPE, then the model label.
    """
    keys = [(r.country, r.interval) for r in reports]
    rows = []
    for key in _group_order(keys):
        group = [r for r in reports if (r.country, r.interval) == key]
        group.sort(key=lambda r: (r.rmse, r.mae, r.mape_pct, r.model))
        for position, r in enumerate(group, start=1):
            rows.append(
                RankRow(
                    country=r.country,
                    interval=r.interval,
                    model=r.model,
                    rmse=r.rmse,
                    mae=r.mae,
                    mape_pct=r.mape_pct,
                    coverage90_pct=r.coverage90_pct,
                    rank=position,
                )
            )
    return RankTable(rows=tuple(rows))


def assemble_table(cells: tuple[CellOutcome, ...]) -> RankTable:
    """Rank valid cells per group; failed cells trail with their message."""
    keys = [(c.country, c.interval.label) for c in cells]
    rows = []
    for key in _group_order(keys):
        group = [c for c in cells if (c.country, c.interval.label) == key]
        scored = [c.report for c in group if c.report is not None]
        scored.sort(key=lambda r: (r.rmse, r.mae, r.mape_pct, r.model))
        position = 0
        for r in scored:
            position += 1
            rows.append(
                RankRow(
                    country=r.country,
                    interval=r.interval,
                    model=r.model,
                    rmse=r.rmse,
                    mae=r.mae,
                    mape_pct=r.mape_pct,
                    coverage90_pct=r.coverage90_pct,
                    rank=position,
                )
            )
        failed = sorted(
            (c for c in group if c.report is None), key=lambda c: c.model
        )
        for c in failed:
            position += 1
            rows.append(
                RankRow(
                    country=c.country,
                    interval=c.interval.label,
                    model=c.model,
                    rmse=None,
                    mae=None,
                    mape_pct=None,
                    coverage90_pct=None,
                    rank=position,
                    error=c.error,
                )
            )
    return RankTable(rows=tuple(rows))


def run_benchmark(
    dataset: dict[str, TimeSeries],
    specs: BenchmarkSpec | tuple[BenchmarkSpec, ...],
) -> RankTable:
    """Full protocol: evaluate all cells and rank them."""
    return assemble_table(run_cells(dataset, specs))


def render_rank_csv(table: RankTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(RANK_CSV_COLUMNS)
    for row in table.rows:
        writer.writerow(
            [
                row.country,
                row.interval,
                row.model,
                format_value(row.rmse) if row.rmse is not None else "",
                format_value(row.mae) if row.mae is not None else "",
                format_value(row.mape_pct) if row.mape_pct is not None else "",
                format_value(row.coverage90_pct) if row.coverage90_pct is not None else "",
                row.rank,
                row.error or "",
            ]
        )
    return buffer.getvalue()


def render_rank_text(table: RankTable) -> str:
    """Aligned fixed-width rendering for terminals."""
    header = ("country", "interval", "model", "rmse", "mae", "mape%", "cover90%", "rank")
    lines = []
    body = []
    for row in table.rows:
        if row.error is None:
            body.append(
                (
                    row.country,
                    row.interval,
                    row.model,
                    f"{row.rmse:.2f}",
                    f"{row.mae:.2f}",
                    f"{row.mape_pct:.3f}",
                    f"{row.coverage90_pct:.0f}",
                    str(row.rank),
                )
            )
        else:
            body.append(
                (row.country, row.interval, row.model, "-", "-", "-", "-", f"{row.rank} ({row.error})")
            )
    widths = [
        max(len(header[i]), *(len(r[i]) for r in body)) if body else len(header[i])
        for i in range(len(header))
    ]
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(header)))
    lines.append("  ".join("-" * widths[i] for i in range(len(header))))
    previous_key = None
    for row, rendered in zip(table.rows, body):
        key = (row.country, row.interval)
        if previous_key is not None and key != previous_key:
            lines.append("")
        previous_key = key
        lines.append("  ".join(rendered[i].ljust(widths[i]) for i in range(len(header))))
    return "\n".join(lines) + "\n"


def render_forecast_csv(
    result: ForecastResult, actual: tuple[float, ...] | None = None
) -> str:
    """Per-cell CSV; the actual column is present when actuals are known."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if actual is not None:
        if len(actual) != len(result.dates):
            raise InvalidInterval(
                f"{len(actual)} actuals for {len(result.dates)} forecast rows"
            )
        writer.writerow(("date", "actual", "point", "lower90", "upper90"))
        for i, day in enumerate(result.dates):
            writer.writerow(
                (
                    day.isoformat(),
                    format_value(actual[i]),
                    format_value(result.point[i]),
                    format_value(result.lower90[i]),
                    format_value(result.upper90[i]),
                )
            )
    else:
        writer.writerow(("date", "point", "lower90", "upper90"))
        for i, day in enumerate(result.dates):
            writer.writerow(
                (
                    day.isoformat(),
                    format_value(result.point[i]),
                    format_value(result.lower90[i]),
                    format_value(result.upper90[i]),
                )
            )
    return buffer.getvalue()
