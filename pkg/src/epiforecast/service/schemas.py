"""Request/response models for the HTTP service.

A daily series travels as (name, start date, values); dates are implied
by contiguity, which the core series type guarantees on both ends.
"""

from __future__ import annotations

from datetime import date

from pydantic import BaseModel, Field

from ..benchmark import DEFAULT_HORIZON, DEFAULT_SEED, CellOutcome, RankRow
from ..ingest import IntervalSpec
from ..metrics import MetricReport
from ..series import ForecastResult, TimeSeries


class SeriesPayload(BaseModel):
    name: str
    start: date
    values: list[float] = Field(min_length=1)

    @classmethod
    def from_series(cls, series: TimeSeries) -> "SeriesPayload":
        return cls(name=series.name, start=series.start, values=list(series.values))

    def to_series(self) -> TimeSeries:
        return TimeSeries.from_values(self.name, self.start, self.values)


class IngestRequest(BaseModel):
    csv_text: str
    country: str


class IngestResponse(BaseModel):
    series: SeriesPayload
    canonical_csv: str
    rows: int
    start: date
    end: date


class CountriesRequest(BaseModel):
    csv_text: str


class CountriesResponse(BaseModel):
    countries: list[str]


class ForecastRequest(BaseModel):
    series: SeriesPayload
    model: str
    horizon: int = Field(default=DEFAULT_HORIZON, ge=1)
    seed: int = DEFAULT_SEED
    order: str | None = None  # "p,d,q" for arima/hybrid
    drift: bool = False  # include an intercept with an explicit order


class ForecastPayload(BaseModel):
    model: str
    dates: list[date]
    point: list[float]
    lower90: list[float]
    upper90: list[float]
    config: dict

    @classmethod
    def from_result(cls, result: ForecastResult) -> "ForecastPayload":
        return cls(
            model=result.model,
            dates=list(result.dates),
            point=list(result.point),
            lower90=list(result.lower90),
            upper90=list(result.upper90),
            config=dict(result.config),
        )


class ForecastResponse(BaseModel):
    forecast: ForecastPayload
    csv: str


class IntervalPayload(BaseModel):
    label: str
    start: date
    end: date

    @classmethod
    def from_interval(cls, interval: IntervalSpec) -> "IntervalPayload":
        return cls(label=interval.label, start=interval.start, end=interval.end)

    def to_interval(self) -> IntervalSpec:
        return IntervalSpec(self.label, self.start, self.end)


class BenchmarkSpecPayload(BaseModel):
    countries: list[str]
    intervals: list[IntervalPayload]
    models: list[str]
    seed: int = DEFAULT_SEED
    horizon: int = DEFAULT_HORIZON


class BenchmarkRequest(BaseModel):
    dataset: list[SeriesPayload]
    specs: list[BenchmarkSpecPayload]


class ReportPayload(BaseModel):
    model: str
    country: str
    interval: str
    rmse: float
    mae: float
    mape_pct: float
    coverage90_pct: float

    @classmethod
    def from_report(cls, report: MetricReport) -> "ReportPayload":
        return cls(
            model=report.model,
            country=report.country,
            interval=report.interval,
            rmse=report.rmse,
            mae=report.mae,
            mape_pct=report.mape_pct,
            coverage90_pct=report.coverage90_pct,
        )


class RankRowPayload(BaseModel):
    country: str
    interval: str
    model: str
    rmse: float | None
    mae: float | None
    mape_pct: float | None
    coverage90_pct: float | None
    rank: int
    error: str | None = None

    @classmethod
    def from_row(cls, row: RankRow) -> "RankRowPayload":
        return cls(
            country=row.country,
            interval=row.interval,
            model=row.model,
            rmse=row.rmse,
            mae=row.mae,
            mape_pct=row.mape_pct,
            coverage90_pct=row.coverage90_pct,
            rank=row.rank,
            error=row.error,
        )


class CellPayload(BaseModel):
    country: str
    interval: str
    model: str
    seed: int
    report: ReportPayload | None
    error: str | None
    forecast: ForecastPayload | None
    actual: list[float] | None
    forecast_csv: str | None

    @classmethod
    def from_outcome(cls, outcome: CellOutcome, forecast_csv: str | None) -> "CellPayload":
        return cls(
            country=outcome.country,
            interval=outcome.interval.label,
            model=outcome.model,
            seed=outcome.seed,
            report=ReportPayload.from_report(outcome.report) if outcome.report else None,
            error=outcome.error,
            forecast=ForecastPayload.from_result(outcome.result) if outcome.result else None,
            actual=list(outcome.actual) if outcome.actual is not None else None,
            forecast_csv=forecast_csv,
        )


class BenchmarkResponse(BaseModel):
    rows: list[RankRowPayload]
    cells: list[CellPayload]
    rank_csv: str
    rank_text: str


class PlotForecastPayload(BaseModel):
    label: str
    csv_text: str


class PlotRequest(BaseModel):
    actual_csv: str
    forecasts: list[PlotForecastPayload]
    band: str | None = None
    title: str | None = None


class PlotResponse(BaseModel):
    svg: str


class ErrorResponse(BaseModel):
    error: str
    category: str
    type: str
