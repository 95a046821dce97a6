"""Stateless HTTP service over the forecasting core.

The service never touches the filesystem: clients send raw CSV text and
receive rendered artifacts back. Domain errors map to HTTP status by
their category ("data" → 400, "model" → 422) with a structured body.
"""

from __future__ import annotations

import warnings

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, additive, arima, hybrid, smoothing
from ..benchmark import (
    DEFAULT_HORIZON,
    DEFAULT_PROTOCOL,
    DEFAULT_SEED,
    MODEL_LABELS,
    BenchmarkSpec,
    assemble_table,
    derive_seed,
    render_forecast_csv,
    render_rank_csv,
    render_rank_text,
    run_cells,
)
from ..errors import EpiForecastError, FormatError
from ..ingest import DEFAULT_INTERVALS, aggregate_country, parse_jhu_csv
from ..neural.lstm import LstmConfig, lstm_fit, lstm_forecast
from ..neural.narnn import NarnnConfig
from ..series import TimeSeries, read_series_csv, write_series_csv
from ..svgplot import parse_forecast_csv, render_plot
from .schemas import (
    BenchmarkRequest,
    BenchmarkResponse,
    CellPayload,
    CountriesRequest,
    CountriesResponse,
    ForecastPayload,
    ForecastRequest,
    ForecastResponse,
    IngestRequest,
    IngestResponse,
    IntervalPayload,
    PlotRequest,
    PlotResponse,
    RankRowPayload,
    SeriesPayload,
)

app = FastAPI(title="epiforecast", version=__version__)

_STATUS_BY_CATEGORY = {"data": 400, "model": 422}


@app.exception_handler(EpiForecastError)
async def _domain_error(request: Request, exc: EpiForecastError) -> JSONResponse:
    return JSONResponse(
        status_code=_STATUS_BY_CATEGORY.get(exc.category, 422),
        content={
            "error": str(exc),
            "category": exc.category,
            "type": type(exc).__name__,
        },
    )


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/defaults")
def defaults() -> dict:
    return {
        "models": list(MODEL_LABELS),
        "seed": DEFAULT_SEED,
        "horizon": DEFAULT_HORIZON,
        "intervals": [
            {"label": i.label, "start": i.start.isoformat(), "end": i.end.isoformat()}
            for i in DEFAULT_INTERVALS
        ],
        "hyperparameters": {
            "arima": {"grid_p": 5, "grid_d": 2, "grid_q": 5},
            "holt-winters": {"season_length": 7},
            "narnn": {
                "lags": "auto {3,5,7}",
                "hidden": 10,
                "epochs": 500,
                "learning_rate": 0.01,
                "restarts": 5,
            },
            "lstm": {"window": 5, "hidden": 16, "epochs": 300, "learning_rate": 0.01},
            "additive": {
                "n_changepoints": 10,
                "changepoint_range": 0.8,
                "fourier_order": 3,
                "lambda_delta": 0.5,
                "lambda_beta": 0.1,
            },
            "z90": 1.6449,
        },
    }


@app.post("/ingest")
def ingest(req: IngestRequest) -> IngestResponse:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        table = parse_jhu_csv(req.csv_text)
        series = aggregate_country(table, req.country)
    return IngestResponse(
        series=SeriesPayload.from_series(series),
        canonical_csv=write_series_csv(series),
        rows=len(series),
        start=series.start,
        end=series.end,
    )


@app.post("/countries")
def countries(req: CountriesRequest) -> CountriesResponse:
    table = parse_jhu_csv(req.csv_text)
    return CountriesResponse(countries=list(table.countries()))


def _parse_order(text: str) -> arima.ArimaOrder:
    parts = text.split(",")
    if len(parts) != 3:
        raise FormatError(f"order must be 'p,d,q', got {text!r}")
    try:
        p, d, q = (int(part.strip()) for part in parts)
    except ValueError:
        raise FormatError(f"order must be three integers, got {text!r}") from None
    return arima.ArimaOrder(p, d, q)


@app.post("/forecast")
def forecast_endpoint(req: ForecastRequest) -> ForecastResponse:
    series = req.series.to_series()
    model = req.model
    if model not in MODEL_LABELS:
        raise FormatError(
            f"unknown model {req.model!r}; choose from {', '.join(MODEL_LABELS)}"
        )
    if req.order is not None and model not in ("arima", "hybrid"):
        raise FormatError(f"--order applies to arima and hybrid, not {model!r}")

    if model == "arima":
        if req.order is not None:
            # An explicit order means exactly the named terms: no implicit
            # drift unless asked for.
            fitted = arima.fit(series, _parse_order(req.order), with_intercept=req.drift)
        else:
            fitted = arima.fit(series, arima.select_order(series))
        result = arima.forecast(fitted, req.horizon)
    elif model == "hybrid":
        order = _parse_order(req.order) if req.order is not None else None
        fitted = hybrid.fit(series, order, NarnnConfig(seed=req.seed))
        result = hybrid.forecast(fitted, req.horizon)
    elif model == "holt-winters":
        result = smoothing.forecast(smoothing.fit(series), req.horizon)
    elif model == "lstm":
        result = lstm_forecast(lstm_fit(series, LstmConfig(seed=req.seed)), req.horizon)
    else:
        result = additive.forecast(additive.fit(series), req.horizon)
    return ForecastResponse(
        forecast=ForecastPayload.from_result(result),
        csv=render_forecast_csv(result),
    )


@app.post("/benchmark")
def benchmark_endpoint(req: BenchmarkRequest) -> BenchmarkResponse:
    dataset: dict[str, TimeSeries] = {}
    for payload in req.dataset:
        series = payload.to_series()
        dataset[series.name] = series
    if req.specs:
        specs = tuple(
            BenchmarkSpec(
                countries=tuple(s.countries),
                intervals=tuple(i.to_interval() for i in s.intervals),
                models=tuple(s.models),
                seed=s.seed,
                horizon=s.horizon,
            )
            for s in req.specs
        )
    else:
        specs = DEFAULT_PROTOCOL
    cells = run_cells(dataset, specs)
    table = assemble_table(cells)
    cell_payloads = []
    for cell in cells:
        csv_text = (
            render_forecast_csv(cell.result, cell.actual)
            if cell.result is not None
            else None
        )
        cell_payloads.append(CellPayload.from_outcome(cell, csv_text))
    return BenchmarkResponse(
        rows=[RankRowPayload.from_row(r) for r in table.rows],
        cells=cell_payloads,
        rank_csv=render_rank_csv(table),
        rank_text=render_rank_text(table),
    )


@app.post("/plot")
def plot_endpoint(req: PlotRequest) -> PlotResponse:
    actuals = read_series_csv(req.actual_csv, name="actual")
    forecasts = tuple(
        parse_forecast_csv(f.csv_text, f.label) for f in req.forecasts
    )
    svg = render_plot(actuals, forecasts, band=req.band, title=req.title)
    return PlotResponse(svg=svg)
