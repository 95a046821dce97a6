"""Decomposable additive model: piecewise-linear trend, weekly Fourier
seasonality, and optional holiday indicators, fitted by ridge regression.

The trend may change slope at changepoints spread uniformly over the early
fraction of the training window; slope adjustments and seasonal/holiday
coefficients are shrunk toward zero, while the base slope and offset are
left unpenalized. Targets are scaled by their largest magnitude during
fitting so the penalty weights mean the same thing across datasets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date

import numpy as np

from .errors import InsufficientData, SingularSystem
from .series import ONE_DAY, Z90, ForecastResult, TimeSeries

MIN_POINTS = 14


@dataclass(frozen=True)
class AdditiveConfig:
    n_changepoints: int = 10
    changepoint_range: float = 0.8
    fourier_order: int = 3
    lambda_delta: float = 0.5
    lambda_beta: float = 0.1
    holidays: tuple[tuple[date, str], ...] = ()


@dataclass(frozen=True)
class AdditiveModel:
    name: str
    config: AdditiveConfig
    slope: float
    offset: float
    delta: tuple[float, ...]
    beta_seasonal: tuple[float, ...]
    beta_holiday: tuple[float, ...]
    changepoints: tuple[float, ...]  # normalized training time in (0, 1)
    holiday_labels: tuple[str, ...]
    start_ordinal: int
    span_days: int
    y_scale: float
    sigma_res: float
    fitted: tuple[float, ...]
    residuals: tuple[float, ...]
    last_date: date


def _holiday_map(config: AdditiveConfig) -> tuple[tuple[str, ...], dict[str, set[int]]]:
    labels: list[str] = []
    lookup: dict[str, set[int]] = {}
    for day, label in config.holidays:
        if label not in lookup:
            labels.append(label)
            lookup[label] = set()
        lookup[label].add(day.toordinal())
    return tuple(labels), lookup


def trend_design(t: np.ndarray, changepoints: tuple[float, ...]) -> np.ndarray:
    """Columns [1, t, (t - s_j) clipped below at 0]."""
    cols = [np.ones_like(t), t]
    for s in changepoints:
        cols.append(np.where(t > s, t - s, 0.0))
    return np.column_stack(cols)


def seasonal_design(ordinals: np.ndarray, fourier_order: int) -> np.ndarray:
    """Weekly sin/cos pairs on the absolute day number."""
    cols = []
    for k in range(1, fourier_order + 1):
        angle = 2.0 * np.pi * k * ordinals / 7.0
        cols.append(np.sin(angle))
        cols.append(np.cos(angle))
    if not cols:
        return np.empty((ordinals.size, 0))
    return np.column_stack(cols)


def holiday_design(
    ordinals: np.ndarray, labels: tuple[str, ...], lookup: dict[str, set[int]]
) -> np.ndarray:
    cols = [
        np.array([1.0 if o in lookup[label] else 0.0 for o in ordinals])
        for label in labels
    ]
    if not cols:
        return np.empty((ordinals.size, 0))
    return np.column_stack(cols)


def _normalize(ordinals: np.ndarray, start: int, span: int) -> np.ndarray:
    return (ordinals - start) / span


def fit(series: TimeSeries, config: AdditiveConfig = AdditiveConfig()) -> AdditiveModel:
    """Solve the ridge-penalized normal equations for all components."""
    if len(series) < MIN_POINTS:
        raise InsufficientData(f"need at least {MIN_POINTS} points, got {len(series)}")
    y = series.to_array()
    ordinals = np.array([d.toordinal() for d in series.dates], dtype=float)
    start = int(ordinals[0])
    span = int(ordinals[-1] - ordinals[0])
    t = _normalize(ordinals, start, span)

    if config.n_changepoints > 0:
        changepoints = tuple(
            np.linspace(0.0, config.changepoint_range, config.n_changepoints + 1)[1:]
        )
    else:
        changepoints = ()
    labels, lookup = _holiday_map(config)

    trend_block = trend_design(t, changepoints)
    seasonal_block = seasonal_design(ordinals, config.fourier_order)
    holiday_block = holiday_design(ordinals, labels, lookup)
    design = np.hstack((trend_block, seasonal_block, holiday_block))

    y_scale = float(np.max(np.abs(y))) or 1.0
    ys = y / y_scale
    penalties = np.concatenate(
        (
            np.zeros(2),
            np.full(len(changepoints), config.lambda_delta),
            np.full(seasonal_block.shape[1] + holiday_block.shape[1], config.lambda_beta),
        )
    )
    gram = design.T @ design + np.diag(penalties)
    try:
        coef = np.linalg.solve(gram, design.T @ ys)
    except np.linalg.LinAlgError:
        raise SingularSystem(
            "normal equations are singular; increase the ridge penalties"
        ) from None
    coef = coef * y_scale

    n_cp = len(changepoints)
    n_seasonal = seasonal_block.shape[1]
    trend = trend_block @ coef[: 2 + n_cp]
    seasonal = seasonal_block @ coef[2 + n_cp : 2 + n_cp + n_seasonal]
    holiday = holiday_block @ coef[2 + n_cp + n_seasonal :]
    fitted = trend + seasonal + holiday
    residuals = y - fitted
    sigma = float(np.sqrt((residuals @ residuals) / residuals.size))

    return AdditiveModel(
        name=series.name,
        config=config,
        slope=float(coef[1]),
        offset=float(coef[0]),
        delta=tuple(float(v) for v in coef[2 : 2 + n_cp]),
        beta_seasonal=tuple(float(v) for v in coef[2 + n_cp : 2 + n_cp + n_seasonal]),
        beta_holiday=tuple(float(v) for v in coef[2 + n_cp + n_seasonal :]),
        changepoints=changepoints,
        holiday_labels=labels,
        start_ordinal=start,
        span_days=span,
        y_scale=y_scale,
        sigma_res=sigma,
        fitted=tuple(fitted),
        residuals=tuple(residuals),
        last_date=series.end,
    )


def decompose(
    model: AdditiveModel, dates: tuple[date, ...]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(trend, seasonal, holiday) component values for the given dates."""
    ordinals = np.array([d.toordinal() for d in dates], dtype=float)
    t = _normalize(ordinals, model.start_ordinal, model.span_days)
    _, lookup = _holiday_map(model.config)
    trend_coef = np.concatenate(([model.offset, model.slope], model.delta))
    trend = trend_design(t, model.changepoints) @ trend_coef
    seasonal = seasonal_design(ordinals, model.config.fourier_order) @ np.asarray(
        model.beta_seasonal
    )
    holiday = holiday_design(ordinals, model.holiday_labels, lookup) @ np.asarray(
        model.beta_holiday
    )
    return trend, seasonal, holiday


def forecast(model: AdditiveModel, h: int) -> ForecastResult:
    """Continue the final trend segment and the fitted periodic terms.

    The point forecast is computed as the sum of the decomposition
    components, so additivity holds exactly at every horizon.
    """
    if h < 1:
        raise ValueError("horizon must be >= 1")
    dates = tuple(model.last_date + k * ONE_DAY for k in range(1, h + 1))
    trend, seasonal, holiday = decompose(model, dates)
    points = trend + seasonal + holiday
    se = model.sigma_res * np.sqrt(np.arange(1, h + 1))
    return ForecastResult(
        model="additive",
        dates=dates,
        point=tuple(points),
        lower90=tuple(points - Z90 * se),
        upper90=tuple(points + Z90 * se),
        config={
            "n_changepoints": model.config.n_changepoints,
            "changepoint_range": model.config.changepoint_range,
            "fourier_order": model.config.fourier_order,
            "lambda_delta": model.config.lambda_delta,
            "lambda_beta": model.config.lambda_beta,
        },
    )


def to_json(model: AdditiveModel) -> str:
    doc = {
        "model": "additive",
        "name": model.name,
        "config": {
            "n_changepoints": model.config.n_changepoints,
            "changepoint_range": model.config.changepoint_range,
            "fourier_order": model.config.fourier_order,
            "lambda_delta": model.config.lambda_delta,
            "lambda_beta": model.config.lambda_beta,
            "holidays": [[d.isoformat(), label] for d, label in model.config.holidays],
        },
        "slope": model.slope,
        "offset": model.offset,
        "delta": list(model.delta),
        "beta_seasonal": list(model.beta_seasonal),
        "beta_holiday": list(model.beta_holiday),
        "changepoints": list(model.changepoints),
        "holiday_labels": list(model.holiday_labels),
        "start_ordinal": model.start_ordinal,
        "span_days": model.span_days,
        "y_scale": model.y_scale,
        "sigma_res": model.sigma_res,
        "last_date": model.last_date.isoformat(),
    }
    return json.dumps(doc)


def from_json(text: str) -> AdditiveModel:
    doc = json.loads(text)
    config = AdditiveConfig(
        n_changepoints=doc["config"]["n_changepoints"],
        changepoint_range=doc["config"]["changepoint_range"],
        fourier_order=doc["config"]["fourier_order"],
        lambda_delta=doc["config"]["lambda_delta"],
        lambda_beta=doc["config"]["lambda_beta"],
        holidays=tuple(
            (date.fromisoformat(d), label) for d, label in doc["config"]["holidays"]
        ),
    )
    return AdditiveModel(
        name=doc["name"],
        config=config,
        slope=doc["slope"],
        offset=doc["offset"],
        delta=tuple(doc["delta"]),
        beta_seasonal=tuple(doc["beta_seasonal"]),
        beta_holiday=tuple(doc["beta_holiday"]),
        changepoints=tuple(doc["changepoints"]),
        holiday_labels=tuple(doc["holiday_labels"]),
        start_ordinal=doc["start_ordinal"],
        span_days=doc["span_days"],
        y_scale=doc["y_scale"],
        sigma_res=doc["sigma_res"],
        fitted=(),
        residuals=(),
        last_date=date.fromisoformat(doc["last_date"]),
    )
