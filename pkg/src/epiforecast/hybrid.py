"""Two-stage hybrid: ARIMA for the linear part, a NARNN on its residuals.

The stages never exchange information beyond the residual series. The
combined forecast is the elementwise sum of the ARIMA point forecast and
the network's closed-loop residual forecast; the ARIMA interval is kept
and shifted by the residual adjustment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import arima
from .arima import ArimaModel, ArimaOrder
from .errors import InsufficientResiduals
from .neural.narnn import (
    LAG_CANDIDATES,
    NarnnConfig,
    NarnnModel,
    narnn_fit,
    narnn_forecast,
    narnn_from_dict,
    narnn_to_dict,
)
from .series import ForecastResult, TimeSeries


@dataclass(frozen=True)
class HybridModel:
    linear: ArimaModel
    nonlinear: NarnnModel
    residual_tail: tuple[float, ...]


def fit(
    series: TimeSeries,
    arima_order: ArimaOrder | None = None,
    narnn_config: NarnnConfig = NarnnConfig(),
) -> HybridModel:
    """Fit the ARIMA stage, then train the network on its residuals."""
    if arima_order is None:
        arima_order = arima.select_order(series)
    linear = arima.fit(series, arima_order)
    residuals = arima.residual_series(linear)
    min_lags = narnn_config.lags if narnn_config.lags is not None else min(LAG_CANDIDATES)
    min_needed = min_lags + 11
    if len(residuals) < min_needed:
        raise InsufficientResiduals(
            f"ARIMA{arima_order.label()} leaves {len(residuals)} residuals; "
            f"the residual network needs at least {min_needed}"
        )
    nonlinear = narnn_fit(residuals, narnn_config)
    tail = residuals.values[len(residuals) - nonlinear.config.lags :]
    return HybridModel(linear=linear, nonlinear=nonlinear, residual_tail=tail)


def decompose_forecast(
    model: HybridModel, h: int
) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """The two stage forecasts whose sum is the hybrid point forecast."""
    linear = arima.forecast(model.linear, h)
    nonlinear = narnn_forecast(model.nonlinear, model.residual_tail, h)
    return linear.point, nonlinear


def forecast(model: HybridModel, h: int) -> ForecastResult:
    linear = arima.forecast(model.linear, h)
    nonlinear = narnn_forecast(model.nonlinear, model.residual_tail, h)
    point = tuple(lin + non for lin, non in zip(linear.point, nonlinear))
    lower = tuple(lo + non for lo, non in zip(linear.lower90, nonlinear))
    upper = tuple(up + non for up, non in zip(linear.upper90, nonlinear))
    return ForecastResult(
        model="hybrid",
        dates=linear.dates,
        point=point,
        lower90=lower,
        upper90=upper,
        config={
            "order": model.linear.order.label(),
            "lags": model.nonlinear.config.lags,
            "hidden": model.nonlinear.config.hidden,
            "seed": model.nonlinear.config.seed,
        },
    )


def to_json(model: HybridModel) -> str:
    doc = {
        "model": "hybrid",
        "linear": json.loads(arima.to_json(model.linear)),
        "nonlinear": narnn_to_dict(model.nonlinear),
        "residual_tail": list(model.residual_tail),
    }
    return json.dumps(doc)


def from_json(text: str) -> HybridModel:
    doc = json.loads(text)
    return HybridModel(
        linear=arima.from_json(json.dumps(doc["linear"])),
        nonlinear=narnn_from_dict(doc["nonlinear"]),
        residual_tail=tuple(doc["residual_tail"]),
    )
