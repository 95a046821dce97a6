"""Holt-Winters triple exponential smoothing with multiplicative seasonality.

The seasonal ring is kept in forecast order: ``seasonal[0]`` is the index
that multiplies the next observation, and each smoothing step rotates the
ring by one. When the initial indices are all within 1% of unity the fit
falls back to double (Holt) smoothing, since dividing by noisy indices on
a seasonality-free series only degrades forecasts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from datetime import date

import numpy as np

from .errors import InsufficientData, InvalidParams, PositivityError
from .optim import nelder_mead
from .series import ONE_DAY, Z90, ForecastResult, TimeSeries

DEFAULT_SEASON_LENGTH = 7
_LATTICE = (0.2, 0.5, 0.8)


@dataclass(frozen=True)
class HwParams:
    alpha: float
    beta: float
    gamma: float
    m: int

    def __post_init__(self):
        for label, v in (("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)):
            if not 0.0 <= v <= 1.0:
                raise InvalidParams(f"{label} must lie in [0, 1], got {v}")
        if self.m < 2:
            raise InvalidParams(f"season length must be >= 2, got {self.m}")


@dataclass(frozen=True)
class HwState:
    level: float
    trend: float
    seasonal: tuple[float, ...]

    def __post_init__(self):
        if any(s <= 0.0 for s in self.seasonal):
            raise PositivityError("seasonal indices must be strictly positive")


@dataclass(frozen=True)
class HwModel:
    name: str
    params: HwParams
    state: HwState
    fitted: tuple[float, ...]
    residuals: tuple[float, ...]
    sigma_res: float
    holt_fallback: bool
    last_date: date


def initialize(series: TimeSeries, m: int) -> HwState:
    """Level/trend/seasonal start values from the first two seasons."""
    if m < 2:
        raise InvalidParams(f"season length must be >= 2, got {m}")
    if len(series) < 2 * m:
        raise InsufficientData(
            f"need at least {2 * m} points for season length {m}, got {len(series)}"
        )
    values = series.to_array()
    if np.any(values <= 0.0):
        bad = int(np.argmax(values <= 0.0))
        raise PositivityError(
            f"multiplicative smoothing needs positive values; "
            f"{series.dates[bad]} has {values[bad]}"
        )
    season1 = values[:m]
    season2 = values[m : 2 * m]
    level = float(season1.mean())
    trend = float((season2.mean() - season1.mean()) / m)
    raw = season1 / level
    seasonal = raw / raw.mean()
    return HwState(level=level, trend=trend, seasonal=tuple(float(s) for s in seasonal))


def one_step_forecast(state: HwState) -> float:
    """Predicted next observation from the current state."""
    return (state.level + state.trend) * state.seasonal[0]


def smooth_step(state: HwState, observation: float, params: HwParams) -> HwState:
    """One update: level, then trend, then seasonal; ring rotates by one."""
    if observation <= 0.0:
        raise PositivityError(f"observation must be positive, got {observation}")
    s_old = state.seasonal[0]
    level = params.alpha * (observation / s_old) + (1.0 - params.alpha) * (
        state.level + state.trend
    )
    trend = params.beta * (level - state.level) + (1.0 - params.beta) * state.trend
    s_new = params.gamma * (observation / level) + (1.0 - params.gamma) * s_old
    return HwState(level=level, trend=trend, seasonal=state.seasonal[1:] + (s_new,))


def _run(values: np.ndarray, state: HwState, params: HwParams) -> tuple[HwState, np.ndarray]:
    fitted = np.empty(values.size)
    for i, y in enumerate(values):
        fitted[i] = one_step_forecast(state)
        state = smooth_step(state, float(y), params)
    return state, fitted


def _sse(values: np.ndarray, state0: HwState, params: HwParams) -> float:
    try:
        _, fitted = _run(values, state0, params)
    except (PositivityError, ZeroDivisionError, OverflowError):
        return math.inf
    err = values - fitted
    sse = float(err @ err)
    return sse if math.isfinite(sse) else math.inf


def fit(series: TimeSeries, m: int = DEFAULT_SEASON_LENGTH) -> HwModel:
    """Minimize one-step-ahead SSE over the smoothing factors.

    Bounded Nelder-Mead from a small lattice of start points; the box
    constraint is enforced by clipping plus a penalty on the excursion.
    """
    state0 = initialize(series, m)
    values = series.to_array()
    holt_fallback = all(abs(s - 1.0) <= 0.01 for s in state0.seasonal)
    if holt_fallback:
        state0 = replace(state0, seasonal=(1.0,) * m)

    scale = float(values @ values)

    def unpack(vec: np.ndarray) -> tuple[HwParams, float]:
        clipped = np.clip(vec, 0.0, 1.0)
        excess = float(np.abs(vec - clipped).sum())
        if holt_fallback:
            params = HwParams(float(clipped[0]), float(clipped[1]), 0.0, m)
        else:
            params = HwParams(float(clipped[0]), float(clipped[1]), float(clipped[2]), m)
        return params, excess

    def objective(vec: np.ndarray) -> float:
        params, excess = unpack(vec)
        sse = _sse(values, state0, params)
        if not math.isfinite(sse):
            return 10.0 * scale + excess * scale
        return sse + excess * scale

    if holt_fallback:
        starts = [np.array([a, b]) for a in _LATTICE for b in _LATTICE]
    else:
        starts = [np.array([a, b, g]) for a in _LATTICE for b in _LATTICE for g in _LATTICE]

    best_vec, best_val = None, math.inf
    for start in starts:
        result = nelder_mead(objective, start, step=0.15, frtol=1e-10)
        candidate = min((result.fun, tuple(result.x)), (objective(start), tuple(start)))
        if candidate[0] < best_val:
            best_val, best_vec = candidate[0], np.asarray(candidate[1])

    params, _ = unpack(best_vec)
    state, fitted = _run(values, state0, params)
    residuals = values - fitted
    sigma = float(np.sqrt((residuals @ residuals) / residuals.size))
    return HwModel(
        name=series.name,
        params=params,
        state=state,
        fitted=tuple(fitted),
        residuals=tuple(residuals),
        sigma_res=sigma,
        holt_fallback=holt_fallback,
        last_date=series.end,
    )


def forecast(model: HwModel, h: int) -> ForecastResult:
    """Linear trend times the wrapped seasonal ring, Gaussian bounds."""
    if h < 1:
        raise ValueError("horizon must be >= 1")
    state = model.state
    m = model.params.m
    points = np.array(
        [
            (state.level + k * state.trend) * state.seasonal[(k - 1) % m]
            for k in range(1, h + 1)
        ]
    )
    se = model.sigma_res * np.sqrt(np.arange(1, h + 1))
    dates = tuple(model.last_date + k * ONE_DAY for k in range(1, h + 1))
    return ForecastResult(
        model="holt-winters",
        dates=dates,
        point=tuple(points),
        lower90=tuple(points - Z90 * se),
        upper90=tuple(points + Z90 * se),
        config={
            "alpha": model.params.alpha,
            "beta": model.params.beta,
            "gamma": model.params.gamma,
            "m": m,
            "holt_fallback": model.holt_fallback,
        },
    )


def to_json(model: HwModel) -> str:
    doc = {
        "model": "holt-winters",
        "name": model.name,
        "alpha": model.params.alpha,
        "beta": model.params.beta,
        "gamma": model.params.gamma,
        "m": model.params.m,
        "level": model.state.level,
        "trend": model.state.trend,
        "seasonal": list(model.state.seasonal),
        "sigma_res": model.sigma_res,
        "holt_fallback": model.holt_fallback,
        "last_date": model.last_date.isoformat(),
    }
    return json.dumps(doc)


def from_json(text: str) -> HwModel:
    doc = json.loads(text)
    return HwModel(
        name=doc["name"],
        params=HwParams(doc["alpha"], doc["beta"], doc["gamma"], doc["m"]),
        state=HwState(doc["level"], doc["trend"], tuple(doc["seasonal"])),
        fitted=(),
        residuals=(),
        sigma_res=doc["sigma_res"],
        holt_fallback=doc["holt_fallback"],
        last_date=date.fromisoformat(doc["last_date"]),
    )
