"""Forecast error metrics and 90%-interval coverage."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, InvalidInterval, ShapeError, ZeroActual


@dataclass(frozen=True)
class MetricReport:
    model: str
    country: str
    interval: str
    rmse: float
    mae: float
    mape_pct: float
    coverage90_pct: float


def _paired(actual, predicted) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.size != p.size:
        raise ShapeError(f"length mismatch: {a.size} actuals vs {p.size} predictions")
    if a.size == 0:
        raise EmptyInput("no points to score")
    return a, p


def rmse(actual, predicted) -> float:
    """Root mean squared error."""
    a, p = _paired(actual, predicted)
    return float(np.sqrt(np.mean((a - p) ** 2)))


def mae(actual, predicted) -> float:
    """Mean absolute error."""
    a, p = _paired(actual, predicted)
    return float(np.mean(np.abs(a - p)))


def mape_pct(actual, predicted) -> float:
    """Mean absolute percentage error, in percent."""
    a, p = _paired(actual, predicted)
    zeros = np.flatnonzero(a == 0.0)
    if zeros.size:
        raise ZeroActual(f"actual value at index {zeros[0]} is zero")
    return float(100.0 * np.mean(np.abs((a - p) / a)))


def coverage90_pct(actual, lower, upper) -> float:
    """Percentage of actuals inside [lower, upper], boundaries inclusive."""
    a = np.asarray(actual, dtype=float)
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    if not (a.size == lo.size == hi.size):
        raise ShapeError(
            f"length mismatch: {a.size} actuals, {lo.size} lower, {hi.size} upper"
        )
    if a.size == 0:
        raise EmptyInput("no points to score")
    bad = np.flatnonzero(lo > hi)
    if bad.size:
        raise InvalidInterval(
            f"lower bound exceeds upper bound at index {bad[0]}"
        )
    inside = np.count_nonzero((lo <= a) & (a <= hi))
    return float(100.0 * inside / a.size)
