from datetime import date

import numpy as np
import pytest

from epiforecast import smoothing
from epiforecast.errors import InsufficientData, InvalidParams, PositivityError
from epiforecast.series import Z90, TimeSeries
from epiforecast.smoothing import (
    DEFAULT_SEASON_LENGTH,
    HwParams,
    HwState,
    initialize,
    one_step_forecast,
    smooth_step,
)


def weekly_series(n=84, base=200.0, growth=3.0, amplitude=0.35, seed=0):
    """Strongly seasonal positive series: trend times a weekly profile."""
    rng = np.random.default_rng(seed)
    profile = 1.0 + amplitude * np.sin(2 * np.pi * np.arange(n) / 7.0)
    trend = base + growth * np.arange(n)
    values = trend * profile * np.exp(rng.normal(0, 0.01, n))
    return TimeSeries.from_values("weekly", date(2020, 2, 1), values)


def test_params_and_state_validation():
    with pytest.raises(InvalidParams):
        HwParams(alpha=1.2, beta=0.1, gamma=0.1, m=7)
    with pytest.raises(InvalidParams):
        HwParams(alpha=0.5, beta=-0.1, gamma=0.1, m=7)
    with pytest.raises(InvalidParams):
        HwParams(alpha=0.5, beta=0.1, gamma=0.1, m=1)
    with pytest.raises(PositivityError):
        HwState(level=1.0, trend=0.0, seasonal=(1.0, 0.0))


def test_smooth_step_hand_case():
    state = HwState(level=10.0, trend=2.0, seasonal=(1.0, 1.0))
    params = HwParams(alpha=0.5, beta=0.5, gamma=0.5, m=2)
    stepped = smooth_step(state, 14.0, params)
    assert stepped.level == pytest.approx(13.0)
    assert stepped.trend == pytest.approx(2.5)
    assert stepped.seasonal[-1] == pytest.approx(0.5 * 14.0 / 13.0 + 0.5)
    # ring rotated: the untouched index moves to the front
    assert stepped.seasonal[0] == 1.0


def test_smooth_step_zero_factors_only_rotate_the_ring():
    state = HwState(level=10.0, trend=2.0, seasonal=(0.9, 1.1))
    params = HwParams(alpha=0.0, beta=0.0, gamma=0.0, m=2)
    stepped = smooth_step(state, 14.0, params)
    assert stepped.level == state.level + state.trend
    assert stepped.trend == state.trend
    assert stepped.seasonal == (1.1, 0.9)


def test_smooth_step_full_level_tracking():
    state = HwState(level=10.0, trend=0.0, seasonal=(1.0, 1.0))
    params = HwParams(alpha=1.0, beta=0.0, gamma=0.0, m=2)
    stepped = smooth_step(state, 14.0, params)
    assert stepped.level == pytest.approx(14.0)
    assert stepped.trend == 0.0


def test_smooth_step_rejects_nonpositive_observation():
    state = HwState(level=10.0, trend=0.0, seasonal=(1.0, 1.0))
    params = HwParams(alpha=0.5, beta=0.5, gamma=0.5, m=2)
    with pytest.raises(PositivityError):
        smooth_step(state, 0.0, params)


def test_one_step_forecast_uses_front_of_ring():
    state = HwState(level=100.0, trend=5.0, seasonal=(0.8, 1.2))
    assert one_step_forecast(state) == pytest.approx(105.0 * 0.8)


def test_forecast_alignment_hand_case():
    model = smoothing.HwModel(
        name="hand",
        params=HwParams(alpha=0.5, beta=0.5, gamma=0.5, m=2),
        state=HwState(level=100.0, trend=0.0, seasonal=(0.9, 1.1)),
        fitted=(),
        residuals=(),
        sigma_res=0.0,
        holt_fallback=False,
        last_date=date(2020, 6, 1),
    )
    fc = smoothing.forecast(model, 2)
    assert fc.point == pytest.approx((90.0, 110.0))
    # the ring wraps for horizons past one season
    fc4 = smoothing.forecast(model, 4)
    assert fc4.point == pytest.approx((90.0, 110.0, 90.0, 110.0))


def test_initialize_normalizes_seasonal_mean_to_one():
    series = weekly_series()
    state = initialize(series, 7)
    assert np.mean(state.seasonal) == pytest.approx(1.0)
    assert state.level == pytest.approx(float(np.mean(series.values[:7])))
    expected_trend = (np.mean(series.values[7:14]) - np.mean(series.values[:7])) / 7
    assert state.trend == pytest.approx(float(expected_trend))


def test_initialize_constant_series():
    series = TimeSeries.from_values("c", date(2020, 1, 1), [42.0] * 20)
    state = initialize(series, 7)
    assert state.level == 42.0
    assert state.trend == 0.0
    assert state.seasonal == (1.0,) * 7


def test_initialize_alternating_hand_case():
    c = 10.0
    series = TimeSeries.from_values("alt", date(2020, 1, 1), [c, 2 * c, c, 2 * c])
    state = initialize(series, 2)
    assert state.level == pytest.approx(1.5 * c)
    assert state.seasonal == pytest.approx((2.0 / 3.0, 4.0 / 3.0))


def test_initialize_needs_two_seasons_and_positive_data():
    short = TimeSeries.from_values("s", date(2020, 1, 1), [1.0] * 10)
    with pytest.raises(InsufficientData):
        initialize(short, 7)
    with_zero = TimeSeries.from_values("s", date(2020, 1, 1), [1.0] * 13 + [0.0])
    with pytest.raises(PositivityError):
        initialize(with_zero, 7)


def test_fit_learns_weekly_pattern():
    series = weekly_series()
    model = smoothing.fit(series)
    assert not model.holt_fallback
    assert model.params.m == DEFAULT_SEASON_LENGTH
    fc = smoothing.forecast(model, 14)
    # forecast keeps oscillating with roughly the training amplitude
    swing = (max(fc.point) - min(fc.point)) / np.mean(fc.point)
    assert swing > 0.3
    # and one-step errors are far smaller than the seasonal swing itself
    assert model.sigma_res < 0.15 * float(np.mean(series.values))


def test_fit_falls_back_to_holt_on_seasonless_data():
    series = TimeSeries.from_values("const", date(2020, 1, 1), [100.0] * 40)
    model = smoothing.fit(series)
    assert model.holt_fallback
    assert model.params.gamma == 0.0
    assert all(s == 1.0 for s in model.state.seasonal)
    fc = smoothing.forecast(model, 6)
    assert fc.point == pytest.approx((100.0,) * 6)


def test_fit_reproduces_recursion_generated_series():
    """Data built from the model's own forward recursion is fit near-exactly."""
    profile = np.array([0.8, 1.1, 0.95, 1.15])
    profile = profile / profile.mean()
    y = 80.0 * profile[np.arange(64) % 4]
    series = TimeSeries.from_values("gen", date(2020, 1, 1), y)
    model = smoothing.fit(series, m=4)
    res = np.asarray(model.residuals[4:])
    assert float(res @ res) < 1e-6 * float(y @ y)


def test_fit_rejects_nonpositive_series():
    values = [50.0] * 20 + [0.0] + [50.0] * 20
    series = TimeSeries.from_values("s", date(2020, 1, 1), values)
    with pytest.raises(PositivityError):
        smoothing.fit(series)


def test_fit_deterministic(noisy_curve):
    a = smoothing.fit(noisy_curve)
    b = smoothing.fit(noisy_curve)
    assert a.params == b.params
    assert a.fitted == b.fitted


def test_interval_width_grows_with_horizon():
    model = smoothing.fit(weekly_series())
    fc = smoothing.forecast(model, 10)
    for k in range(10):
        width = fc.upper90[k] - fc.point[k]
        assert width == pytest.approx(Z90 * model.sigma_res * np.sqrt(k + 1), rel=1e-9)


def test_forecast_rejects_bad_horizon():
    model = smoothing.fit(weekly_series())
    with pytest.raises(ValueError):
        smoothing.forecast(model, 0)


def test_json_round_trip_preserves_forecasts():
    model = smoothing.fit(weekly_series())
    loaded = smoothing.from_json(smoothing.to_json(model))
    fa = smoothing.forecast(model, 10)
    fb = smoothing.forecast(loaded, 10)
    assert fa.point == fb.point
    assert fa.upper90 == fb.upper90
