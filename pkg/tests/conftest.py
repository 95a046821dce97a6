import numpy as np
import pytest

from epiforecast.ingest import (
    DEFAULT_INTERVALS,
    aggregate_country,
    parse_jhu_csv,
    sample_csv_text,
    slice_for_interval,
)
from epiforecast.series import SplitSpec, TimeSeries, train_test_split
from datetime import date


@pytest.fixture(scope="session")
def sample_table():
    return parse_jhu_csv(sample_csv_text())


@pytest.fixture(scope="session")
def india_series(sample_table):
    return aggregate_country(sample_table, "India")


@pytest.fixture(scope="session")
def india_aug_split(india_series):
    """(train, test) for the 1-10 Aug window on the bundled data."""
    window = slice_for_interval(india_series, DEFAULT_INTERVALS[2])
    return train_test_split(window, SplitSpec(test_len=10))


@pytest.fixture
def short_ramp():
    return TimeSeries.from_values("ramp", date(2020, 3, 1), [float(v) for v in range(1, 31)])


@pytest.fixture
def noisy_curve():
    rng = np.random.default_rng(42)
    t = np.arange(120.0)
    values = 50 + 2.0 * t + 8 * np.sin(2 * np.pi * t / 7) + rng.normal(0, 1.5, 120)
    return TimeSeries.from_values("curve", date(2020, 2, 1), np.maximum(values, 1.0))
