"""Daily epidemic-case forecasting: classical, neural, and hybrid models."""

__version__ = "0.1.0"

from .series import TimeSeries, ForecastResult, Z90

__all__ = ["TimeSeries", "ForecastResult", "Z90", "__version__"]
