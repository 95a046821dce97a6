"""HTTP service wrapping the forecasting core."""

from .app import app

__all__ = ["app"]
