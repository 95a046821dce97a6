"""Neural forecasters: lagged feedforward NARNN and a from-scratch LSTM."""

from .gradcheck import GradCheckReport, grad_check
from .lstm import (
    LstmConfig,
    LstmModel,
    lstm_cell,
    lstm_fit,
    lstm_forecast,
    lstm_from_json,
    lstm_to_json,
    window_embed,
)
from .narnn import (
    LAG_CANDIDATES,
    NarnnConfig,
    NarnnModel,
    narnn_fit,
    narnn_forecast,
    narnn_from_json,
    narnn_to_json,
)

__all__ = [
    "LAG_CANDIDATES",
    "GradCheckReport",
    "grad_check",
    "LstmConfig",
    "LstmModel",
    "lstm_cell",
    "lstm_fit",
    "lstm_forecast",
    "lstm_from_json",
    "lstm_to_json",
    "window_embed",
    "NarnnConfig",
    "NarnnModel",
    "narnn_fit",
    "narnn_forecast",
    "narnn_from_json",
    "narnn_to_json",
]
