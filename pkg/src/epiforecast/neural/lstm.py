"""Single-layer LSTM trained from scratch with backpropagation through time.

Each training example is a sliding window of the min-max scaled series;
the network reads the window one value at a time from zero initial state
and predicts the next value through a linear head on the final hidden
state. Multi-step forecasts are closed-loop.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import date

import numpy as np

from ..errors import DivergenceError, InsufficientData, ShapeError
from ..series import (
    ONE_DAY,
    Z90,
    ForecastResult,
    ScaleState,
    TimeSeries,
    minmax_scale,
)

_ADAM_B1 = 0.9
_ADAM_B2 = 0.999
_ADAM_EPS = 1e-8

GATES = ("f", "i", "c", "o")


@dataclass(frozen=True)
class LstmConfig:
    window: int = 5
    hidden: int = 16
    epochs: int = 300
    learning_rate: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.window < 1:
            raise ShapeError(f"window must be >= 1, got {self.window}")
        if self.hidden < 1:
            raise ShapeError(f"hidden must be >= 1, got {self.hidden}")


@dataclass(frozen=True, eq=False)
class LstmModel:
    name: str
    config: LstmConfig
    weights: dict[str, np.ndarray]  # W_f/W_i/W_c/W_o: (H, H+1); b_*: (H,)
    w_out: np.ndarray  # (H,)
    b_out: float
    scale: ScaleState
    last_window: tuple[float, ...]  # scaled
    sigma_res: float
    final_loss: float
    loss_curve: tuple[float, ...]
    last_date: date


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def lstm_cell(
    x: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray, model: LstmModel
) -> tuple[np.ndarray, np.ndarray]:
    """One gated update: returns the new hidden and cell vectors."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h_prev = np.asarray(h_prev, dtype=float)
    c_prev = np.asarray(c_prev, dtype=float)
    hidden = model.weights["W_f"].shape[0]
    expected_cols = model.weights["W_f"].shape[1]
    if h_prev.shape != (hidden,) or c_prev.shape != (hidden,):
        raise ShapeError(
            f"state vectors must have shape ({hidden},), got {h_prev.shape} and {c_prev.shape}"
        )
    if hidden + x.size != expected_cols:
        raise ShapeError(
            f"input of size {x.size} does not match weight columns {expected_cols} "
            f"(hidden {hidden})"
        )
    z = np.concatenate((h_prev, x))
    f = _sigmoid(model.weights["W_f"] @ z + model.weights["b_f"])
    i = _sigmoid(model.weights["W_i"] @ z + model.weights["b_i"])
    c_bar = np.tanh(model.weights["W_c"] @ z + model.weights["b_c"])
    o = _sigmoid(model.weights["W_o"] @ z + model.weights["b_o"])
    c = f * c_prev + i * c_bar
    h = o * np.tanh(c)
    return h, c


def window_embed(scaled: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    """Sliding windows (rows, chronological) and next-value targets."""
    n = scaled.size - window
    x = np.column_stack([scaled[i : i + n] for i in range(window)])
    return x, scaled[window:]


def _forward_batch(x: np.ndarray, params: dict, keep_cache: bool = False):
    """Run the unrolled cell over a batch of windows; optionally cache gates."""
    batch, steps = x.shape
    hidden = params["W_f"].shape[0]
    h = np.zeros((batch, hidden))
    c = np.zeros((batch, hidden))
    cache = []
    for t in range(steps):
        z = np.column_stack((h, x[:, t]))
        f = _sigmoid(z @ params["W_f"].T + params["b_f"])
        i = _sigmoid(z @ params["W_i"].T + params["b_i"])
        c_bar = np.tanh(z @ params["W_c"].T + params["b_c"])
        o = _sigmoid(z @ params["W_o"].T + params["b_o"])
        c_new = f * c + i * c_bar
        tanh_c = np.tanh(c_new)
        h_new = o * tanh_c
        if keep_cache:
            cache.append((z, f, i, c_bar, o, c, c_new, tanh_c))
        h, c = h_new, c_new
    pred = h @ params["w_out"] + params["b_out"]
    return pred, h, cache


def _loss_and_grads(x: np.ndarray, y: np.ndarray, params: dict):
    batch = y.size
    pred, h_final, cache = _forward_batch(x, params, keep_cache=True)
    err = pred - y
    loss = float(err @ err) / batch

    grads = {k: np.zeros_like(v) for k, v in params.items()}
    d_pred = 2.0 * err / batch
    grads["w_out"] = h_final.T @ d_pred
    grads["b_out"] = np.array(d_pred.sum())
    dh = np.outer(d_pred, params["w_out"])
    dc_carry = np.zeros_like(dh)
    hidden = dh.shape[1]
    for t in range(x.shape[1] - 1, -1, -1):
        z, f, i, c_bar, o, c_prev, c_new, tanh_c = cache[t]
        do = dh * tanh_c
        dc = dh * o * (1.0 - tanh_c**2) + dc_carry
        df = dc * c_prev
        di = dc * c_bar
        dc_bar = dc * i
        dz_f = df * f * (1.0 - f)
        dz_i = di * i * (1.0 - i)
        dz_o = do * o * (1.0 - o)
        dz_c = dc_bar * (1.0 - c_bar**2)
        grads["W_f"] += dz_f.T @ z
        grads["W_i"] += dz_i.T @ z
        grads["W_c"] += dz_c.T @ z
        grads["W_o"] += dz_o.T @ z
        grads["b_f"] += dz_f.sum(axis=0)
        grads["b_i"] += dz_i.sum(axis=0)
        grads["b_c"] += dz_c.sum(axis=0)
        grads["b_o"] += dz_o.sum(axis=0)
        dz = dz_f @ params["W_f"] + dz_i @ params["W_i"] + dz_c @ params["W_c"] + dz_o @ params["W_o"]
        dh = dz[:, :hidden]
        dc_carry = dc * f
    return loss, grads


def _init_params(config: LstmConfig, rng) -> dict:
    hidden = config.hidden
    cols = hidden + 1
    lim_gate = np.sqrt(6.0 / (cols + hidden))
    lim_out = np.sqrt(6.0 / (hidden + 1))
    params = {}
    for gate in GATES:
        params[f"W_{gate}"] = rng.uniform(-lim_gate, lim_gate, size=(hidden, cols))
        params[f"b_{gate}"] = np.zeros(hidden)
    params["w_out"] = rng.uniform(-lim_out, lim_out, size=hidden)
    params["b_out"] = np.array(0.0)
    return params


def lstm_fit(series: TimeSeries, config: LstmConfig) -> LstmModel:
    """Train on min-max scaled sliding windows; deterministic per seed."""
    if len(series) <= config.window + 10:
        raise InsufficientData(
            f"need more than {config.window + 10} points for window {config.window}, "
            f"got {len(series)}"
        )
    scaled_series, scale = minmax_scale(series)
    scaled = scaled_series.to_array()
    x, y = window_embed(scaled, config.window)

    rng = np.random.default_rng(config.seed)
    params = _init_params(config, rng)
    moment1 = {k: np.zeros_like(v) for k, v in params.items()}
    moment2 = {k: np.zeros_like(v) for k, v in params.items()}
    curve = []
    for epoch in range(1, config.epochs + 1):
        loss, grads = _loss_and_grads(x, y, params)
        if not np.isfinite(loss):
            raise DivergenceError(
                "training loss is not finite; try a lower learning rate"
            )
        curve.append(loss)
        for k in params:
            moment1[k] = _ADAM_B1 * moment1[k] + (1 - _ADAM_B1) * grads[k]
            moment2[k] = _ADAM_B2 * moment2[k] + (1 - _ADAM_B2) * grads[k] ** 2
            m_hat = moment1[k] / (1 - _ADAM_B1**epoch)
            v_hat = moment2[k] / (1 - _ADAM_B2**epoch)
            params[k] = params[k] - config.learning_rate * m_hat / (np.sqrt(v_hat) + _ADAM_EPS)

    pred, _, _ = _forward_batch(x, params)
    final_loss = float(np.mean((pred - y) ** 2))
    span = scale.max - scale.min
    sigma_res = float(np.sqrt(np.mean((span * (pred - y)) ** 2)))

    weights = {k: params[k] for k in params if k not in ("w_out", "b_out")}
    return LstmModel(
        name=series.name,
        config=config,
        weights=weights,
        w_out=params["w_out"],
        b_out=float(params["b_out"]),
        scale=scale,
        last_window=tuple(scaled[-config.window :]),
        sigma_res=sigma_res,
        final_loss=final_loss,
        loss_curve=tuple(curve),
        last_date=series.end,
    )


def lstm_forecast(model: LstmModel, h: int) -> ForecastResult:
    """Closed-loop forecast from the final training window."""
    if h < 1:
        raise ValueError("horizon must be >= 1")
    params = dict(model.weights)
    params["w_out"] = model.w_out
    params["b_out"] = np.array(model.b_out)
    window = list(model.last_window)
    w = model.config.window
    scaled_preds = []
    for _ in range(h):
        pred, _, _ = _forward_batch(np.asarray(window[-w:]).reshape(1, -1), params)
        scaled_preds.append(float(pred[0]))
        window.append(float(pred[0]))
    scale = model.scale
    points = np.asarray(scaled_preds) * (scale.max - scale.min) + scale.min
    se = model.sigma_res * np.sqrt(np.arange(1, h + 1))
    dates = tuple(model.last_date + k * ONE_DAY for k in range(1, h + 1))
    return ForecastResult(
        model="lstm",
        dates=dates,
        point=tuple(points),
        lower90=tuple(points - Z90 * se),
        upper90=tuple(points + Z90 * se),
        config={
            "window": model.config.window,
            "hidden": model.config.hidden,
            "epochs": model.config.epochs,
            "learning_rate": model.config.learning_rate,
            "seed": model.config.seed,
        },
    )


def lstm_to_json(model: LstmModel) -> str:
    doc = {
        "model": "lstm",
        "name": model.name,
        "window": model.config.window,
        "hidden": model.config.hidden,
        "epochs": model.config.epochs,
        "learning_rate": model.config.learning_rate,
        "seed": model.config.seed,
        "weights": {k: v.tolist() for k, v in model.weights.items()},
        "w_out": model.w_out.tolist(),
        "b_out": model.b_out,
        "scale": {"min": model.scale.min, "max": model.scale.max},
        "last_window": list(model.last_window),
        "sigma_res": model.sigma_res,
        "final_loss": model.final_loss,
        "last_date": model.last_date.isoformat(),
    }
    return json.dumps(doc)


def lstm_from_json(text: str) -> LstmModel:
    doc = json.loads(text)
    config = LstmConfig(
        window=doc["window"],
        hidden=doc["hidden"],
        epochs=doc["epochs"],
        learning_rate=doc["learning_rate"],
        seed=doc["seed"],
    )
    return LstmModel(
        name=doc["name"],
        config=config,
        weights={k: np.asarray(v, dtype=float) for k, v in doc["weights"].items()},
        w_out=np.asarray(doc["w_out"], dtype=float),
        b_out=doc["b_out"],
        scale=ScaleState(doc["scale"]["min"], doc["scale"]["max"]),
        last_window=tuple(doc["last_window"]),
        sigma_res=doc["sigma_res"],
        final_loss=doc["final_loss"],
        loss_curve=(),
        last_date=date.fromisoformat(doc["last_date"]),
    )
