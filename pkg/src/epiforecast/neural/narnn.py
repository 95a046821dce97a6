"""Nonlinear autoregressive network: lagged inputs, one tanh layer, linear out.

Trained full-batch with adaptive-moment gradient descent from a seeded
initialization. Residual inputs are signed, so scaling is symmetric around
zero rather than min-max. When the lag count is left unset, it is chosen
from {3, 5, 7} by closed-loop validation error on the last ten training
points.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from ..errors import DegenerateScale, DivergenceError, InsufficientData, ShapeError
from ..series import TimeSeries

LAG_CANDIDATES = (3, 5, 7)
VALIDATION_POINTS = 10
_ADAM_B1 = 0.9
_ADAM_B2 = 0.999
_ADAM_EPS = 1e-8


@dataclass(frozen=True)
class NarnnConfig:
    lags: int | None = None
    hidden: int = 10
    epochs: int = 500
    learning_rate: float = 0.01
    seed: int = 0
    restarts: int = 5

    def __post_init__(self):
        if self.lags is not None and self.lags < 1:
            raise ShapeError(f"lags must be >= 1, got {self.lags}")
        if self.hidden < 1:
            raise ShapeError(f"hidden must be >= 1, got {self.hidden}")
        if self.restarts < 1:
            raise ShapeError(f"restarts must be >= 1, got {self.restarts}")


@dataclass(frozen=True, eq=False)
class NarnnModel:
    name: str
    w_in: np.ndarray  # (hidden, lags)
    b_in: np.ndarray  # (hidden,)
    w_out: np.ndarray  # (hidden,)
    b_out: float
    max_abs: float
    config: NarnnConfig
    final_loss: float


def _symmetric_scale(values: np.ndarray) -> tuple[np.ndarray, float]:
    max_abs = float(np.max(np.abs(values)))
    if max_abs == 0.0:
        raise DegenerateScale("all residuals are zero; nothing to learn")
    return values / max_abs, max_abs


def _embed(scaled: np.ndarray, lags: int) -> tuple[np.ndarray, np.ndarray]:
    """Rows are chronological windows (r_{t-n} .. r_{t-1}), target r_t."""
    n = scaled.size - lags
    x = np.column_stack([scaled[i : i + n] for i in range(lags)])
    return x, scaled[lags:]


def _forward(x: np.ndarray, w_in, b_in, w_out, b_out) -> np.ndarray:
    return np.tanh(x @ w_in.T + b_in) @ w_out + b_out


def _loss_and_grads(x, y, w_in, b_in, w_out, b_out):
    n = y.size
    hidden_act = np.tanh(x @ w_in.T + b_in)
    pred = hidden_act @ w_out + b_out
    err = pred - y
    loss = float(err @ err) / n
    d_pred = 2.0 * err / n
    g_w_out = hidden_act.T @ d_pred
    g_b_out = float(d_pred.sum())
    d_hidden = np.outer(d_pred, w_out) * (1.0 - hidden_act**2)
    g_w_in = d_hidden.T @ x
    g_b_in = d_hidden.sum(axis=0)
    return loss, (g_w_in, g_b_in, g_w_out, g_b_out)


def _train_once(
    x: np.ndarray, y: np.ndarray, hidden: int, epochs: int, lr: float, rng
) -> tuple[float, tuple]:
    lags = x.shape[1]
    lim_in = np.sqrt(6.0 / (lags + hidden))
    lim_out = np.sqrt(6.0 / (hidden + 1))
    w_in = rng.uniform(-lim_in, lim_in, size=(hidden, lags))
    b_in = np.zeros(hidden)
    w_out = rng.uniform(-lim_out, lim_out, size=hidden)
    b_out = 0.0

    params = [w_in, b_in, w_out, np.array(b_out)]
    moment1 = [np.zeros_like(p) for p in params]
    moment2 = [np.zeros_like(p) for p in params]
    for epoch in range(1, epochs + 1):
        loss, grads = _loss_and_grads(x, y, params[0], params[1], params[2], float(params[3]))
        if not np.isfinite(loss):
            raise DivergenceError(
                "training loss is not finite; try a lower learning rate"
            )
        for k, g in enumerate(grads):
            moment1[k] = _ADAM_B1 * moment1[k] + (1 - _ADAM_B1) * np.asarray(g)
            moment2[k] = _ADAM_B2 * moment2[k] + (1 - _ADAM_B2) * np.asarray(g) ** 2
            m_hat = moment1[k] / (1 - _ADAM_B1**epoch)
            v_hat = moment2[k] / (1 - _ADAM_B2**epoch)
            params[k] = params[k] - lr * m_hat / (np.sqrt(v_hat) + _ADAM_EPS)

    w_in, b_in, w_out, b_out = params[0], params[1], params[2], float(params[3])
    final_pred = _forward(x, w_in, b_in, w_out, b_out)
    final_loss = float(np.mean((final_pred - y) ** 2))
    return final_loss, (w_in, b_in, w_out, b_out)


def _fit_fixed_lags(residuals: TimeSeries, config: NarnnConfig, lags: int) -> NarnnModel:
    if len(residuals) <= lags + 10:
        raise InsufficientData(
            f"need more than {lags + 10} residuals for {lags} lags, got {len(residuals)}"
        )
    scaled, max_abs = _symmetric_scale(residuals.to_array())
    x, y = _embed(scaled, lags)

    best = None
    for restart in range(config.restarts):
        rng = np.random.default_rng([config.seed, restart])
        loss, weights = _train_once(
            x, y, config.hidden, config.epochs, config.learning_rate, rng
        )
        if best is None or loss < best[0]:
            best = (loss, restart, weights)

    loss, _, (w_in, b_in, w_out, b_out) = best
    return NarnnModel(
        name=residuals.name,
        w_in=w_in,
        b_in=b_in,
        w_out=w_out,
        b_out=b_out,
        max_abs=max_abs,
        config=replace(config, lags=lags),
        final_loss=loss,
    )


def narnn_fit(residuals: TimeSeries, config: NarnnConfig) -> NarnnModel:
    """Train on a residual series; best of ``restarts`` seeded trainings."""
    if config.lags is not None:
        return _fit_fixed_lags(residuals, config, config.lags)

    values = residuals.to_array()
    feasible = [
        n
        for n in LAG_CANDIDATES
        if len(residuals) - VALIDATION_POINTS > n + 10
    ]
    if not feasible:
        return _fit_fixed_lags(residuals, config, LAG_CANDIDATES[0])

    head = residuals.slice(0, len(residuals) - VALIDATION_POINTS)
    target = values[len(residuals) - VALIDATION_POINTS :]
    scores = []
    for n in feasible:
        candidate = _fit_fixed_lags(head, config, n)
        preds = narnn_forecast(
            candidate, head.values[len(head) - n :], VALIDATION_POINTS
        )
        scores.append((float(np.mean((np.asarray(preds) - target) ** 2)), n))
    best_lags = min(scores)[1]
    return _fit_fixed_lags(residuals, config, best_lags)


def narnn_forecast(
    model: NarnnModel, seed_window: tuple[float, ...], h: int
) -> tuple[float, ...]:
    """Closed-loop recursion: each prediction joins the next input window."""
    lags = model.config.lags
    if len(seed_window) != lags:
        raise ShapeError(f"seed window must have {lags} values, got {len(seed_window)}")
    if h < 1:
        raise ValueError("horizon must be >= 1")
    window = list(np.asarray(seed_window, dtype=float) / model.max_abs)
    out = []
    for _ in range(h):
        pred = float(
            _forward(np.asarray(window[-lags:]).reshape(1, -1),
                     model.w_in, model.b_in, model.w_out, model.b_out)[0]
        )
        window.append(pred)
        out.append(pred * model.max_abs)
    return tuple(out)


def narnn_to_dict(model: NarnnModel) -> dict:
    return {
        "model": "narnn",
        "name": model.name,
        "lags": model.config.lags,
        "hidden": model.config.hidden,
        "epochs": model.config.epochs,
        "learning_rate": model.config.learning_rate,
        "seed": model.config.seed,
        "restarts": model.config.restarts,
        "w_in": model.w_in.tolist(),
        "b_in": model.b_in.tolist(),
        "w_out": model.w_out.tolist(),
        "b_out": model.b_out,
        "max_abs": model.max_abs,
        "final_loss": model.final_loss,
    }


def narnn_from_dict(doc: dict) -> NarnnModel:
    config = NarnnConfig(
        lags=doc["lags"],
        hidden=doc["hidden"],
        epochs=doc["epochs"],
        learning_rate=doc["learning_rate"],
        seed=doc["seed"],
        restarts=doc["restarts"],
    )
    return NarnnModel(
        name=doc["name"],
        w_in=np.asarray(doc["w_in"], dtype=float),
        b_in=np.asarray(doc["b_in"], dtype=float),
        w_out=np.asarray(doc["w_out"], dtype=float),
        b_out=doc["b_out"],
        max_abs=doc["max_abs"],
        config=config,
        final_loss=doc["final_loss"],
    )


def narnn_to_json(model: NarnnModel) -> str:
    return json.dumps(narnn_to_dict(model))


def narnn_from_json(text: str) -> NarnnModel:
    return narnn_from_dict(json.loads(text))
