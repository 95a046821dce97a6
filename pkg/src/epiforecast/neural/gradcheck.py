"""Finite-difference verification of the hand-written backpropagation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import OutOfRange
from . import lstm as lstm_mod
from . import narnn as narnn_mod
from .lstm import LstmModel
from .narnn import NarnnModel


@dataclass(frozen=True)
class GradCheckReport:
    max_rel: float
    max_abs: float
    n_params: int


def _compare(
    loss_fn, params: list[np.ndarray], analytic: list[np.ndarray], eps: float
) -> GradCheckReport:
    max_rel = 0.0
    max_abs = 0.0
    count = 0
    for k, block in enumerate(params):
        flat = block.ravel()
        grad_flat = np.asarray(analytic[k]).ravel()
        for j in range(flat.size):
            original = flat[j]
            flat[j] = original + eps
            up = loss_fn(params)
            flat[j] = original - eps
            down = loss_fn(params)
            flat[j] = original
            numeric = (up - down) / (2.0 * eps)
            a = float(grad_flat[j])
            diff = abs(a - numeric)
            max_abs = max(max_abs, diff)
            max_rel = max(max_rel, diff / max(abs(a), abs(numeric), 1e-8))
            count += 1
    return GradCheckReport(max_rel=max_rel, max_abs=max_abs, n_params=count)


def grad_check(
    model: NarnnModel | LstmModel, x: np.ndarray, y: np.ndarray, eps: float = 1e-5
) -> GradCheckReport:
    """Max discrepancy between analytic and central-difference gradients.

    ``x`` and ``y`` are a training batch in the model's scaled space.
    """
    if not 1e-7 <= eps <= 1e-4:
        raise OutOfRange(f"eps must lie in [1e-7, 1e-4], got {eps}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)

    if isinstance(model, NarnnModel):
        params = [
            model.w_in.copy(),
            model.b_in.copy(),
            model.w_out.copy(),
            np.array(model.b_out),
        ]

        def loss_fn(ps):
            pred = narnn_mod._forward(x, ps[0], ps[1], ps[2], float(ps[3]))
            return float(np.mean((pred - y) ** 2))

        _, grads = narnn_mod._loss_and_grads(
            x, y, params[0], params[1], params[2], float(params[3])
        )
        return _compare(loss_fn, params, [np.asarray(g) for g in grads], eps)

    if isinstance(model, LstmModel):
        keys = sorted(model.weights) + ["w_out", "b_out"]
        full = dict(model.weights)
        full["w_out"] = model.w_out
        full["b_out"] = np.array(model.b_out)
        params = [full[k].astype(float).copy() for k in keys]

        def loss_fn(ps):
            d = {k: ps[i] for i, k in enumerate(keys)}
            pred, _, _ = lstm_mod._forward_batch(x, d)
            return float(np.mean((pred - y) ** 2))

        d0 = {k: params[i] for i, k in enumerate(keys)}
        _, grads = lstm_mod._loss_and_grads(x, y, d0)
        return _compare(loss_fn, params, [np.asarray(grads[k]) for k in keys], eps)

    raise TypeError(f"unsupported model type {type(model).__name__}")
