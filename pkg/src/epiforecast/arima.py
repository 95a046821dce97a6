"""Box-Jenkins ARIMA(p,d,q): estimation, order selection, and forecasting.

Estimation minimizes the conditional sum of squared innovations (zero
pre-sample errors, conditioning on the first ``p`` differenced values),
initialized by Hannan-Rissanen long-AR regression and polished with the
in-house Nelder-Mead. Pure-AR models (q=0) reduce to ordinary least squares
and are solved exactly.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, replace
from datetime import date

import numpy as np
from scipy.signal import lfilter

from .errors import (
    ConvergenceError,
    InsufficientData,
    InvalidParams,
    NoViableModel,
)
from .optim import nelder_mead
from .series import ONE_DAY, Z90, DiffState, ForecastResult, TimeSeries, difference

DEFAULT_GRID = (5, 2, 5)


class StationarityWarning(UserWarning):
    """Estimated AR polynomial has a root on or inside the unit circle."""


@dataclass(frozen=True)
class ArimaOrder:
    p: int
    d: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.d < 0 or self.q < 0:
            raise InvalidParams("orders must be non-negative")

    def label(self) -> str:
        return f"({self.p},{self.d},{self.q})"


@dataclass(frozen=True)
class ArimaParams:
    phi: tuple[float, ...]
    theta: tuple[float, ...]
    intercept: float
    sigma2: float


@dataclass(frozen=True)
class ArimaModel:
    name: str
    order: ArimaOrder
    params: ArimaParams
    diff_state: DiffState
    fitted: tuple[float, ...]
    residuals: tuple[float, ...]
    resid_dates: tuple[date, ...]
    train_tail: tuple[float, ...]
    innovation_tail: tuple[float, ...]
    last_date: date
    aicc: float


def _min_root_modulus(coeffs: np.ndarray) -> float:
    """Smallest root modulus of 1 - c1*z - ... - ck*z^k (inf when k == 0)."""
    coeffs = np.asarray(coeffs, dtype=float)
    while coeffs.size and coeffs[-1] == 0.0:
        coeffs = coeffs[:-1]
    if coeffs.size == 0:
        return np.inf
    roots = np.roots(np.concatenate((-coeffs[::-1], [1.0])))
    if roots.size == 0:
        return np.inf
    return float(np.min(np.abs(roots)))


def _roots_outside(coeffs: np.ndarray, margin: float = 1.001) -> bool:
    """True iff every root of 1 - c1*z - ... - ck*z^k has modulus > margin.

    Schur-Cohn recursion on the reversed, margin-scaled polynomial; equivalent
    to ``_min_root_modulus(coeffs) > margin`` but without an eigenvalue solve.
    """
    c = np.asarray(coeffs, dtype=float)
    while c.size and c[-1] == 0.0:
        c = c[:-1]
    if c.size == 0:
        return True
    scaled = c * margin ** np.arange(1, c.size + 1)
    a = np.concatenate(([1.0], -scaled))  # descending powers of z**k * f(1/z)
    for _ in range(c.size):
        if not abs(a[-1]) < abs(a[0]):
            return False
        a = (a[0] * a - a[-1] * a[::-1])[:-1]
    return True


def _lag_matrix(w: np.ndarray, p: int) -> np.ndarray:
    """Rows t = p..m-1, columns w[t-1], ..., w[t-p]."""
    m = w.size
    return np.column_stack([w[p - i : m - i] for i in range(1, p + 1)])


def _innovations(
    w: np.ndarray, p: int, q: int, phi: np.ndarray, theta: np.ndarray, intercept: float
) -> np.ndarray:
    """Innovation sequence e_t for t = p..m-1 with zero pre-sample errors."""
    a = w[p:] - intercept
    if p:
        a = a - _lag_matrix(w, p) @ phi
    if q == 0:
        return a
    # e_t = a_t + theta_1 e_{t-1} + ... + theta_q e_{t-q}: an AR filter on a.
    return lfilter([1.0], np.concatenate(([1.0], -np.asarray(theta))), a)


def _aicc(sigma2: float, n_eff: int, k: int) -> float:
    if n_eff - k - 1 <= 0:
        # correction term blows up: the model is fittable but never selectable
        return np.inf
    aic = n_eff * np.log(max(sigma2, 1e-300)) + 2 * k
    return float(aic + 2 * k * (k + 1) / (n_eff - k - 1))


def _hannan_rissanen(
    w: np.ndarray, p: int, q: int, with_intercept: bool
) -> np.ndarray:
    """Initial (phi, theta, intercept) from long-AR residual regression."""
    m = w.size
    long_ar = int(min(max(10, 2 * (p + q)), max(p + q, (m - 1) // 3)))
    x = w[long_ar:]
    cols = [np.ones(x.size), _lag_matrix(w, long_ar)] if long_ar else [np.ones(x.size)]
    design = np.column_stack(cols)
    beta, *_ = np.linalg.lstsq(design, x, rcond=None)
    e_hat = np.concatenate((np.zeros(long_ar), x - design @ beta))

    t0 = max(p, long_ar + q)
    rows = m - t0
    target = w[t0:]
    blocks = []
    if with_intercept:
        blocks.append(np.ones(rows))
    for i in range(1, p + 1):
        blocks.append(w[t0 - i : m - i])
    for j in range(1, q + 1):
        blocks.append(e_hat[t0 - j : m - j])
    design2 = np.column_stack(blocks)
    beta2, *_ = np.linalg.lstsq(design2, target, rcond=None)

    idx = 1 if with_intercept else 0
    phi = beta2[idx : idx + p]
    theta = -beta2[idx + p : idx + p + q]
    intercept = beta2[0] if with_intercept else 0.0

    # Shrink toward zero until the start point is stationary and invertible.
    for _ in range(200):
        if _min_root_modulus(phi) > 1.001 and _min_root_modulus(theta) > 1.001:
            break
        phi = phi * 0.95
        theta = theta * 0.95

    out = np.concatenate((phi, theta, [intercept] if with_intercept else []))
    return out


def fit(
    series: TimeSeries,
    order: ArimaOrder,
    with_intercept: bool | None = None,
    max_fev: int | None = None,
) -> ArimaModel:
    """Estimate an ARIMA model by conditional sum of squares."""
    p, d, q = order.p, order.d, order.q
    if with_intercept is None:
        # Drift on a double-differenced scale produces exploding quadratic
        # trends over a 10-step horizon, so the intercept is limited to d <= 1.
        with_intercept = d <= 1
    if d > 1:
        with_intercept = False
    n_free = p + q + int(with_intercept)
    min_len = d + max(p, q) + (20 if n_free else 2)
    if len(series) < min_len:
        raise InsufficientData(
            f"order {order.label()} needs at least {min_len} points, got {len(series)}"
        )

    diffed, diff_state = difference(series, d)
    w = diffed.to_array()
    m = w.size
    n_eff = m - p

    converged = True
    if q == 0:
        blocks = []
        if with_intercept:
            blocks.append(np.ones(n_eff))
        if p:
            blocks.append(_lag_matrix(w, p))
        if blocks:
            design = np.column_stack(blocks)
            beta, *_ = np.linalg.lstsq(design, w[p:], rcond=None)
            intercept = float(beta[0]) if with_intercept else 0.0
            phi = beta[1:] if with_intercept else beta
        else:
            intercept, phi = 0.0, np.zeros(0)
        theta = np.zeros(0)
        e = _innovations(w, p, q, phi, theta, intercept)
    else:
        x0 = _hannan_rissanen(w, p, q, with_intercept)
        e0 = _innovations(w, p, q, x0[:p], x0[p : p + q], x0[p + q] if with_intercept else 0.0)
        penalty_scale = max(float(e0 @ e0), float(w @ w) / max(m, 1), 1e-8)
        lagm = _lag_matrix(w, p) if p else None
        w_head = w[p:]
        ma_poly = np.empty(q + 1)
        ma_poly[0] = 1.0

        def objective(vec: np.ndarray) -> float:
            phi_v = vec[:p]
            theta_v = vec[p : p + q]
            if not (_roots_outside(phi_v) and _roots_outside(theta_v)):
                excess = max(0.0, 1.001 - _min_root_modulus(phi_v)) + max(
                    0.0, 1.001 - _min_root_modulus(theta_v)
                )
                if excess > 0.0:
                    return penalty_scale * (10.0 + 100.0 * excess)
            a = w_head - (vec[p + q] if with_intercept else 0.0)
            if p:
                a = a - lagm @ phi_v
            ma_poly[1:] = -theta_v
            ev = lfilter([1.0], ma_poly, a)
            css = float(ev @ ev)
            return css if np.isfinite(css) else penalty_scale * 1e3

        budget = max_fev if max_fev is not None else 300 + 180 * x0.size
        result = nelder_mead(objective, x0, step=0.1, frtol=1e-9, max_fev=budget)
        best = result.x if result.fun <= objective(x0) else x0
        phi = best[:p]
        theta = best[p : p + q]
        intercept = float(best[p + q]) if with_intercept else 0.0
        e = _innovations(w, p, q, phi, theta, intercept)
        converged = result.converged

    css = float(e @ e)
    sigma2 = css / n_eff
    k = n_free + 1  # free coefficients plus the innovation variance
    aicc = _aicc(sigma2, n_eff, k)

    if p and _min_root_modulus(phi) <= 1.0:
        warnings.warn(
            f"AR polynomial of {order.label()} has a root inside the unit circle",
            StationarityWarning,
            stacklevel=2,
        )

    tail_len = max(p, q) + d
    obs = series.to_array()
    fitted = obs[d + p :] - e
    model = ArimaModel(
        name=series.name,
        order=order,
        params=ArimaParams(tuple(float(v) for v in phi), tuple(float(v) for v in theta), float(intercept), float(sigma2)),
        diff_state=diff_state,
        fitted=tuple(fitted),
        residuals=tuple(e),
        resid_dates=series.dates[d + p :],
        train_tail=tuple(obs[len(obs) - tail_len :]) if tail_len else (),
        innovation_tail=tuple(e[e.size - q :]) if q else (),
        last_date=series.end,
        aicc=aicc,
    )
    if not converged:
        raise ConvergenceError(
            f"CSS optimization for {order.label()} did not converge", best=model
        )
    return model


def select_order(
    series: TimeSeries,
    grid: tuple[int, int, int] = DEFAULT_GRID,
) -> ArimaOrder:
    """Smallest-AICc order over the (p,d,q) grid.

    Ties break deterministically: smaller p+q, then smaller p, then smaller d.
    """
    max_p, max_d, max_q = grid
    candidates = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", StationarityWarning)
        for d in range(max_d + 1):
            for p in range(max_p + 1):
                for q in range(max_q + 1):
                    order = ArimaOrder(p, d, q)
                    try:
                        model = fit(series, order)
                    except (InsufficientData, ConvergenceError, np.linalg.LinAlgError):
                        continue
                    candidates.append((model.aicc, p + q, p, d, q, order))
    if not candidates:
        raise NoViableModel(
            f"no ARIMA order in grid p<={max_p}, d<={max_d}, q<={max_q} could be fitted"
        )
    candidates.sort(key=lambda item: item[:5])
    return candidates[0][5]


def psi_weights(order: ArimaOrder, params: ArimaParams, h: int) -> np.ndarray:
    """First ``h`` impulse-response weights of the integrated process."""
    p, d, q = order.p, order.d, order.q
    phi, theta = params.phi, params.theta
    psi = np.zeros(h)
    psi[0] = 1.0
    for j in range(1, h):
        acc = sum(phi[i] * psi[j - 1 - i] for i in range(min(j, p)))
        if j <= q:
            acc -= theta[j - 1]
        psi[j] = acc
    for _ in range(d):
        psi = np.cumsum(psi)
    return psi


def forecast(model: ArimaModel, h: int) -> ForecastResult:
    """Recursive point forecasts with analytic 90% bounds."""
    if h < 1:
        raise ValueError("horizon must be >= 1")
    p, d, q = model.order.p, model.order.d, model.order.q
    phi = np.asarray(model.params.phi)
    theta = np.asarray(model.params.theta)
    c = model.params.intercept

    work = np.asarray(model.train_tail, dtype=float)
    levels_last = []
    for _ in range(d):
        levels_last.append(float(work[-1]))
        work = np.diff(work)
    w_hist = list(work[-p:]) if p else []
    e_hist = list(model.innovation_tail)

    points = []
    for _ in range(h):
        what = c
        for i in range(p):
            what += phi[i] * w_hist[-1 - i]
        for j in range(q):
            what -= theta[j] * e_hist[-1 - j]
        if p:
            w_hist.append(what)
        if q:
            e_hist.append(0.0)
        value = what
        for k in range(d - 1, -1, -1):
            levels_last[k] += value
            value = levels_last[k]
        points.append(float(value))

    psi = psi_weights(model.order, model.params, h)
    se = np.sqrt(model.params.sigma2 * np.cumsum(psi**2))
    points = np.asarray(points)
    dates = tuple(model.last_date + (k + 1) * ONE_DAY for k in range(h))
    return ForecastResult(
        model="arima",
        dates=dates,
        point=tuple(points),
        lower90=tuple(points - Z90 * se),
        upper90=tuple(points + Z90 * se),
        config={"order": model.order.label(), "intercept": model.params.intercept},
    )


def residual_series(model: ArimaModel) -> TimeSeries:
    """In-sample one-step residuals, dated to their observations."""
    return TimeSeries(model.name, model.resid_dates, model.residuals)


def simulate(
    order: ArimaOrder, params: ArimaParams, n: int, seed: int, start: date = date(2020, 1, 1)
) -> TimeSeries:
    """Gaussian ARIMA sample path, deterministic for a fixed seed."""
    p, d, q = order.p, order.d, order.q
    if _min_root_modulus(params.phi) <= 1.0:
        raise InvalidParams("AR polynomial must have all roots outside the unit circle")
    if _min_root_modulus(params.theta) <= 1.0:
        raise InvalidParams("MA polynomial must have all roots outside the unit circle")
    rng = np.random.default_rng(seed)
    burn = 200 + 10 * max(p, q)
    eps = rng.normal(0.0, np.sqrt(params.sigma2), burn + n)
    w = np.zeros(burn + n)
    for t in range(burn + n):
        acc = params.intercept + eps[t]
        for i in range(min(t, p)):
            acc += params.phi[i] * w[t - 1 - i]
        for j in range(min(t, q)):
            acc -= params.theta[j] * eps[t - 1 - j]
        w[t] = acc
    y = w[burn:]
    for _ in range(d):
        y = np.cumsum(y)
    return TimeSeries.from_values(f"sim{order.label()}", start, y)


def to_json(model: ArimaModel) -> str:
    """Flat JSON document; reals survive round-trip at full precision."""
    doc = {
        "model": "arima",
        "name": model.name,
        "order": {"p": model.order.p, "d": model.order.d, "q": model.order.q},
        "phi": list(model.params.phi),
        "theta": list(model.params.theta),
        "intercept": model.params.intercept,
        "sigma2": model.params.sigma2,
        "diff_seeds": list(model.diff_state.seeds),
        "train_tail": list(model.train_tail),
        "innovation_tail": list(model.innovation_tail),
        "last_date": model.last_date.isoformat(),
        "aicc": model.aicc,
    }
    return json.dumps(doc)


def from_json(text: str) -> ArimaModel:
    """Rebuild a model for forecasting; in-sample arrays are not persisted."""
    doc = json.loads(text)
    order = ArimaOrder(doc["order"]["p"], doc["order"]["d"], doc["order"]["q"])
    return ArimaModel(
        name=doc["name"],
        order=order,
        params=ArimaParams(tuple(doc["phi"]), tuple(doc["theta"]), doc["intercept"], doc["sigma2"]),
        diff_state=DiffState(order.d, tuple(doc["diff_seeds"])),
        fitted=(),
        residuals=(),
        resid_dates=(),
        train_tail=tuple(doc["train_tail"]),
        innovation_tail=tuple(doc["innovation_tail"]),
        last_date=date.fromisoformat(doc["last_date"]),
        aicc=doc["aicc"],
    )
