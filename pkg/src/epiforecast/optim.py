"""Derivative-free minimization used by the ARIMA and smoothing fitters.

A plain Nelder-Mead simplex, kept in-house so estimation has no dependency
on an external optimizer and behaves identically everywhere. Deterministic:
no randomness, fixed expansion/contraction constants, stable tie handling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class MinimizeResult:
    x: np.ndarray
    fun: float
    nfev: int
    converged: bool


def nelder_mead(
    fn: Callable[[np.ndarray], float],
    x0: Sequence[float],
    step: float = 0.1,
    frtol: float = 1e-8,
    fatol: float = 1e-12,
    max_fev: int | None = None,
) -> MinimizeResult:
    """Minimize ``fn`` starting from ``x0``.

    The initial simplex offsets each coordinate by ``step`` (scaled by the
    coordinate's magnitude when that is larger). Terminates when the spread
    of vertex values falls below ``fatol + frtol * |f_best|`` or the
    evaluation budget runs out.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    if n == 0:
        return MinimizeResult(x0, float(fn(x0)), 1, True)
    if max_fev is None:
        max_fev = 400 + 250 * n

    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5

    simplex = [x0.copy()]
    for i in range(n):
        v = x0.copy()
        v[i] += step * max(1.0, abs(v[i]))
        simplex.append(v)
    nfev = 0

    def ev(x: np.ndarray) -> float:
        nonlocal nfev
        nfev += 1
        val = float(fn(x))
        return val if np.isfinite(val) else np.inf

    fvals = [ev(v) for v in simplex]

    while nfev < max_fev:
        order = np.argsort(fvals, kind="stable")
        simplex = [simplex[i] for i in order]
        fvals = [fvals[i] for i in order]
        f_best, f_worst = fvals[0], fvals[-1]
        if f_worst - f_best <= fatol + frtol * abs(f_best):
            return MinimizeResult(simplex[0], f_best, nfev, True)

        centroid = np.mean(simplex[:-1], axis=0)
        reflected = centroid + alpha * (centroid - simplex[-1])
        f_ref = ev(reflected)
        if f_ref < fvals[0]:
            expanded = centroid + gamma * (reflected - centroid)
            f_exp = ev(expanded)
            if f_exp < f_ref:
                simplex[-1], fvals[-1] = expanded, f_exp
            else:
                simplex[-1], fvals[-1] = reflected, f_ref
        elif f_ref < fvals[-2]:
            simplex[-1], fvals[-1] = reflected, f_ref
        else:
            contracted = centroid + rho * (simplex[-1] - centroid)
            f_con = ev(contracted)
            if f_con < fvals[-1]:
                simplex[-1], fvals[-1] = contracted, f_con
            else:
                best = simplex[0]
                for i in range(1, n + 1):
                    simplex[i] = best + sigma * (simplex[i] - best)
                    fvals[i] = ev(simplex[i])

    order = np.argsort(fvals, kind="stable")
    return MinimizeResult(simplex[order[0]], fvals[order[0]], nfev, False)
