"""Regenerate the bundled sample CSV (upstream wire format).

The sample is synthetic but shaped like the real 2020 feed. Each country
has an analytic daily-rate curve (so the growth rate evolves smoothly),
and the published cumulative counts run through a weekly reporting
pipeline: part of recent volume sits in a backlog that is deepest over
weekends and clears early the next week, and the pipeline's congestion
level wanders aperiodically (a delayed-logistic queue state), so the
published curve oscillates around the true one without losing mass.
Fully deterministic.

Run from the repository root:

    python tools/make_sample_data.py
"""

from __future__ import annotations

from datetime import date, timedelta
from pathlib import Path

import numpy as np

FIRST_DAY = date(2020, 1, 22)
LAST_DAY = date(2020, 8, 15)
SEED = 20200815

OUT_PATH = Path(__file__).resolve().parent.parent / "src" / "epiforecast" / "data" / "jhu_confirmed_sample.csv"

# Day-of-week backlog shape, Mon..Sun: fractions of a day's volume still
# unpublished at end of day. Small early in the week (Monday clears the
# weekend pile), deepest on Sunday.
WEEK_PROFILE = np.array([0.25, 0.04, 0.03, 0.05, 0.12, 0.50, 0.80])


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _days_since(day: date, origin: date) -> float:
    return (day - origin).days


def india_rate(day: date) -> float:
    # One long wave: relative growth decays exponentially (fast spring
    # doubling easing into slow, near-linear late-summer growth).
    t = _days_since(day, date(2020, 4, 1))
    return 1530.0 * np.exp(3.8545 * (1.0 - np.exp(-t / 59.3)))


def brazil_rate(day: date) -> float:
    # Same family, but an earlier, shorter time constant: explosive
    # late-winter growth that plateaus near ten thousand cases a day.
    t = _days_since(day, date(2020, 2, 10))
    return np.exp(9.29 * (1.0 - np.exp(-t / 17.9)))


def us_rate(day: date) -> float:
    # Two waves: a sharp late-winter rise to a spring plateau, a shallow
    # decline through May and June, then a larger July wave that crests
    # in early August.
    t = day.toordinal()
    rise = _sigmoid((t - date(2020, 2, 15).toordinal()) / 6.5)
    spring_fade = 1.0 - 0.25 * _sigmoid((t - date(2020, 5, 8).toordinal()) / 20.0)
    summer_wave = 1.0 + 2.6 * _sigmoid((t - date(2020, 7, 2).toordinal()) / 8.5)
    crest_fade = 1.0 - 0.25 * _sigmoid((t - date(2020, 8, 10).toordinal()) / 12.0)
    return 30000.0 * rise * spring_fade * summer_wave * crest_fade


# Per country: first case, rate curve, weekly backlog depth (scales
# WEEK_PROFILE), congestion depth (scales the queue-state wander), and
# log-noise sigma/rho on the daily rate.
COUNTRIES = {
    "Brazil": {
        "lat": -14.235,
        "long": -51.9253,
        "first_case": date(2020, 2, 10),
        "rate": brazil_rate,
        "weekly": 0.7,
        "congestion": 0.75,
        "sigma": 0.002,
        "rho": 0.5,
    },
    "India": {
        "lat": 20.593684,
        "long": 78.96288,
        "first_case": date(2020, 1, 30),
        "rate": india_rate,
        "weekly": 0.55,
        "congestion": 0.6,
        "sigma": 0.0015,
        "rho": 0.5,
    },
    "US": {
        "lat": 40.0,
        "long": -100.0,
        "first_case": date(2020, 1, 22),
        "rate": us_rate,
        "weekly": 0.7,
        "congestion": 0.77,
        "sigma": 0.002,
        "rho": 0.5,
    },
}

# Delayed-logistic growth parameter for the queue state: produces a
# bounded aperiodic oscillation (quasi-periodic regime).
QUEUE_R = 2.15
QUEUE_CENTER = 1.0 - 1.0 / QUEUE_R


def build_cumulative(name: str, spec: dict, days: list[date], rng) -> np.ndarray:
    weekly = spec["weekly"]
    congestion = spec["congestion"]
    sigma, rho = spec["sigma"], spec["rho"]
    first_case = spec["first_case"]
    rate = spec["rate"]

    # Queue state x in (0, 1): x_{t+1} = r * x_t * (1 - x_{t-1}).
    x_prev = 0.5 + 0.1 * rng.standard_normal()
    x_cur = 0.5 + 0.1 * rng.standard_normal()

    log_noise = 0.0
    true_cum = 0.0
    published = np.zeros(len(days), dtype=np.int64)
    prev = 0
    for i, day in enumerate(days):
        if day < first_case:
            continue
        log_noise = rho * log_noise + sigma * rng.standard_normal()
        true_cum += rate(day) * np.exp(log_noise)
        x_prev, x_cur = x_cur, float(np.clip(QUEUE_R * x_cur * (1.0 - x_prev), 0.0, 1.0))
        depth = weekly * WEEK_PROFILE[day.weekday()] + congestion * (x_cur - QUEUE_CENTER)
        backlog = depth * rate(day)
        value = max(prev, round(true_cum - backlog))
        if day == first_case:
            value = max(value, 1)
        published[i] = value
        prev = value
    return published


def all_days() -> list[date]:
    n = (LAST_DAY - FIRST_DAY).days + 1
    return [FIRST_DAY + timedelta(days=i) for i in range(n)]


def main() -> None:
    days = all_days()
    header = ["Province/State", "Country/Region", "Lat", "Long"] + [
        f"{d.month}/{d.day}/{d.year % 100}" for d in days
    ]
    lines = [",".join(header)]
    for name in sorted(COUNTRIES):
        spec = COUNTRIES[name]
        rng = np.random.default_rng([SEED, sum(ord(c) for c in name)])
        cumulative = build_cumulative(name, spec, days, rng)
        row = ["", name, str(spec["lat"]), str(spec["long"])] + [
            str(int(v)) for v in cumulative
        ]
        lines.append(",".join(row))
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {OUT_PATH} ({len(days)} date columns)")


if __name__ == "__main__":
    main()
