"""Self-contained SVG line charts for forecasts against actuals.

Data series are drawn exclusively as ``<polyline>`` elements and the 90%
band of the designated model as a single ``<polygon>``, so the element
counts of an emitted file state exactly what it shows. Axes and grid
lines use ``<line>``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date
from xml.sax.saxutils import escape

from .errors import EmptyInput, FormatError, NotFound
from .series import TimeSeries

WIDTH = 920
HEIGHT = 480
MARGIN_LEFT = 76
MARGIN_RIGHT = 170
MARGIN_TOP = 42
MARGIN_BOTTOM = 52

ACTUAL_COLOR = "#222222"
PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


@dataclass(frozen=True)
class PlotSeries:
    label: str
    dates: tuple[date, ...]
    point: tuple[float, ...]
    lower90: tuple[float, ...]
    upper90: tuple[float, ...]


def parse_forecast_csv(text: str, label: str) -> PlotSeries:
    """Read a forecast CSV, with or without the ``actual`` column."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyInput(f"forecast file for {label!r} is empty") from None
    header = tuple(h.strip() for h in header)
    if header == ("date", "point", "lower90", "upper90"):
        offset = 1
    elif header == ("date", "actual", "point", "lower90", "upper90"):
        offset = 2
    else:
        raise FormatError(
            f"unexpected forecast header {','.join(header)!r} for {label!r}"
        )
    dates, points, lowers, uppers = [], [], [], []
    for line_no, record in enumerate(reader, start=2):
        if not record:
            continue
        if len(record) != len(header):
            raise FormatError(f"row {line_no} has {len(record)} fields, expected {len(header)}")
        try:
            dates.append(date.fromisoformat(record[0]))
            points.append(float(record[offset]))
            lowers.append(float(record[offset + 1]))
            uppers.append(float(record[offset + 2]))
        except ValueError:
            raise FormatError(f"row {line_no} is not parseable: {record!r}") from None
    if not dates:
        raise EmptyInput(f"forecast file for {label!r} has no data rows")
    for i in range(1, len(dates)):
        if dates[i] <= dates[i - 1]:
            raise FormatError(f"dates must increase; row {i + 2} goes backwards")
    return PlotSeries(
        label=label,
        dates=tuple(dates),
        point=tuple(points),
        lower90=tuple(lowers),
        upper90=tuple(uppers),
    )


def _ticks(lo: float, hi: float, n: int) -> list[float]:
    if hi == lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def render_plot(
    actuals: TimeSeries,
    forecasts: tuple[PlotSeries, ...],
    band: str | None = None,
    title: str | None = None,
) -> str:
    """One chart: actuals line, a line per forecast, one shaded band."""
    if not forecasts:
        raise EmptyInput("at least one forecast series is required")
    labels = [f.label for f in forecasts]
    band_label = band if band is not None else labels[0]
    if band_label not in labels:
        raise NotFound(f"band model {band_label!r} not among plotted forecasts",
                       suggestions=tuple(labels))
    band_series = forecasts[labels.index(band_label)]

    all_dates = list(actuals.dates)
    values = list(actuals.values)
    for f in forecasts:
        all_dates.extend(f.dates)
        values.extend(f.point)
    values.extend(band_series.lower90)
    values.extend(band_series.upper90)
    x_lo = min(all_dates).toordinal()
    x_hi = max(all_dates).toordinal()
    y_lo, y_hi = min(values), max(values)
    pad = (y_hi - y_lo) * 0.05 or 1.0
    y_lo -= pad
    y_hi += pad

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(day: date) -> float:
        if x_hi == x_lo:
            return MARGIN_LEFT + plot_w / 2
        return MARGIN_LEFT + (day.toordinal() - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v: float) -> float:
        return MARGIN_TOP + (y_hi - v) / (y_hi - y_lo) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{escape(title)}</text>'
        )

    for v in _ticks(y_lo, y_hi, 5):
        y = sy(v)
        out.append(
            f'<line x1="{MARGIN_LEFT}" y1="{y:.2f}" x2="{MARGIN_LEFT + plot_w}" '
            f'y2="{y:.2f}" stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{v:g}</text>'
        )
    n_x_ticks = min(6, x_hi - x_lo + 1)
    for o in _ticks(x_lo, x_hi, max(n_x_ticks, 2)):
        day = date.fromordinal(round(o))
        x = sx(day)
        out.append(
            f'<line x1="{x:.2f}" y1="{MARGIN_TOP}" x2="{x:.2f}" '
            f'y2="{MARGIN_TOP + plot_h}" stroke="#eeeeee" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{x:.2f}" y="{MARGIN_TOP + plot_h + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{day.isoformat()}</text>'
        )
    out.append(
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP + plot_h}" '
        f'x2="{MARGIN_LEFT + plot_w}" y2="{MARGIN_TOP + plot_h}" '
        f'stroke="#333333" stroke-width="1.5"/>'
    )
    out.append(
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" '
        f'y2="{MARGIN_TOP + plot_h}" stroke="#333333" stroke-width="1.5"/>'
    )

    band_color = PALETTE[labels.index(band_label) % len(PALETTE)]
    upper_pts = [f"{sx(d):.2f},{sy(v):.2f}" for d, v in zip(band_series.dates, band_series.upper90)]
    lower_pts = [
        f"{sx(d):.2f},{sy(v):.2f}"
        for d, v in zip(reversed(band_series.dates), reversed(band_series.lower90))
    ]
    out.append(
        f'<polygon points="{" ".join(upper_pts + lower_pts)}" '
        f'fill="{band_color}" fill-opacity="0.15" stroke="none"/>'
    )

    actual_pts = " ".join(
        f"{sx(d):.2f},{sy(v):.2f}" for d, v in zip(actuals.dates, actuals.values)
    )
    out.append(
        f'<polyline points="{actual_pts}" fill="none" stroke="{ACTUAL_COLOR}" '
        f'stroke-width="1.8"/>'
    )
    for i, f in enumerate(forecasts):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{sx(d):.2f},{sy(v):.2f}" for d, v in zip(f.dates, f.point))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.8" stroke-dasharray="6 3"/>'
        )

    legend_x = MARGIN_LEFT + plot_w + 14
    legend_y = MARGIN_TOP + 6
    entries = [(escape(actuals.name or "actual"), ACTUAL_COLOR)] + [
        (escape(f.label), PALETTE[i % len(PALETTE)]) for i, f in enumerate(forecasts)
    ]
    for j, (label, color) in enumerate(entries):
        y = legend_y + j * 20
        out.append(
            f'<rect x="{legend_x}" y="{y - 9}" width="14" height="4" fill="{color}"/>'
        )
        out.append(
            f'<text x="{legend_x + 20}" y="{y}" font-family="sans-serif" '
            f'font-size="12">{label}</text>'
        )
    out.append(
        f'<text x="{legend_x}" y="{legend_y + len(entries) * 20}" '
        f'font-family="sans-serif" font-size="11" fill="#666666">'
        f'band: {escape(band_label)} 90%</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
