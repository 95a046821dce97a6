"""Command-line interface: a thin client over the HTTP service.

All computation happens behind the service surface; the CLI reads and
writes files, assembles requests, and maps failures to stable exit
codes: 0 success, 1 usage/config, 2 I/O, 3 data/parse, 4 model error.
By default requests are dispatched to an in-process instance of the
service; ``--server`` targets a running one instead.
"""

from __future__ import annotations

import os
import re
from datetime import date
from pathlib import Path

import click
import httpx

from .benchmark import DEFAULT_HORIZON, DEFAULT_SEED, MODEL_LABELS
from .ingest import DEFAULT_INTERVALS

SAMPLE_FILENAME = "jhu_confirmed_sample.csv"
DATA_DIR_ENV = "EPIFORECAST_DATA_DIR"

HYPERPARAMETER_NOTES = """\
Model defaults (all overridable nowhere else; recorded for auditability):

\b
  arima         order grid p,q in 0..5, d in 0..2, chosen by AICc;
                intercept estimated when d <= 1 (auto-selection path)
  holt-winters  season length 7; multiplicative; falls back to double
                smoothing when initial seasonal indices are all within 1%
  narnn         lags auto-selected from {3,5,7}; hidden 10; epochs 500;
                learning rate 0.01; restarts 5 (best final loss wins)
  lstm          window 5; hidden 16; epochs 300; learning rate 0.01
  additive      10 changepoints over first 80% of history; weekly Fourier
                order 3; ridge 0.5 on slope changes, 0.1 on seasonal terms
  intervals     90% bounds use z = 1.6449 for every model
"""

_SAFE_NAME = re.compile(r"[^A-Za-z0-9_-]+")


class CliFailure(Exception):
    """Terminal failure with a contract exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _call(client, method: str, path: str, payload: dict | None = None) -> dict:
    try:
        if method == "get":
            response = client.get(path)
        else:
            response = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        raise CliFailure(2, f"cannot reach service: {exc}") from exc
    if response.status_code == 200:
        return response.json()
    try:
        body = response.json()
    except ValueError:
        body = None
    if isinstance(body, dict) and "category" in body:
        code = 3 if body["category"] == "data" else 4
        raise CliFailure(code, body["error"])
    raise CliFailure(1, f"unexpected response {response.status_code} from {path}")


def _read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliFailure(2, f"cannot read {path}: {exc}") from exc


def _write_text(path: str | Path, text: str) -> None:
    path = Path(path)
    try:
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise CliFailure(2, f"cannot write {path}: {exc}") from exc


def _resolve_data_path(explicit: str | None) -> Path:
    if explicit:
        return Path(explicit)
    env_dir = os.environ.get(DATA_DIR_ENV)
    if env_dir:
        return Path(env_dir) / SAMPLE_FILENAME
    import importlib.resources

    resource = importlib.resources.files("epiforecast") / "data" / SAMPLE_FILENAME
    return Path(str(resource))


def _parse_config_file(path: str) -> dict:
    known = {"data", "countries", "intervals", "models", "seed", "horizon", "out"}
    text = _read_text(path)
    values: dict = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliFailure(1, f"{path}:{line_no}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in known:
            raise CliFailure(
                1, f"{path}:{line_no}: unknown key {key!r} (known: {', '.join(sorted(known))})"
            )
        values[key] = value.strip()
    return values


def _parse_interval_arg(token: str) -> dict:
    for interval in DEFAULT_INTERVALS:
        if token == interval.label:
            return {
                "label": interval.label,
                "start": interval.start.isoformat(),
                "end": interval.end.isoformat(),
            }
    if "=" in token and ".." in token:
        label, _, span = token.partition("=")
        start_text, _, end_text = span.partition("..")
        try:
            start = date.fromisoformat(start_text.strip())
            end = date.fromisoformat(end_text.strip())
        except ValueError:
            raise CliFailure(
                1, f"bad interval {token!r}; use LABEL=YYYY-MM-DD..YYYY-MM-DD"
            ) from None
        return {"label": label.strip(), "start": start.isoformat(), "end": end.isoformat()}
    known = ", ".join(i.label for i in DEFAULT_INTERVALS)
    raise CliFailure(
        1, f"unknown interval {token!r}; known labels: {known}, "
        f"or LABEL=YYYY-MM-DD..YYYY-MM-DD"
    )


def _split_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _safe_component(text: str) -> str:
    return _SAFE_NAME.sub("-", text)


def _ingest_series(client, csv_text: str, country: str) -> dict:
    return _call(client, "post", "/ingest", {"csv_text": csv_text, "country": country})


@click.group(epilog=HYPERPARAMETER_NOTES)
@click.option("--server", default=None, metavar="URL",
              help="Send requests to a running service instead of in-process.")
@click.version_option(package_name="epiforecast", prog_name="epiforecast")
@click.pass_context
def cli(ctx, server):
    """Daily epidemic-case forecasting and benchmarking."""
    ctx.obj = {"server": server}


@cli.command()
@click.argument("source", type=click.Path())
@click.option("--country", required=True, help="Country/Region name to aggregate.")
@click.option("--out", default=None, metavar="PATH",
              help="Output CSV path [default: <country>.csv].")
@click.pass_context
def ingest(ctx, source, country, out):
    """Convert the upstream cumulative CSV to a canonical daily series.

    SOURCE is a file in the upstream wire format (Province/State,
    Country/Region, Lat, Long, then m/d/yy date columns). The output is
    a `date,value` CSV of cumulative cases summed over the country's rows.
    """
    csv_text = _read_text(source)
    with _client(ctx.obj["server"]) as client:
        payload = _ingest_series(client, csv_text, country)
    out_path = out or f"{_safe_component(country)}.csv"
    _write_text(out_path, payload["canonical_csv"])
    click.echo(
        f"{payload['rows']} rows for {country}: {payload['start']} .. {payload['end']} "
        f"-> {out_path}"
    )


@cli.command(epilog=HYPERPARAMETER_NOTES)
@click.option("--config", "config_path", default=None, metavar="FILE",
              help="Flat key=value config file; command-line flags win.")
@click.option("--data", default=None, metavar="PATH",
              help=f"Upstream-format CSV [default: ${DATA_DIR_ENV}/{SAMPLE_FILENAME} "
                   "if set, else the bundled sample].")
@click.option("--countries", default=None, metavar="A,B",
              help="Countries to benchmark [default: paper protocol].")
@click.option("--intervals", default=None, metavar="L1,L2",
              help="Interval labels or LABEL=start..end [default: paper protocol].")
@click.option("--models", default=None, metavar="M1,M2",
              help=f"Subset of: {', '.join(MODEL_LABELS)} [default: paper protocol].")
@click.option("--seed", default=None, type=int,
              help=f"Run seed; cell seeds derive from it [default: {DEFAULT_SEED}].")
@click.option("--horizon", default=None, type=click.IntRange(min=1),
              help=f"Held-out days per interval [default: {DEFAULT_HORIZON}].")
@click.option("--out", default=None, metavar="DIR",
              help="Output directory [default: benchmark-out].")
@click.pass_context
def benchmark(ctx, config_path, data, countries, intervals, models, seed, horizon, out):
    """Run the fixed-interval benchmark and write ranked tables.

    With no filters this reproduces the default protocol: India over the
    three 2020 intervals (6MAY-15MAY, 21JUL-30JUL, 1AUG-10AUG) with all
    five models, plus US and Brazil over 6MAY-15MAY with arima and
    hybrid. Failed cells are reported in the table, not fatal. Outputs:
    rank_table.csv, rank_table.txt, and forecasts/<cell>.csv.
    """
    config = _parse_config_file(config_path) if config_path else {}
    data = data or config.get("data")
    countries = countries or config.get("countries")
    intervals = intervals or config.get("intervals")
    models = models or config.get("models")
    if seed is None:
        seed = int(config["seed"]) if "seed" in config else DEFAULT_SEED
    if horizon is None:
        horizon = int(config["horizon"]) if "horizon" in config else DEFAULT_HORIZON
    out_dir = Path(out or config.get("out") or "benchmark-out")

    default_protocol = countries is None and intervals is None and models is None
    if default_protocol:
        spec_payloads = [
            {
                "countries": ["India"],
                "intervals": [_parse_interval_arg(i.label) for i in DEFAULT_INTERVALS],
                "models": list(MODEL_LABELS),
                "seed": seed,
                "horizon": horizon,
            },
            {
                "countries": ["US", "Brazil"],
                "intervals": [_parse_interval_arg(DEFAULT_INTERVALS[0].label)],
                "models": ["arima", "hybrid"],
                "seed": seed,
                "horizon": horizon,
            },
        ]
    else:
        country_list = _split_list(countries) if countries else ["India"]
        interval_list = (
            [_parse_interval_arg(tok) for tok in _split_list(intervals)]
            if intervals
            else [_parse_interval_arg(i.label) for i in DEFAULT_INTERVALS]
        )
        model_list = _split_list(models) if models else list(MODEL_LABELS)
        for label in model_list:
            if label not in MODEL_LABELS:
                raise CliFailure(
                    1, f"unknown model {label!r}; choose from {', '.join(MODEL_LABELS)}"
                )
        spec_payloads = [
            {
                "countries": country_list,
                "intervals": interval_list,
                "models": model_list,
                "seed": seed,
                "horizon": horizon,
            }
        ]

    csv_text = _read_text(_resolve_data_path(data))
    needed = []
    for spec in spec_payloads:
        for name in spec["countries"]:
            if name not in needed:
                needed.append(name)

    with _client(ctx.obj["server"]) as client:
        dataset = [
            _ingest_series(client, csv_text, name)["series"] for name in needed
        ]
        result = _call(
            client, "post", "/benchmark", {"dataset": dataset, "specs": spec_payloads}
        )

    _write_text(out_dir / "rank_table.csv", result["rank_csv"])
    _write_text(out_dir / "rank_table.txt", result["rank_text"])
    written = 2
    for cell in result["cells"]:
        if cell["forecast_csv"] is None:
            continue
        name = "_".join(
            _safe_component(part)
            for part in (cell["country"], cell["interval"], cell["model"])
        )
        _write_text(out_dir / "forecasts" / f"{name}.csv", cell["forecast_csv"])
        written += 1
    click.echo(result["rank_text"], nl=False)
    failures = [c for c in result["cells"] if c["error"]]
    click.echo(
        f"{len(result['cells'])} cells ({len(failures)} failed); "
        f"{written} files under {out_dir}"
    )


@cli.command(epilog=HYPERPARAMETER_NOTES)
@click.option("--model", required=True,
              type=click.Choice(MODEL_LABELS), help="Forecasting model.")
@click.option("--country", required=True, help="Country to forecast.")
@click.option("--data", default=None, metavar="PATH",
              help="Upstream-format CSV [default: bundled sample].")
@click.option("--horizon", default=DEFAULT_HORIZON, type=click.IntRange(min=1),
              show_default=True, help="Days ahead to forecast.")
@click.option("--seed", default=DEFAULT_SEED, type=int, show_default=True,
              help="RNG seed for the neural stages.")
@click.option("--order", default=None, metavar="P,D,Q",
              help="Fixed ARIMA order (arima/hybrid); skips order selection. "
                   "Fits exactly the named terms; add --drift for an intercept.")
@click.option("--drift/--no-drift", default=False,
              help="Include an intercept with an explicit --order (arima only).")
@click.option("--out", default="forecast.csv", metavar="PATH", show_default=True,
              help="Output CSV path.")
@click.pass_context
def forecast(ctx, model, country, data, horizon, seed, order, drift, out):
    """Fit on all available data and write future-dated forecasts.

    The output CSV has columns date,point,lower90,upper90 covering the
    `--horizon` days after the last observation.
    """
    if order is not None and model not in ("arima", "hybrid"):
        raise CliFailure(1, f"--order applies to arima and hybrid, not {model!r}")
    csv_text = _read_text(_resolve_data_path(data))
    with _client(ctx.obj["server"]) as client:
        series = _ingest_series(client, csv_text, country)["series"]
        payload = _call(
            client,
            "post",
            "/forecast",
            {
                "series": series,
                "model": model,
                "horizon": horizon,
                "seed": seed,
                "order": order,
                "drift": drift,
            },
        )
    _write_text(out, payload["csv"])
    dates = payload["forecast"]["dates"]
    click.echo(f"{model} forecast for {country}: {dates[0]} .. {dates[-1]} -> {out}")


@cli.command()
@click.argument("forecast_csvs", nargs=-1, required=True, type=click.Path())
@click.option("--actuals", required=True, metavar="PATH",
              help="Canonical date,value CSV of observed values.")
@click.option("--band", default=None, metavar="LABEL",
              help="Model whose 90% band is shaded [default: first file].")
@click.option("--title", default=None, help="Chart title.")
@click.option("--out", default="forecast.svg", metavar="PATH", show_default=True,
              help="Output SVG path.")
@click.pass_context
def plot(ctx, forecast_csvs, actuals, band, title, out):
    """Draw actuals and forecast CSVs as a self-contained SVG chart.

    Each FORECAST_CSV becomes one line, labeled by its file stem; the
    designated band model also gets its 90% interval shaded.
    """
    request = {
        "actual_csv": _read_text(actuals),
        "forecasts": [
            {"label": Path(p).stem, "csv_text": _read_text(p)} for p in forecast_csvs
        ],
        "band": band,
        "title": title,
    }
    with _client(ctx.obj["server"]) as client:
        payload = _call(client, "post", "/plot", request)
    _write_text(out, payload["svg"])
    click.echo(f"wrote {out}")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, type=int, show_default=True)
def serve(host, port):
    """Run the HTTP service (all other commands can target it via --server)."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="epiforecast", standalone_mode=False)
        return 0
    except CliFailure as exc:
        click.echo(f"error: {exc.message}", err=True)
        return exc.code
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
