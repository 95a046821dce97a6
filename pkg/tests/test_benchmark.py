"""Benchmark harness: cell seeds, ranking, table assembly, rendering."""

import hashlib
from datetime import date, timedelta

import numpy as np
import pytest

from epiforecast import arima, benchmark
from epiforecast.benchmark import (
    DEFAULT_HORIZON,
    DEFAULT_PROTOCOL,
    DEFAULT_SEED,
    MODEL_LABELS,
    RANK_CSV_COLUMNS,
    BenchmarkSpec,
    CellOutcome,
    assemble_table,
    derive_seed,
    rank,
    render_forecast_csv,
    render_rank_csv,
    render_rank_text,
    run_benchmark,
    run_cells,
)
from epiforecast.errors import InvalidInterval
from epiforecast.ingest import DEFAULT_INTERVALS, IntervalSpec
from epiforecast.metrics import MetricReport
from epiforecast.series import ForecastResult, TimeSeries


def report(model, rmse, mae=1.0, mape=1.0, country="India", interval="W1"):
    return MetricReport(
        model=model,
        country=country,
        interval=interval,
        rmse=rmse,
        mae=mae,
        mape_pct=mape,
        coverage90_pct=90.0,
    )


def small_dataset(n=60, start=date(2020, 3, 1), seed=7):
    rng = np.random.default_rng(seed)
    t = np.arange(n)
    values = 50.0 + 2.0 * t + 6.0 * np.sin(2 * np.pi * t / 7) + rng.normal(0, 1.5, n)
    values = np.clip(values, 1.0, None)
    return {"Freedonia": TimeSeries.from_values("Freedonia", start, values)}


def small_interval(start=date(2020, 3, 1), n=60, horizon=5):
    end = start + timedelta(days=n - 1)
    return IntervalSpec("TAIL", end - timedelta(days=horizon - 1), end)


class TestDeriveSeed:
    def test_matches_documented_derivation(self):
        expected = int.from_bytes(
            hashlib.sha256(b"2020:India:6MAY-15MAY:arima").digest()[:4], "big"
        )
        assert derive_seed(2020, "India", "6MAY-15MAY", "arima") == expected

    def test_stable_across_calls(self):
        a = derive_seed(2020, "US", "1AUG-10AUG", "hybrid")
        b = derive_seed(2020, "US", "1AUG-10AUG", "hybrid")
        assert a == b

    def test_any_coordinate_changes_the_seed(self):
        base = derive_seed(2020, "India", "6MAY-15MAY", "arima")
        assert derive_seed(2021, "India", "6MAY-15MAY", "arima") != base
        assert derive_seed(2020, "US", "6MAY-15MAY", "arima") != base
        assert derive_seed(2020, "India", "21JUL-30JUL", "arima") != base
        assert derive_seed(2020, "India", "6MAY-15MAY", "lstm") != base

    def test_fits_in_32_bits(self):
        for model in MODEL_LABELS:
            assert 0 <= derive_seed(2020, "India", "6MAY-15MAY", model) < 2**32


class TestRank:
    def test_orders_by_rmse(self):
        reports = [
            report("additive", 4484.73),
            report("arima", 502.30),
            report("lstm", 7755.93),
            report("hybrid", 437.30),
            report("holt-winters", 3556.82),
        ]
        table = rank(reports)
        assert [r.model for r in table.rows] == [
            "hybrid",
            "arima",
            "holt-winters",
            "additive",
            "lstm",
        ]
        assert [r.rank for r in table.rows] == [1, 2, 3, 4, 5]

    def test_tie_breaks_on_mae_then_mape_then_label(self):
        by_mae = rank([report("arima", 5.0, mae=2.0), report("lstm", 5.0, mae=1.0)])
        assert [r.model for r in by_mae.rows] == ["lstm", "arima"]

        by_mape = rank(
            [report("arima", 5.0, mape=3.0), report("lstm", 5.0, mape=2.0)]
        )
        assert [r.model for r in by_mape.rows] == ["lstm", "arima"]

        by_label = rank([report("lstm", 5.0), report("arima", 5.0)])
        assert [r.model for r in by_label.rows] == ["arima", "lstm"]

    def test_groups_rank_independently_in_first_appearance_order(self):
        reports = [
            report("arima", 9.0, interval="B"),
            report("arima", 2.0, interval="A"),
            report("lstm", 1.0, interval="B"),
            report("lstm", 4.0, interval="A"),
        ]
        table = rank(reports)
        assert [(r.interval, r.model, r.rank) for r in table.rows] == [
            ("B", "lstm", 1),
            ("B", "arima", 2),
            ("A", "arima", 1),
            ("A", "lstm", 2),
        ]

    def test_carries_metrics_through(self):
        row = rank([report("arima", 3.5, mae=2.5, mape=1.25)]).rows[0]
        assert (row.rmse, row.mae, row.mape_pct, row.coverage90_pct) == (
            3.5,
            2.5,
            1.25,
            90.0,
        )
        assert row.error is None


def make_cell(model, interval, rmse=None, error=None, country="X"):
    rep = None
    if rmse is not None:
        rep = report(model, rmse, country=country, interval=interval.label)
    return CellOutcome(
        country=country,
        interval=interval,
        model=model,
        seed=0,
        report=rep,
        error=error,
        result=None,
        actual=None,
        test_dates=None,
    )


class TestAssembleTable:
    def test_failed_cells_trail_with_sequential_ranks(self):
        iv = DEFAULT_INTERVALS[0]
        cells = (
            make_cell("lstm", iv, error="DivergenceError: loss became nan"),
            make_cell("arima", iv, rmse=4.0),
            make_cell("additive", iv, error="InsufficientData: too short"),
            make_cell("hybrid", iv, rmse=2.0),
        )
        rows = assemble_table(cells).rows
        assert [(r.model, r.rank) for r in rows] == [
            ("hybrid", 1),
            ("arima", 2),
            ("additive", 3),
            ("lstm", 4),
        ]
        assert rows[0].error is None
        assert rows[2].error == "InsufficientData: too short"
        assert rows[2].rmse is None

    def test_groups_stay_in_first_appearance_order(self):
        iv1, iv2 = DEFAULT_INTERVALS[0], DEFAULT_INTERVALS[1]
        cells = (
            make_cell("arima", iv2, rmse=1.0),
            make_cell("arima", iv1, rmse=1.0),
            make_cell("hybrid", iv2, rmse=0.5),
        )
        rows = assemble_table(cells).rows
        assert [(r.interval, r.model) for r in rows] == [
            (iv2.label, "hybrid"),
            (iv2.label, "arima"),
            (iv1.label, "arima"),
        ]


class TestSpecValidation:
    def test_empty_axes_rejected(self):
        with pytest.raises(InvalidInterval):
            BenchmarkSpec(countries=(), intervals=DEFAULT_INTERVALS, models=("arima",))
        with pytest.raises(InvalidInterval):
            BenchmarkSpec(countries=("India",), intervals=(), models=("arima",))
        with pytest.raises(InvalidInterval):
            BenchmarkSpec(countries=("India",), intervals=DEFAULT_INTERVALS, models=())

    def test_unknown_model_rejected(self):
        with pytest.raises(InvalidInterval, match="unknown model 'prophet'"):
            BenchmarkSpec(
                countries=("India",),
                intervals=DEFAULT_INTERVALS,
                models=("prophet",),
            )

    def test_interval_span_must_match_horizon(self):
        with pytest.raises(InvalidInterval, match="spans 10 days"):
            BenchmarkSpec(
                countries=("India",),
                intervals=(DEFAULT_INTERVALS[0],),
                models=("arima",),
                horizon=7,
            )

    def test_default_protocol_shape(self):
        assert len(DEFAULT_PROTOCOL) == 2
        first, second = DEFAULT_PROTOCOL
        assert first.countries == ("India",)
        assert first.models == MODEL_LABELS
        assert second.countries == ("US", "Brazil")
        assert second.intervals == (DEFAULT_INTERVALS[0],)
        assert second.models == ("arima", "hybrid")
        total = sum(
            len(s.countries) * len(s.intervals) * len(s.models)
            for s in DEFAULT_PROTOCOL
        )
        assert total == 19
        assert all(s.seed == DEFAULT_SEED for s in DEFAULT_PROTOCOL)
        assert all(s.horizon == DEFAULT_HORIZON for s in DEFAULT_PROTOCOL)


class TestRunCells:
    def test_missing_country_becomes_error_cell(self):
        dataset = small_dataset()
        spec = BenchmarkSpec(
            countries=("Atlantis",),
            intervals=(small_interval(),),
            models=("arima",),
            horizon=5,
        )
        (cell,) = run_cells(dataset, spec)
        assert cell.report is None
        assert "no series for 'Atlantis'" in cell.error
        assert "Freedonia" in cell.error

    def test_order_cache_shared_between_arima_and_hybrid(self, monkeypatch):
        calls = []
        real = arima.select_order

        def counting(series, *args, **kwargs):
            calls.append(series.name)
            return real(series, *args, **kwargs)

        monkeypatch.setattr(arima, "select_order", counting)
        spec = BenchmarkSpec(
            countries=("Freedonia",),
            intervals=(small_interval(),),
            models=("arima", "hybrid"),
            horizon=5,
        )
        outcomes = run_cells(small_dataset(), spec)
        assert all(c.error is None for c in outcomes)
        assert len(calls) == 1

    def test_deterministic_across_runs(self):
        spec = BenchmarkSpec(
            countries=("Freedonia",),
            intervals=(small_interval(),),
            models=("arima", "additive"),
            horizon=5,
        )
        first = render_rank_csv(run_benchmark(small_dataset(), spec))
        second = render_rank_csv(run_benchmark(small_dataset(), spec))
        assert first == second

    def test_cells_score_against_holdout(self):
        dataset = small_dataset()
        spec = BenchmarkSpec(
            countries=("Freedonia",),
            intervals=(small_interval(),),
            models=("arima",),
            horizon=5,
        )
        (cell,) = run_cells(dataset, spec)
        assert cell.error is None
        assert len(cell.actual) == 5
        assert len(cell.result.point) == 5
        assert cell.test_dates[-1] == dataset["Freedonia"].dates[-1]
        assert cell.seed == derive_seed(DEFAULT_SEED, "Freedonia", "TAIL", "arima")
        assert np.isfinite(cell.report.rmse)


class TestRendering:
    def test_rank_csv_header_and_error_row(self):
        iv = DEFAULT_INTERVALS[0]
        table = assemble_table(
            (
                make_cell("arima", iv, rmse=4.0),
                make_cell("lstm", iv, error="DivergenceError: loss became nan"),
            )
        )
        text = render_rank_csv(table)
        lines = text.split("\n")
        assert lines[0] == ",".join(RANK_CSV_COLUMNS)
        assert "\r" not in text
        assert text.endswith("\n")
        assert lines[1].startswith("X,6MAY-15MAY,arima,4")
        assert lines[2].endswith("2,DivergenceError: loss became nan")
        fields = lines[2].split(",")
        assert fields[3] == fields[4] == fields[5] == fields[6] == ""

    def test_rank_text_renders_groups_with_separators(self):
        table = rank(
            [
                report("arima", 2.0, interval="A"),
                report("lstm", 3.0, interval="A"),
                report("arima", 1.0, interval="B"),
            ]
        )
        text = render_rank_text(table)
        lines = text.splitlines()
        assert lines[0].split() == [
            "country",
            "interval",
            "model",
            "rmse",
            "mae",
            "mape%",
            "cover90%",
            "rank",
        ]
        assert set(lines[1]) <= {"-", " "}
        assert "" in lines[2:]
        assert text.endswith("\n")

    def test_forecast_csv_without_actuals(self):
        result = ForecastResult(
            model="arima",
            dates=(date(2020, 5, 6), date(2020, 5, 7)),
            point=(10.0, 11.5),
            lower90=(8.0, 9.0),
            upper90=(12.0, 14.0),
        )
        text = render_forecast_csv(result)
        lines = text.splitlines()
        assert lines[0] == "date,point,lower90,upper90"
        assert lines[1] == "2020-05-06,10,8,12"
        assert lines[2] == "2020-05-07,11.5,9,14"

    def test_forecast_csv_with_actuals(self):
        result = ForecastResult(
            model="arima",
            dates=(date(2020, 5, 6), date(2020, 5, 7)),
            point=(10.0, 11.5),
            lower90=(8.0, 9.0),
            upper90=(12.0, 14.0),
        )
        text = render_forecast_csv(result, actual=(9.5, 12.0))
        lines = text.splitlines()
        assert lines[0] == "date,actual,point,lower90,upper90"
        assert lines[1] == "2020-05-06,9.5,10,8,12"

    def test_forecast_csv_rejects_mismatched_actuals(self):
        result = ForecastResult(
            model="arima",
            dates=(date(2020, 5, 6),),
            point=(10.0,),
            lower90=(8.0,),
            upper90=(12.0,),
        )
        with pytest.raises(InvalidInterval, match="2 actuals for 1"):
            render_forecast_csv(result, actual=(9.5, 12.0))
