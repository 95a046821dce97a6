from datetime import date

import pytest

from epiforecast.errors import (
    CellError,
    EmptyInput,
    FormatError,
    InsufficientData,
    InvalidInterval,
    NotFound,
    OutOfRange,
)
from epiforecast.ingest import (
    DEFAULT_INTERVALS,
    IntervalSpec,
    aggregate_country,
    parse_jhu_csv,
    sample_csv_text,
    slice_for_interval,
)
from epiforecast.series import TimeSeries

HEADER = "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20,1/24/20"


def make_csv(*rows):
    return "\n".join([HEADER, *rows]) + "\n"


def test_parse_happy_path():
    table = parse_jhu_csv(make_csv("Delhi,India,28.7,77.1,0,1,3", ",Brazil,-14.2,-51.9,2,2,5"))
    assert table.dates == (date(2020, 1, 22), date(2020, 1, 23), date(2020, 1, 24))
    assert table.countries() == ("Brazil", "India")
    assert table.rows[0].province == "Delhi"
    assert table.rows[1].values == (2.0, 2.0, 5.0)


def test_parse_empty_lat_long_defaults_to_zero():
    table = parse_jhu_csv(make_csv(",India,,,0,1,3"))
    assert table.rows[0].lat == 0.0
    assert table.rows[0].long == 0.0


def test_parse_skips_blank_lines():
    table = parse_jhu_csv(make_csv(",India,1,1,0,1,3", "", ",,  ,,,,".replace(",,  ,,,,", "")))
    assert len(table.rows) == 1


def test_parse_rejects_empty_input():
    with pytest.raises(EmptyInput):
        parse_jhu_csv("")
    with pytest.raises(EmptyInput):
        parse_jhu_csv(HEADER + "\n")


def test_parse_rejects_wrong_header():
    with pytest.raises(FormatError, match="Province/State"):
        parse_jhu_csv("State,Country,Lat,Long,1/22/20\nx,India,0,0,1\n")
    with pytest.raises(FormatError, match="no date columns"):
        parse_jhu_csv("Province/State,Country/Region,Lat,Long\n")


def test_parse_rejects_non_contiguous_dates():
    bad = "Province/State,Country/Region,Lat,Long,1/22/20,1/24/20\n,India,0,0,1,2\n"
    with pytest.raises(FormatError, match="consecutive"):
        parse_jhu_csv(bad)


def test_parse_rejects_bad_header_date():
    bad = "Province/State,Country/Region,Lat,Long,Jan-22\n,India,0,0,1\n"
    with pytest.raises(FormatError, match="m/d/yy"):
        parse_jhu_csv(bad)


def test_parse_rejects_short_rows():
    with pytest.raises(FormatError, match="row 2"):
        parse_jhu_csv(make_csv(",India,0,0,1,2"))


def test_parse_cell_errors_carry_position():
    with pytest.raises(CellError) as info:
        parse_jhu_csv(make_csv(",India,0,0,1,x,3"))
    assert info.value.row == 2
    assert info.value.column == 6

    with pytest.raises(CellError) as info:
        parse_jhu_csv(make_csv(",India,0,0,1,-2,3"))
    assert info.value.column == 6

    with pytest.raises(CellError) as info:
        parse_jhu_csv(make_csv(", ,0,0,1,2,3"))
    assert info.value.column == 2


def test_aggregate_sums_provinces_per_date():
    table = parse_jhu_csv(
        make_csv("A,India,0,0,1,2,4", "B,India,0,0,0,1,3", ",Brazil,0,0,5,5,5")
    )
    series = aggregate_country(table, "India")
    assert series.values == (1.0, 3.0, 7.0)
    assert series.name == "India"
    assert series.dates == table.dates
    # a single-row country comes through unchanged
    assert aggregate_country(table, "Brazil").values == (5.0, 5.0, 5.0)


def test_aggregate_unknown_country_suggests():
    table = parse_jhu_csv(make_csv(",India,0,0,1,2,3", ",Brazil,0,0,1,2,3"))
    with pytest.raises(NotFound) as info:
        aggregate_country(table, "india")
    assert info.value.suggestions == ("India",)
    with pytest.raises(NotFound) as info:
        aggregate_country(table, "Brasil")
    assert "Brazil" in info.value.suggestions
    with pytest.raises(NotFound) as info:
        aggregate_country(table, "Atlantis")
    assert info.value.suggestions == ()


def test_aggregate_warns_on_cumulative_drops():
    table = parse_jhu_csv(make_csv(",India,0,0,5,3,9"))
    with pytest.warns(UserWarning, match="decrease"):
        series = aggregate_country(table, "India")
    # the downward revision is reported but not smoothed away
    assert series.values == (5.0, 3.0, 9.0)


def test_interval_spec_validation():
    with pytest.raises(InvalidInterval):
        IntervalSpec("", date(2020, 5, 6), date(2020, 5, 15))
    with pytest.raises(InvalidInterval):
        IntervalSpec("x", date(2020, 5, 15), date(2020, 5, 6))
    assert IntervalSpec("x", date(2020, 5, 6), date(2020, 5, 15)).days == 10


def test_default_intervals_match_protocol():
    labels = [iv.label for iv in DEFAULT_INTERVALS]
    assert labels == ["6MAY-15MAY", "21JUL-30JUL", "1AUG-10AUG"]
    assert all(iv.days == 10 for iv in DEFAULT_INTERVALS)


def test_slice_for_interval_starts_at_first_case():
    values = [0.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    series = TimeSeries.from_values("x", date(2020, 5, 1), values)
    interval = IntervalSpec("tail", date(2020, 5, 6), date(2020, 5, 8))
    window = slice_for_interval(series, interval)
    assert window.start == date(2020, 5, 3)
    assert window.end == date(2020, 5, 8)
    assert window.values[0] == 1.0


def test_slice_for_interval_outside_coverage():
    series = TimeSeries.from_values("x", date(2020, 5, 1), [1.0] * 10)
    with pytest.raises(OutOfRange):
        slice_for_interval(series, IntervalSpec("later", date(2020, 6, 1), date(2020, 6, 10)))


def test_slice_for_interval_needs_cases_and_training_room():
    zeros = TimeSeries.from_values("x", date(2020, 5, 1), [0.0] * 10)
    interval = IntervalSpec("mid", date(2020, 5, 4), date(2020, 5, 8))
    with pytest.raises(InsufficientData, match="never reaches"):
        slice_for_interval(zeros, interval)

    late = TimeSeries.from_values("x", date(2020, 5, 1), [0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0])
    with pytest.raises(InsufficientData, match="no training data"):
        slice_for_interval(late, interval)


def test_bundled_sample_is_usable(sample_table):
    assert sample_table.countries() == ("Brazil", "India", "US")
    assert sample_table.dates[0] == date(2020, 1, 22)
    assert sample_table.dates[-1] == date(2020, 8, 15)
    # every default interval is coverable for every country
    for country in sample_table.countries():
        series = aggregate_country(sample_table, country)
        for interval in DEFAULT_INTERVALS:
            window = slice_for_interval(series, interval)
            assert len(window) > 30


def test_bundled_sample_text_stable():
    assert sample_csv_text() == sample_csv_text()
