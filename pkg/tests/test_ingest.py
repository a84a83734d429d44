import gzip
from datetime import date, datetime, time, timedelta

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spillnet.errors import ConfigError, DataError
from spillnet.ingest import (
    TickSeries,
    assign_trading_day,
    build_calendar,
    ingest_asset,
    read_ticks_csv,
    resample,
    session_bounds,
)

FIVE_MIN = timedelta(minutes=5)
CAL = build_calendar()


def ticks_of(records, asset="aud"):
    return TickSeries.from_records(asset, records)


# --- calendar ---------------------------------------------------------------


def test_year_end_rule_excludes_christmas():
    cal = build_calendar(weekends=True, holidays=[date(2008, 7, 4)], year_end=True)
    assert cal.is_excluded(date(2008, 12, 25))
    assert cal.is_excluded(date(2008, 12, 24))
    assert cal.is_excluded(date(2008, 12, 26))
    assert cal.is_excluded(date(2008, 12, 31))
    assert cal.is_excluded(date(2009, 1, 1))
    assert cal.is_excluded(date(2009, 1, 2))
    assert cal.is_excluded(date(2008, 7, 4))
    assert not cal.is_excluded(date(2008, 12, 23))


def test_weekend_rule():
    cal = build_calendar()
    assert cal.is_excluded(date(2014, 1, 11))  # Saturday
    assert cal.is_excluded(date(2014, 1, 12))  # Sunday
    assert not cal.is_excluded(date(2014, 1, 13))


def test_all_rules_off_excludes_nothing():
    cal = build_calendar(weekends=False, holidays=[], year_end=False)
    for d in (date(2014, 1, 11), date(2014, 12, 25), date(2015, 1, 1)):
        assert not cal.is_excluded(d)


# --- trading-day assignment -------------------------------------------------


def test_evening_tick_belongs_to_next_day():
    # Tuesday 17:30 opens Wednesday's session
    assert assign_trading_day(datetime(2014, 1, 7, 17, 30), CAL) == date(2014, 1, 8)


def test_morning_tick_belongs_to_same_day():
    assert assign_trading_day(datetime(2014, 1, 8, 10, 0), CAL) == date(2014, 1, 8)


def test_gap_tick_is_excluded():
    assert assign_trading_day(datetime(2014, 1, 8, 16, 30), CAL) is None


def test_closing_boundary_stays_in_session():
    assert assign_trading_day(datetime(2014, 1, 8, 16, 0), CAL) == date(2014, 1, 8)
    assert assign_trading_day(datetime(2014, 1, 8, 17, 0), CAL) == date(2014, 1, 9)


def test_friday_evening_maps_to_excluded_saturday():
    assert assign_trading_day(datetime(2014, 1, 10, 17, 30), CAL) is None


def test_sunday_evening_opens_monday():
    assert assign_trading_day(datetime(2014, 1, 12, 17, 0), CAL) == date(2014, 1, 13)


@given(
    st.datetimes(
        min_value=datetime(2010, 1, 1),
        max_value=datetime(2016, 1, 1),
    )
)
def test_partition_is_total(ts):
    day = assign_trading_day(ts, CAL)
    if day is None:
        t = ts.time()
        in_gap = CAL.session_end < t < CAL.session_start
        assert in_gap or CAL.is_excluded(
            ts.date() + timedelta(days=1) if t >= CAL.session_start else ts.date()
        )
    else:
        assert isinstance(day, date)
        assert not CAL.is_excluded(day)
        open_dt, close_dt = session_bounds(day, CAL)
        assert open_dt <= ts <= close_dt


def test_day_session_calendar():
    cal = build_calendar(session_start=time(9, 30), session_end=time(16, 0))
    assert assign_trading_day(datetime(2014, 1, 8, 10, 0), cal) == date(2014, 1, 8)
    assert assign_trading_day(datetime(2014, 1, 8, 8, 0), cal) is None
    assert cal.session_length() == timedelta(hours=6, minutes=30)


# --- resampling -------------------------------------------------------------

DAY = date(2014, 1, 8)
OPEN = datetime(2014, 1, 7, 17, 0)


def test_constant_price_grid():
    grid = resample(ticks_of([(OPEN + timedelta(minutes=m), 1.5) for m in range(0, 600, 60)]),
                    DAY, CAL, FIVE_MIN)
    assert grid.log_prices.shape == (277,)  # 23h session on a 5-minute grid
    assert np.allclose(grid.log_prices, np.log(1.5))


def test_single_tick_forward_fills_everything():
    grid = resample(ticks_of([(OPEN, 2.0)]), DAY, CAL, FIVE_MIN)
    assert np.allclose(grid.log_prices, np.log(2.0))


def test_before_first_tick_carries_first_price():
    grid = resample(ticks_of([(OPEN + timedelta(hours=3), 4.0)]), DAY, CAL, FIVE_MIN)
    assert np.allclose(grid.log_prices[:5], np.log(4.0))


def test_two_ticks_step_function_matches_brute_force():
    ticks = ticks_of([(OPEN, 1.0), (OPEN + timedelta(hours=11, minutes=2), 1.1)])
    grid = resample(ticks, DAY, CAL, FIVE_MIN)
    # brute force: walk every grid point, scan all ticks for the previous one
    for idx in range(277):
        g = OPEN + idx * FIVE_MIN
        prev = None
        for t, p in zip(ticks.times, ticks.prices):
            if t <= g:
                prev = p
        if prev is None:
            prev = ticks.prices[0]
        assert grid.log_prices[idx] == pytest.approx(np.log(prev), abs=0.0)


def test_duplicate_timestamp_keeps_last_trade():
    ticks = ticks_of([(OPEN, 1.0), (OPEN, 3.0), (OPEN + timedelta(hours=1), 3.0)])
    grid = resample(ticks, DAY, CAL, FIVE_MIN)
    assert grid.log_prices[0] == pytest.approx(np.log(3.0))


def test_resample_is_idempotent():
    rng = np.random.default_rng(44)
    times = [OPEN + i * FIVE_MIN for i in range(277)]
    prices = np.exp(np.cumsum(rng.standard_normal(277)) * 0.001)
    grid = resample(ticks_of(list(zip(times, prices))), DAY, CAL, FIVE_MIN)
    again = resample(
        ticks_of([(OPEN + i * FIVE_MIN, float(np.exp(lp))) for i, lp in enumerate(grid.log_prices)]),
        DAY,
        CAL,
        FIVE_MIN,
    )
    assert np.max(np.abs(again.log_prices - grid.log_prices)) <= 1e-12


def test_grid_length_same_across_days():
    rng = np.random.default_rng(45)
    lengths = set()
    for day in (date(2014, 1, 8), date(2014, 1, 9), date(2014, 1, 10)):
        open_dt, _ = session_bounds(day, CAL)
        recs = [(open_dt + timedelta(minutes=int(m)), 1.0 + 0.01 * rng.random())
                for m in sorted(rng.integers(0, 23 * 60, 40))]
        lengths.add(resample(ticks_of(recs), day, CAL, FIVE_MIN).log_prices.shape[0])
    assert lengths == {277}


def test_no_ticks_in_session_errors():
    with pytest.raises(DataError, match="no ticks"):
        resample(ticks_of([(OPEN, 1.0)]), date(2014, 1, 9), CAL, FIVE_MIN)


def test_interval_must_divide_session():
    with pytest.raises(ConfigError, match="divide"):
        resample(ticks_of([(OPEN, 1.0)]), DAY, CAL, timedelta(minutes=7))


def test_unsorted_records_are_sorted_on_construction():
    t = ticks_of([(OPEN + timedelta(hours=2), 2.0), (OPEN, 1.0)])
    assert t.times[0] == OPEN
    assert t.prices[0] == 1.0


def test_nonpositive_price_rejected():
    with pytest.raises(DataError, match="positive"):
        ticks_of([(OPEN, -1.0)])


# --- CSV parsing and per-asset driver ---------------------------------------


def _write_ticks(path, rows, compress=False):
    text = "timestamp,price\n" + "\n".join(rows) + "\n"
    if compress:
        with gzip.open(path, "wt") as fh:
            fh.write(text)
    else:
        path.write_text(text)


def test_read_ticks_naive_and_offset(tmp_path):
    p = tmp_path / "x.csv"
    _write_ticks(
        p,
        [
            "2014-01-08T09:00:00,1.5",
            "2014-01-08T15:30:00+00:00,1.6",  # 09:30 in Chicago (CST)
        ],
    )
    ticks, malformed = read_ticks_csv(p, "x", "America/Chicago")
    assert not malformed
    assert ticks.times[0] == datetime(2014, 1, 8, 9, 0)
    assert ticks.times[1] == datetime(2014, 1, 8, 9, 30)


def test_read_ticks_gzip_and_malformed_rows(tmp_path):
    p = tmp_path / "x.csv.gz"
    _write_ticks(
        p,
        [
            "2014-01-08T09:00:00,1.5",
            "not-a-time,1.5",
            "2014-01-08T09:01:00,zebra",
            "2014-01-08T09:02:00,-4",
            "2014-01-08T09:03:00,1.51",
        ],
        compress=True,
    )
    ticks, malformed = read_ticks_csv(p, "x", None)
    assert len(ticks) == 2
    assert [ln for ln, _ in malformed] == [3, 4, 5]


def test_read_ticks_bad_header(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("time,px\n2014-01-08T09:00:00,1.5\n")
    with pytest.raises(DataError, match="header"):
        read_ticks_csv(p, "x", None)


def test_ingest_asset_drops_thin_days():
    rng = np.random.default_rng(46)
    records = []
    for day, n in [(date(2014, 1, 8), 40), (date(2014, 1, 9), 3), (date(2014, 1, 10), 40)]:
        open_dt, _ = session_bounds(day, CAL)
        for m in sorted(rng.integers(0, 23 * 60, n)):
            records.append((open_dt + timedelta(minutes=int(m)), 1.0 + rng.random()))
    grids, report = ingest_asset(ticks_of(records), CAL, FIVE_MIN, min_ticks=10)
    assert [g.trading_day for g in grids] == [date(2014, 1, 8), date(2014, 1, 10)]
    assert report["days_kept"] == 2
    assert report["days_dropped"]["2014-01-09"].startswith("too_few_ticks")


def test_ingest_asset_all_excluded_errors():
    # Saturday-session ticks only
    records = [(datetime(2014, 1, 10, 17, 30), 1.0), (datetime(2014, 1, 11, 3, 0), 1.0)]
    with pytest.raises(DataError, match="outside"):
        ingest_asset(ticks_of(records), CAL, FIVE_MIN)
