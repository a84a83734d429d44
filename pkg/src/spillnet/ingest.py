"""Tick parsing, trading-session calendar and resampling to intraday grids.

The venue trades nearly around the clock: a session opens at 17:00 local time
and runs to 16:00 the next calendar day, so ticks at or after the open belong
to the *next* calendar day's trading day and the 16:00-17:00 maintenance gap
belongs to no session at all. Grids are built by previous-tick interpolation,
never linear, to avoid manufacturing returns that were never traded.
"""

from __future__ import annotations

import csv
import gzip
import logging
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from pathlib import Path
from zoneinfo import ZoneInfo

import numpy as np

from .errors import ConfigError, DataError

__all__ = [
    "TickSeries",
    "SessionCalendar",
    "IntradayGrid",
    "build_calendar",
    "assign_trading_day",
    "session_bounds",
    "resample",
    "read_ticks_csv",
    "ingest_asset",
]

log = logging.getLogger("spillnet.ingest")

_EPOCH = datetime(1970, 1, 1)


def _seconds(ts: datetime) -> float:
    return (ts - _EPOCH).total_seconds()


@dataclass(frozen=True)
class TickSeries:
    """Raw trades for one asset: exchange-local timestamps and positive prices."""

    asset_id: str
    times: tuple[datetime, ...]
    prices: np.ndarray

    @classmethod
    def from_records(cls, asset_id: str, records) -> "TickSeries":
        records = sorted(records, key=lambda r: r[0])
        times = tuple(r[0] for r in records)
        prices = np.asarray([r[1] for r in records], dtype=float)
        if np.any(prices <= 0.0) or not np.isfinite(prices).all():
            raise DataError(f"{asset_id}: tick prices must be finite and strictly positive")
        return cls(asset_id=asset_id, times=times, prices=prices)

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True)
class SessionCalendar:
    """Session clock plus the exclusion rules for low-activity dates."""

    session_start: time = time(17, 0)
    session_end: time = time(16, 0)
    holidays: frozenset[date] = field(default_factory=frozenset)
    weekend_rule: bool = True
    year_end_rule: bool = True

    def __post_init__(self):
        if self.session_start == self.session_end:
            raise ConfigError("session start and end must differ")

    @property
    def spans_midnight(self) -> bool:
        return self.session_start > self.session_end

    def session_length(self) -> timedelta:
        start = timedelta(hours=self.session_start.hour, minutes=self.session_start.minute,
                          seconds=self.session_start.second)
        end = timedelta(hours=self.session_end.hour, minutes=self.session_end.minute,
                        seconds=self.session_end.second)
        if self.spans_midnight:
            return timedelta(days=1) - (start - end)
        return end - start

    def is_excluded(self, d: date) -> bool:
        if self.weekend_rule and d.weekday() >= 5:
            return True
        if d in self.holidays:
            return True
        if self.year_end_rule:
            if d.month == 12 and d.day in (24, 25, 26, 31):
                return True
            if d.month == 1 and d.day in (1, 2):
                return True
        return False


def build_calendar(
    weekends: bool = True,
    holidays=(),
    year_end: bool = True,
    session_start: time = time(17, 0),
    session_end: time = time(16, 0),
) -> SessionCalendar:
    """Calendar excluding weekends, listed holidays and the year-end lull."""
    return SessionCalendar(
        session_start=session_start,
        session_end=session_end,
        holidays=frozenset(holidays),
        weekend_rule=weekends,
        year_end_rule=year_end,
    )


def assign_trading_day(ts: datetime, cal: SessionCalendar) -> date | None:
    """Trading day owning a tick, or None for gap ticks and excluded dates.

    For a midnight-spanning session, ticks at or after the open map to the
    following calendar day and ticks up to and including the close map to the
    current one; anything strictly between close and open is a non-session
    tick. The closing boundary is kept in-session so a grid fed back through
    resampling reproduces itself.
    """
    t = ts.time()
    if cal.spans_midnight:
        if t >= cal.session_start:
            day = ts.date() + timedelta(days=1)
        elif t <= cal.session_end:
            day = ts.date()
        else:
            return None
    else:
        if cal.session_start <= t <= cal.session_end:
            day = ts.date()
        else:
            return None
    if cal.is_excluded(day):
        return None
    return day


def session_bounds(day: date, cal: SessionCalendar) -> tuple[datetime, datetime]:
    """Wall-clock open and close of one trading day's session."""
    if cal.spans_midnight:
        open_dt = datetime.combine(day - timedelta(days=1), cal.session_start)
    else:
        open_dt = datetime.combine(day, cal.session_start)
    return open_dt, datetime.combine(day, cal.session_end)


@dataclass(frozen=True)
class IntradayGrid:
    """Equally spaced log prices covering one asset's full session."""

    asset_id: str
    trading_day: date
    log_prices: np.ndarray
    grid_interval: timedelta

    def __post_init__(self):
        if not np.isfinite(self.log_prices).all():
            raise DataError(f"{self.asset_id} {self.trading_day}: non-finite log price")


def resample(ticks: TickSeries, day: date, cal: SessionCalendar, interval: timedelta) -> IntradayGrid:
    """Previous-tick interpolation of one day's ticks onto the session grid.

    Grid points before the first trade carry the first trade's log price.
    When several trades share a timestamp, the last one wins (exchange
    sequence order).
    """
    if interval <= timedelta(0):
        raise ConfigError("grid interval must be positive")
    length = cal.session_length()
    n, rem = divmod(round(length.total_seconds()), round(interval.total_seconds()))
    if rem != 0:
        raise ConfigError(f"interval {interval} does not divide the session length {length}")

    sel_times = []
    sel_prices = []
    for t, p in zip(ticks.times, ticks.prices):
        if assign_trading_day(t, cal) == day:
            sel_times.append(t)
            sel_prices.append(p)
    if not sel_times:
        raise DataError(f"{ticks.asset_id}: no ticks in session for {day}")

    # duplicate timestamps: keep the last trade at each stamp
    tick_sec = []
    tick_px = []
    for t, p in zip(sel_times, sel_prices):
        s = _seconds(t)
        if tick_sec and s == tick_sec[-1]:
            tick_px[-1] = p
        else:
            tick_sec.append(s)
            tick_px.append(p)
    tick_sec = np.asarray(tick_sec)
    tick_px = np.asarray(tick_px)

    open_dt, _ = session_bounds(day, cal)
    grid_sec = _seconds(open_dt) + np.arange(n + 1) * interval.total_seconds()
    idx = np.searchsorted(tick_sec, grid_sec, side="right") - 1
    idx = np.maximum(idx, 0)  # before the first tick: forward-fill from it
    return IntradayGrid(
        asset_id=ticks.asset_id,
        trading_day=day,
        log_prices=np.log(tick_px[idx]),
        grid_interval=interval,
    )


def read_ticks_csv(path, asset_id: str, tz: str | None = None) -> tuple[TickSeries, list[tuple[int, str]]]:
    """Parse a timestamp,price CSV (optionally gzipped) into a tick series.

    Timestamps carrying a UTC offset are converted into the exchange timezone;
    naive ones are taken as already exchange-local. Malformed rows are skipped
    and returned as (line number, reason) pairs.
    """
    path = Path(path)
    zone = ZoneInfo(tz) if tz else None
    opener = gzip.open if path.suffix == ".gz" else open
    records: list[tuple[datetime, float]] = []
    malformed: list[tuple[int, str]] = []
    try:
        with opener(path, "rt", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip().lower() for h in header[:2]] != ["timestamp", "price"]:
                raise DataError(f"{path}: expected header timestamp,price")
            for lineno, row in enumerate(reader, start=2):
                if not row or (len(row) == 1 and not row[0].strip()):
                    continue
                if len(row) < 2:
                    malformed.append((lineno, "missing field"))
                    continue
                raw_ts = row[0].strip().replace("Z", "+00:00")
                try:
                    ts = datetime.fromisoformat(raw_ts)
                except ValueError:
                    malformed.append((lineno, f"bad timestamp {row[0]!r}"))
                    continue
                if ts.tzinfo is not None:
                    if zone is None:
                        malformed.append((lineno, "offset timestamp but no timezone configured"))
                        continue
                    ts = ts.astimezone(zone).replace(tzinfo=None)
                try:
                    price = float(row[1])
                except ValueError:
                    malformed.append((lineno, f"bad price {row[1]!r}"))
                    continue
                if not np.isfinite(price) or price <= 0.0:
                    malformed.append((lineno, f"non-positive price {row[1]!r}"))
                    continue
                records.append((ts, price))
    except OSError as exc:
        raise DataError(f"cannot read tick file {path}: {exc}") from exc
    if not records:
        raise DataError(f"{path}: no parseable ticks")
    for lineno, reason in malformed:
        log.warning("%s:%d skipped: %s", path, lineno, reason)
    return TickSeries.from_records(asset_id, records), malformed


def ingest_asset(
    ticks: TickSeries,
    cal: SessionCalendar,
    interval: timedelta,
    min_ticks: int = 10,
) -> tuple[list[IntradayGrid], dict]:
    """Resample every eligible trading day of one asset.

    Days with fewer than ``min_ticks`` trades are dropped and reported, since
    near-empty sessions corrupt the realized measures.
    """
    per_day: dict[date, int] = {}
    excluded_ticks = 0
    for t in ticks.times:
        day = assign_trading_day(t, cal)
        if day is None:
            excluded_ticks += 1
        else:
            per_day[day] = per_day.get(day, 0) + 1
    if not per_day:
        raise DataError(f"{ticks.asset_id}: every tick falls outside tradable sessions")

    grids = []
    dropped: dict[date, str] = {}
    span_start, span_end = min(per_day), max(per_day)
    d = span_start
    while d <= span_end:
        if not cal.is_excluded(d):
            count = per_day.get(d, 0)
            if count == 0:
                dropped[d] = "no_ticks"
            elif count < min_ticks:
                dropped[d] = f"too_few_ticks:{count}"
            else:
                grids.append(resample(ticks, d, cal, interval))
        d += timedelta(days=1)
    for day, reason in dropped.items():
        log.info("%s: dropped %s (%s)", ticks.asset_id, day, reason)

    report = {
        "asset": ticks.asset_id,
        "ticks_total": len(ticks),
        "ticks_excluded": excluded_ticks,
        "days_kept": len(grids),
        "days_dropped": {day.isoformat(): reason for day, reason in sorted(dropped.items())},
    }
    return grids, report
