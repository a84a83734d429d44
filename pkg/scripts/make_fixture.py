#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixtures under fixtures/.

Two data sets are produced, both fully deterministic:

* a six-asset daily measures panel (fixtures/measures.csv) driven by a common
  lognormal volatility factor with mildly asymmetric loadings, sized like
  liquid FX semivariances, for the spillover/plotdata commands;
* two small gzipped tick files (fixtures/ticks/FX?.csv.gz) spanning thirty
  trading days, with weekend ticks, maintenance-gap ticks, one holiday and
  duplicate timestamps thrown in so the session rules actually fire.
"""

import csv
import gzip
from datetime import date, datetime, time, timedelta
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

MEASURE_ASSETS = ["AUD", "GBP", "CAD", "EUR", "JPY", "CHF"]
MEASURE_DAYS = 260
TICK_ASSETS = ["FX1", "FX2"]
TICK_TRADING_DAYS = 60
HOLIDAY = date(2014, 1, 20)


def business_days(start: date, count: int, skip=()):
    days = []
    d = start
    while len(days) < count:
        if d.weekday() < 5 and d not in skip:
            days.append(d)
        d += timedelta(days=1)
    return days


def write_measures(rng: np.random.Generator) -> None:
    T, N = MEASURE_DAYS, len(MEASURE_ASSETS)
    f = np.empty(T)
    f[0] = 0.0
    shocks = rng.standard_normal(T)
    for t in range(1, T):
        f[t] = 0.92 * f[t - 1] + 0.35 * shocks[t]
    mu = np.log(2.5e-5) + rng.uniform(-0.3, 0.3, N)
    beta_pos = rng.uniform(0.5, 0.9, N)
    beta_neg = beta_pos + rng.uniform(0.05, 0.25, N)  # downside loads a bit harder
    rs_pos = np.empty((T, N))
    rs_neg = np.empty((T, N))
    for j in range(N):
        rs_pos[:, j] = np.exp(mu[j] + beta_pos[j] * f + 0.35 * rng.standard_normal(T))
        rs_neg[:, j] = np.exp(mu[j] + beta_neg[j] * f + 0.35 * rng.standard_normal(T))

    days = business_days(date(2013, 1, 7), T)
    path = FIXTURES / "measures.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "asset", "rv", "rs_neg", "rs_pos"])
        for i, d in enumerate(days):
            for j, a in enumerate(MEASURE_ASSETS):
                writer.writerow(
                    [
                        d.isoformat(),
                        a,
                        repr(float(rs_pos[i, j] + rs_neg[i, j])),
                        repr(float(rs_neg[i, j])),
                        repr(float(rs_pos[i, j])),
                    ]
                )
    print(f"wrote {path} ({T} days x {N} assets)")


def write_ticks(rng: np.random.Generator) -> None:
    trading_days = business_days(date(2014, 1, 6), TICK_TRADING_DAYS, skip={HOLIDAY})
    session_seconds = 23 * 3600
    for a_idx, asset in enumerate(TICK_ASSETS):
        rows = []
        price = 1.0 + 0.4 * a_idx
        for day in trading_days:
            open_dt = datetime.combine(day - timedelta(days=1), time(17, 0))
            n_ticks = int(rng.integers(180, 320))
            offsets = np.sort(rng.integers(0, session_seconds + 1, n_ticks))
            for s in offsets:
                price *= float(np.exp(0.0004 * rng.standard_normal()))
                rows.append((open_dt + timedelta(seconds=int(s)), price))
            # a duplicate timestamp: the later trade must win
            dup_t = open_dt + timedelta(seconds=int(offsets[len(offsets) // 2]))
            rows.append((dup_t, price * 1.0001))
            # one maintenance-gap tick per day, must be discarded
            rows.append((datetime.combine(day, time(16, 30)), price))
        # a burst of Saturday-session ticks, excluded by the weekend rule
        sat_open = datetime.combine(date(2014, 1, 10), time(17, 5))
        for m in range(5):
            rows.append((sat_open + timedelta(minutes=10 * m), price))
        rows.sort(key=lambda r: r[0])
        path = FIXTURES / "ticks" / f"{asset}.csv.gz"
        lines = ["timestamp,price"]
        lines += [f"{t.isoformat()},{p:.6f}" for t, p in rows]
        text = "\n".join(lines) + "\n"
        # mtime=0 keeps regenerated archives byte-identical
        path.write_bytes(gzip.compress(text.encode(), mtime=0))
        print(f"wrote {path} ({len(rows)} ticks)")


def main() -> None:
    (FIXTURES / "ticks").mkdir(parents=True, exist_ok=True)
    write_measures(np.random.default_rng(20130107))
    write_ticks(np.random.default_rng(20140106))


if __name__ == "__main__":
    main()
