"""Daily realized variance and signed semivariances from intraday log prices.

The downside component sums squares of strictly negative intraday returns and
the upside component sums squares of returns >= 0, so zero returns land in the
upside bucket and the two components always add back to the realized variance.
"""

from __future__ import annotations

import csv
import gzip
import logging
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np

from .errors import DataError
from .ingest import IntradayGrid

__all__ = [
    "DailyMeasures",
    "MeasurePanel",
    "intraday_returns",
    "realized_variance",
    "realized_semivariances",
    "measures_from_grid",
    "build_panel",
    "write_measures_csv",
    "read_measures_csv",
]

log = logging.getLogger("spillnet.realized")


@dataclass(frozen=True)
class DailyMeasures:
    """Realized measures for one asset on one trading day (squared log-return units)."""

    asset_id: str
    trading_day: date
    rv: float
    rs_neg: float
    rs_pos: float


@dataclass(frozen=True)
class MeasurePanel:
    """Rectangular asset-by-day panel of realized measures.

    Every (day, asset) cell is present and days increase strictly.
    """

    assets: tuple[str, ...]
    days: tuple[date, ...]
    rv: np.ndarray      # (T, N)
    rs_neg: np.ndarray  # (T, N)
    rs_pos: np.ndarray  # (T, N)

    @property
    def n_assets(self) -> int:
        return len(self.assets)

    @property
    def n_days(self) -> int:
        return len(self.days)

    def to_matrix(self, mode: str, positive_first: bool = True, log_transform: bool = False) -> np.ndarray:
        """Data block for VAR estimation: (T, N) of rv or (T, 2N) of semivariances."""
        if mode == "plain":
            data = self.rv.copy()
        elif mode == "signed":
            blocks = (self.rs_pos, self.rs_neg) if positive_first else (self.rs_neg, self.rs_pos)
            data = np.hstack(blocks)
        else:
            raise DataError(f"unknown system mode {mode!r}")
        if log_transform:
            if np.any(data <= 0.0):
                raise DataError("log transform requires strictly positive measures")
            data = np.log(data)
        return data


def intraday_returns(grid: IntradayGrid) -> np.ndarray:
    """Differences of consecutive grid log prices."""
    prices = np.asarray(grid.log_prices, dtype=float)
    if prices.size < 2:
        raise DataError(
            f"degenerate day {grid.trading_day} for {grid.asset_id}: fewer than 2 grid points"
        )
    return np.diff(prices)


def realized_variance(returns) -> float:
    """Sum of squared intraday returns."""
    r = np.asarray(returns, dtype=float)
    if r.size == 0:
        raise DataError("empty return list")
    return float(np.sum(r * r))


def realized_semivariances(returns) -> tuple[float, float]:
    """(downside, upside) decomposition of the realized variance."""
    r = np.asarray(returns, dtype=float)
    if r.size == 0:
        raise DataError("empty return list")
    sq = r * r
    rs_neg = float(np.sum(sq[r < 0.0]))
    rs_pos = float(np.sum(sq[r >= 0.0]))
    return rs_neg, rs_pos


def measures_from_grid(grid: IntradayGrid) -> DailyMeasures:
    returns = intraday_returns(grid)
    rs_neg, rs_pos = realized_semivariances(returns)
    return DailyMeasures(
        asset_id=grid.asset_id,
        trading_day=grid.trading_day,
        rv=realized_variance(returns),
        rs_neg=rs_neg,
        rs_pos=rs_pos,
    )


def build_panel(measures, assets) -> tuple[MeasurePanel, dict[str, list[date]]]:
    """Assemble a rectangular panel on the dates common to every asset.

    Returns the panel together with the dates dropped per asset (days the
    asset has but at least one other asset is missing).
    """
    assets = list(assets)
    if not assets:
        raise DataError("no assets requested")
    by_asset: dict[str, dict[date, DailyMeasures]] = {a: {} for a in assets}
    for m in measures:
        if m.asset_id in by_asset:
            by_asset[m.asset_id][m.trading_day] = m
    for a in assets:
        if not by_asset[a]:
            raise DataError(f"no measures for asset {a}")

    common = set(by_asset[assets[0]])
    for a in assets[1:]:
        common &= set(by_asset[a])
    if not common:
        raise DataError("no trading day is common to all assets")
    days = tuple(sorted(common))

    dropped = {a: sorted(set(by_asset[a]) - common) for a in assets}
    for a, lost in dropped.items():
        if lost:
            log.info("panel: dropped %d day(s) for %s (missing elsewhere)", len(lost), a)

    T, N = len(days), len(assets)
    rv = np.empty((T, N))
    rs_neg = np.empty((T, N))
    rs_pos = np.empty((T, N))
    for j, a in enumerate(assets):
        rows = by_asset[a]
        for i, d in enumerate(days):
            m = rows[d]
            rv[i, j] = m.rv
            rs_neg[i, j] = m.rs_neg
            rs_pos[i, j] = m.rs_pos
    return MeasurePanel(tuple(assets), days, rv, rs_neg, rs_pos), dropped


def write_measures_csv(panel: MeasurePanel, path) -> None:
    """One row per asset-day: date,asset,rv,rs_neg,rs_pos at full precision."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "asset", "rv", "rs_neg", "rs_pos"])
        for i, d in enumerate(panel.days):
            for j, a in enumerate(panel.assets):
                writer.writerow(
                    [
                        d.isoformat(),
                        a,
                        repr(float(panel.rv[i, j])),
                        repr(float(panel.rs_neg[i, j])),
                        repr(float(panel.rs_pos[i, j])),
                    ]
                )


def read_measures_csv(path) -> MeasurePanel:
    """Load a measures file back into a rectangular panel."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    rows: list[DailyMeasures] = []
    assets_in_order: list[str] = []
    seen = set()
    try:
        with opener(path, "rt", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header] != ["date", "asset", "rv", "rs_neg", "rs_pos"]:
                raise DataError(f"{path}: expected header date,asset,rv,rs_neg,rs_pos")
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    d = date.fromisoformat(row[0])
                    a = row[1]
                    rv, rs_neg, rs_pos = float(row[2]), float(row[3]), float(row[4])
                except (ValueError, IndexError) as exc:
                    raise DataError(f"{path}:{lineno}: malformed measures row") from exc
                rows.append(DailyMeasures(a, d, rv, rs_neg, rs_pos))
                if a not in seen:
                    seen.add(a)
                    assets_in_order.append(a)
    except OSError as exc:
        raise DataError(f"cannot read measures file {path}: {exc}") from exc
    if not rows:
        raise DataError(f"{path}: no measure rows")
    panel, _ = build_panel(rows, assets_in_order)
    return panel
