"""Spillover indices computed from a normalized variance decomposition.

Two system layouts are supported. In the plain layout the k variables are the
assets themselves. In the signed layout the system holds 2N variables: one
block of upside semivariances and one block of downside semivariances, the
same assets in the same order within each block. Directional measures in the
signed layout exclude, for each variable, both its own diagonal cell and the
cell of its opposite-sign twin (the cells sitting exactly N rows off the
diagonal), so that a variable is never credited with spilling onto itself in
either sign.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date

import numpy as np

from .errors import DataError
from .fevd import FevdMatrix

__all__ = [
    "SystemLayout",
    "SpilloverSnapshot",
    "total_spillover",
    "directional_from",
    "directional_to",
    "net_spillover",
    "directional_to_signed",
    "directional_from_signed",
    "sam",
    "directional_sam",
    "snapshot_from_fevd",
    "write_spillover_table",
]


@dataclass(frozen=True)
class SystemLayout:
    """Shape of the variable vector handed to the VAR.

    ``positive_first`` records which sign block occupies the first N slots.
    With the default (upside block first), a negative asymmetry measure means
    downside-volatility spillovers dominate.
    """

    n_assets: int
    mode: str = "plain"  # "plain" | "signed"
    positive_first: bool = True

    def __post_init__(self):
        if self.mode not in ("plain", "signed"):
            raise DataError(f"unknown system mode {self.mode!r}")
        if self.n_assets < 1:
            raise DataError("layout needs at least one asset")

    @property
    def dim(self) -> int:
        return self.n_assets if self.mode == "plain" else 2 * self.n_assets

    def variable_labels(self, assets) -> tuple[str, ...]:
        assets = list(assets)
        if len(assets) != self.n_assets:
            raise DataError("asset list does not match layout size")
        if self.mode == "plain":
            return tuple(assets)
        first, second = ("pos", "neg") if self.positive_first else ("neg", "pos")
        return tuple(f"{a}_{first}" for a in assets) + tuple(f"{a}_{second}" for a in assets)


@dataclass(frozen=True)
class SpilloverSnapshot:
    """All spillover indices for one estimation window."""

    window_end: date
    total: float
    to: np.ndarray             # per variable
    from_: np.ndarray          # per variable
    net: np.ndarray            # per asset
    stationary: bool
    sam: float | None = None           # signed layout only
    dsam: np.ndarray | None = None     # per asset, signed layout only


def _check_plain(fevd: FevdMatrix) -> np.ndarray:
    return np.asarray(fevd.normalized, dtype=float)


def _check_signed(fevd: FevdMatrix, layout: SystemLayout) -> np.ndarray:
    if layout.mode != "signed":
        raise DataError("layout is not a signed system")
    if fevd.dim != 2 * layout.n_assets:
        raise DataError(
            f"signed layout expects dimension {2 * layout.n_assets}, decomposition has {fevd.dim}"
        )
    return np.asarray(fevd.normalized, dtype=float)


def total_spillover(fevd: FevdMatrix) -> float:
    """Percent of total forecast-error variance due to cross-variable shocks."""
    w = _check_plain(fevd)
    k = fevd.dim
    return 100.0 * (w.sum() - np.trace(w)) / k


def directional_from(fevd: FevdMatrix, i: int) -> float:
    """Spillovers received by variable i from all others (row sum, percent)."""
    w = _check_plain(fevd)
    return 100.0 * (w[i].sum() - w[i, i]) / fevd.dim


def directional_to(fevd: FevdMatrix, i: int) -> float:
    """Spillovers transmitted by variable i to all others (column sum, percent)."""
    w = _check_plain(fevd)
    return 100.0 * (w[:, i].sum() - w[i, i]) / fevd.dim


def net_spillover(fevd: FevdMatrix, i: int) -> float:
    """Transmitted minus received for variable i."""
    return directional_to(fevd, i) - directional_from(fevd, i)


def _twin(col: int, n: int) -> int:
    return col + n if col < n else col - n


def directional_to_signed(fevd: FevdMatrix, layout: SystemLayout, col: int) -> float:
    """Column spillover of one signed variable, excluding its own-asset cells.

    Sums the 2N-2 column entries that remain after dropping the diagonal cell
    and the opposite-sign twin cell at row ``col +- N``.
    """
    w = _check_signed(fevd, layout)
    n = layout.n_assets
    return 100.0 * (w[:, col].sum() - w[col, col] - w[_twin(col, n), col]) / fevd.dim


def directional_from_signed(fevd: FevdMatrix, layout: SystemLayout, row: int) -> float:
    """Row counterpart of :func:`directional_to_signed` (used in table output)."""
    w = _check_signed(fevd, layout)
    n = layout.n_assets
    return 100.0 * (w[row].sum() - w[row, row] - w[row, _twin(row, n)]) / fevd.dim


def _to_signed_vector(w: np.ndarray, n: int) -> np.ndarray:
    k = 2 * n
    cols = np.arange(k)
    twins = np.where(cols < n, cols + n, cols - n)
    return 100.0 * (w.sum(axis=0) - w[cols, cols] - w[twins, cols]) / k


def _from_signed_vector(w: np.ndarray, n: int) -> np.ndarray:
    k = 2 * n
    rows = np.arange(k)
    twins = np.where(rows < n, rows + n, rows - n)
    return 100.0 * (w.sum(axis=1) - w[rows, rows] - w[rows, twins]) / k


def sam(fevd: FevdMatrix, layout: SystemLayout) -> float:
    """System-wide spillover asymmetry: first-block TO minus second-block TO.

    Zero when both sign blocks transmit identically. With the default layout
    (upside block first) a negative value means downside spillovers dominate.
    """
    w = _check_signed(fevd, layout)
    n = layout.n_assets
    to = _to_signed_vector(w, n)
    return float(to[:n].sum() - to[n:].sum())


def directional_sam(fevd: FevdMatrix, layout: SystemLayout, asset: int) -> float:
    """Per-asset asymmetry: the asset's first-block TO minus its second-block TO."""
    w = _check_signed(fevd, layout)
    n = layout.n_assets
    if not 0 <= asset < n:
        raise DataError(f"asset index {asset} out of range for {n} assets")
    return directional_to_signed(fevd, layout, asset) - directional_to_signed(
        fevd, layout, asset + n
    )


def snapshot_from_fevd(
    fevd: FevdMatrix,
    layout: SystemLayout,
    window_end: date,
    stationary: bool,
) -> SpilloverSnapshot:
    """Evaluate every index the layout supports on one decomposition."""
    w = np.asarray(fevd.normalized, dtype=float)
    k = fevd.dim
    total = total_spillover(fevd)
    if layout.mode == "plain":
        if k != layout.n_assets:
            raise DataError("plain layout size does not match decomposition")
        diag = np.diag(w)
        to = 100.0 * (w.sum(axis=0) - diag) / k
        from_ = 100.0 * (w.sum(axis=1) - diag) / k
        return SpilloverSnapshot(
            window_end=window_end,
            total=total,
            to=to,
            from_=from_,
            net=to - from_,
            stationary=stationary,
        )

    n = layout.n_assets
    _check_signed(fevd, layout)
    to = _to_signed_vector(w, n)
    from_ = _from_signed_vector(w, n)
    # Per-asset net position: transmitted minus received summed over the
    # asset's two sign variables; sums to zero across assets because TO and
    # FROM run over the same included cells.
    per_var_net = to - from_
    net = per_var_net[:n] + per_var_net[n:]
    dsam = to[:n] - to[n:]
    return SpilloverSnapshot(
        window_end=window_end,
        total=total,
        to=to,
        from_=from_,
        net=net,
        stationary=stationary,
        sam=float(dsam.sum()),
        dsam=dsam,
    )


def write_spillover_table(fevd: FevdMatrix, layout: SystemLayout, path) -> None:
    """Write the normalized decomposition bordered by TO, FROM and TOTAL.

    Cells are percentage shares; the FROM column holds each row's received
    spillovers, the TO row each column's transmitted spillovers, and the
    corner cell (in the TO row) their common total.
    """
    w = np.asarray(fevd.normalized, dtype=float)
    k = fevd.dim
    names = [fevd.label(i) for i in range(k)]
    if layout.mode == "plain":
        diag = np.diag(w)
        to = 100.0 * (w.sum(axis=0) - diag) / k
        from_ = 100.0 * (w.sum(axis=1) - diag) / k
    else:
        to = _to_signed_vector(w, layout.n_assets)
        from_ = _from_signed_vector(w, layout.n_assets)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variable"] + names + ["from"])
        for i, name in enumerate(names):
            writer.writerow(
                [name] + [repr(float(100.0 * v)) for v in w[i]] + [repr(float(from_[i]))]
            )
        writer.writerow(["to"] + [repr(float(v)) for v in to] + [repr(float(to.sum()))])
