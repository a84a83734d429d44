"""Generalized forecast-error variance decomposition.

The decomposition allows correlated shocks, so no orthogonalization is applied
and the result does not depend on how the variables are ordered. Rows are
normalized to sum to one because the raw shares of correlated shocks do not.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateVariableError

__all__ = ["FevdMatrix", "gfevd", "write_fevd_csv"]


@dataclass(frozen=True)
class FevdMatrix:
    """H-step variance decomposition, raw and row-normalized."""

    dim: int
    horizon: int
    raw: np.ndarray         # (k, k), raw[i, j] = share of i's FEV due to shocks to j
    normalized: np.ndarray  # (k, k), rows sum to one
    labels: tuple[str, ...] | None = None

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels else f"var{i}"


def gfevd(psi, sigma, H: int, labels=None) -> FevdMatrix:
    """Generalized H-step FEVD from MA matrices and the innovation covariance.

    raw[i, j] = sigma_jj^-1 sum_{h<H} (e_i' Psi_h Sigma e_j)^2
                / sum_{h<H} (e_i' Psi_h Sigma Psi_h' e_i)

    with sigma_jj read from Sigma's diagonal. Each row of the result is then
    divided by its sum.
    """
    sigma = np.asarray(sigma, dtype=float)
    k = sigma.shape[0]
    if sigma.shape != (k, k):
        raise DataError("sigma must be square")
    if H < 1:
        raise DataError("horizon must be at least 1")
    if len(psi) < H:
        raise DataError(f"need {H} MA matrices, got {len(psi)}")
    if not np.allclose(sigma, sigma.T, rtol=0.0, atol=1e-8 * max(1.0, float(np.abs(sigma).max()))):
        raise DataError("sigma is not symmetric")
    if labels is not None and len(labels) != k:
        raise DataError("labels length does not match system dimension")

    diag = np.diag(sigma).copy()
    for j in range(k):
        if diag[j] <= 0.0:
            name = labels[j] if labels else f"var{j}"
            raise DegenerateVariableError(f"non-positive innovation variance for {name}")

    num = np.zeros((k, k))
    den = np.zeros(k)
    for h in range(H):
        a = np.asarray(psi[h], dtype=float) @ sigma
        num += a * a
        # diag(Psi_h Sigma Psi_h') without forming the full product
        den += np.einsum("ij,ij->i", a, psi[h])

    for i in range(k):
        if den[i] <= 0.0:
            name = labels[i] if labels else f"var{i}"
            raise DegenerateVariableError(f"zero forecast-error variance for {name}")

    raw = num / diag[None, :] / den[:, None]
    row_sums = raw.sum(axis=1)
    for i in range(k):
        if row_sums[i] <= 0.0:
            name = labels[i] if labels else f"var{i}"
            raise DegenerateVariableError(f"zero decomposition row sum for {name}")
    normalized = raw / row_sums[:, None]
    return FevdMatrix(
        dim=k,
        horizon=H,
        raw=raw,
        normalized=normalized,
        labels=tuple(labels) if labels is not None else None,
    )


def write_fevd_csv(fevd: FevdMatrix, path) -> None:
    """Dump the normalized decomposition with row/column labels (percent)."""
    names = [fevd.label(i) for i in range(fevd.dim)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["variable"] + names)
        for i, name in enumerate(names):
            writer.writerow([name] + [repr(float(100.0 * v)) for v in fevd.normalized[i]])
