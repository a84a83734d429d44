#!/usr/bin/env python3
"""Offline AIC lag diagnostic for a measures panel.

The rolling pipeline keeps the lag order fixed across windows; this script is
the companion check. It reports the multivariate AIC for each candidate order
on the full panel, then (optionally) the per-window selection histogram, so a
fixed order can be justified before a long run.

Example:
    python scripts/lag_selection_study.py --measures fixtures/measures.csv \
        --mode signed --p-max 6 --window 200
"""

import argparse
from collections import Counter

import numpy as np

from spillnet.realized import read_measures_csv
from spillnet.var import fit_var, select_lag


def aic_table(data, p_max):
    T, k = data.shape
    t_eff = T - p_max
    rows = []
    for p in range(1, p_max + 1):
        model = fit_var(data[p_max - p :], p)
        sign, logdet = np.linalg.slogdet(model.sigma_eps)
        aic = logdet + 2.0 * (k * k * p + k) / t_eff if sign > 0 else float("inf")
        rows.append((p, aic, model.stationary))
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--measures", required=True, help="measures.csv to analyze")
    parser.add_argument("--mode", choices=["plain", "signed"], default="signed")
    parser.add_argument("--p-max", type=int, default=6)
    parser.add_argument("--window", type=int, default=0,
                        help="also tabulate per-window selections at this length")
    args = parser.parse_args()

    panel = read_measures_csv(args.measures)
    data = panel.to_matrix(args.mode)
    T, k = data.shape
    print(f"panel: {T} days x {k} variables ({args.mode} system)")

    print(f"\nfull-sample AIC, p = 1..{args.p_max}")
    rows = aic_table(data, args.p_max)
    best = min(rows, key=lambda r: r[1])[0]
    for p, aic, stationary in rows:
        marker = " <- selected" if p == best else ""
        print(f"  p={p}: AIC={aic:.6f} stationary={stationary}{marker}")

    if args.window:
        if T < args.window:
            raise SystemExit(f"panel shorter than window {args.window}")
        counts = Counter()
        for start in range(T - args.window + 1):
            counts[select_lag(data[start : start + args.window], args.p_max)] += 1
        print(f"\nper-window selections, window={args.window}:")
        for p in sorted(counts):
            print(f"  p={p}: {counts[p]} windows")


if __name__ == "__main__":
    main()
