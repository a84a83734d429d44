"""Command-line pipeline: ingest -> measures -> spillover -> plotdata.

Every subcommand reads one YAML config and writes into --out. Machine outputs
are CSV (UTF-8, comma separator, dot decimal, ISO dates) at full double
precision; a short human summary goes to standard output. Exit codes: 0 ok,
2 config error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from datetime import date, timedelta
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config
from .connectedness import SystemLayout, write_spillover_table
from .errors import ConfigError, DataError, NumericalError, SpillnetError
from .fevd import gfevd
from .ingest import build_calendar, ingest_asset, read_ticks_csv
from .manifest import build_manifest, write_manifest
from .realized import build_panel, measures_from_grid, read_measures_csv, write_measures_csv
from .rolling import (
    RollingConfig,
    run_rolling,
    test_hypotheses,
    write_gaps_csv,
    write_hypotheses_csv,
    write_rolling_csv,
)
from .var import fit_var, ma_coefficients

log = logging.getLogger("spillnet.cli")


def _setup_logging() -> None:
    level = os.environ.get("SPILLNET_LOG", "INFO").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR"):
        level = "INFO"
    logging.basicConfig(
        level=getattr(logging, level),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_ingest(cfg: RunConfig, out: Path) -> dict:
    if not cfg.assets:
        raise ConfigError("config declares no assets to ingest")
    cal = build_calendar(
        weekends=cfg.weekends,
        holidays=cfg.holidays,
        year_end=cfg.year_end,
        session_start=cfg.session_start,
        session_end=cfg.session_end,
    )
    interval = timedelta(minutes=cfg.interval_minutes)
    grids_dir = out / "grids"
    reports = {}
    inputs = []
    n_grids = 0
    for asset, path in cfg.assets.items():
        if not path.exists():
            raise DataError(f"ingest: tick file for {asset} not found: {path}")
        inputs.append(path)
        ticks, malformed = read_ticks_csv(path, asset, cfg.timezone)
        grids, report = ingest_asset(ticks, cal, interval, min_ticks=cfg.min_ticks)
        report["malformed_rows"] = [{"line": ln, "reason": r} for ln, r in malformed]
        reports[asset] = report
        asset_dir = grids_dir / asset
        asset_dir.mkdir(parents=True, exist_ok=True)
        for grid in grids:
            with open(asset_dir / f"{grid.trading_day.isoformat()}.csv", "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["grid_index", "log_price"])
                for i, lp in enumerate(grid.log_prices):
                    writer.writerow([i, _fmt(lp)])
        n_grids += len(grids)
    if n_grids == 0:
        raise DataError("ingest: empty result, no tradable asset-days survived")

    report_path = out / "ingest_report.json"
    report_path.write_text(json.dumps(reports, indent=2, sort_keys=True) + "\n")
    manifest = build_manifest(
        cfg.config_path, cfg.resolved_parameters(), inputs, [report_path]
    )
    write_manifest(out, manifest)
    for asset, rep in reports.items():
        print(
            f"ingest {asset}: {rep['days_kept']} days kept, "
            f"{len(rep['days_dropped'])} dropped, "
            f"{len(rep['malformed_rows'])} malformed rows"
        )
    return reports


def cmd_measures(cfg: RunConfig, out: Path) -> Path:
    grids_dir = out / "grids"
    if not grids_dir.is_dir():
        raise DataError(f"measures: no grids directory under {out}, run ingest first")
    assets = sorted(p.name for p in grids_dir.iterdir() if p.is_dir())
    if not assets:
        raise DataError("measures: grids directory is empty")

    all_measures = []
    inputs = []
    for asset in assets:
        for grid_file in sorted((grids_dir / asset).glob("*.csv")):
            day = date.fromisoformat(grid_file.stem)
            log_prices = []
            with open(grid_file, newline="") as fh:
                reader = csv.reader(fh)
                next(reader)
                for row in reader:
                    log_prices.append(float(row[1]))
            from .ingest import IntradayGrid

            grid = IntradayGrid(
                asset_id=asset,
                trading_day=day,
                log_prices=np.asarray(log_prices),
                grid_interval=timedelta(minutes=cfg.interval_minutes),
            )
            all_measures.append(measures_from_grid(grid))
            inputs.append(grid_file)

    panel, dropped = build_panel(all_measures, assets)
    out_path = out / "measures.csv"
    write_measures_csv(panel, out_path)
    manifest = build_manifest(cfg.config_path, cfg.resolved_parameters(), [], [out_path])
    manifest["dropped_dates"] = {a: [d.isoformat() for d in ds] for a, ds in dropped.items() if ds}
    write_manifest(out, manifest)
    n_dropped = sum(len(ds) for ds in dropped.values())
    print(
        f"measures: {panel.n_days} common days x {panel.n_assets} assets, "
        f"{n_dropped} asset-days dropped by date intersection"
    )
    return out_path


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    for attr, name in [
        ("mode", "mode"),
        ("window", "window"),
        ("horizon", "horizon"),
        ("lags", "lags"),
        ("bootstrap", "bootstrap"),
        ("block_length", "block_length"),
        ("ci_level", "ci_level"),
        ("seed", "seed"),
    ]:
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, attr, value)
    if getattr(args, "log_measures", False):
        cfg.log_transform = True
    return cfg


def cmd_spillover(cfg: RunConfig, out: Path, jobs: int) -> None:
    measures_path = out / "measures.csv"
    if not measures_path.exists():
        if cfg.measures_path and cfg.measures_path.exists():
            measures_path = cfg.measures_path
        else:
            raise DataError(
                f"spillover: measures.csv not found in {out} and no measures_path configured"
            )
    panel = read_measures_csv(measures_path)

    roll_cfg = RollingConfig(
        window_length=cfg.window,
        horizon=cfg.horizon,
        lag_order=cfg.lags,
        mode=cfg.mode,
        bootstrap_reps=cfg.bootstrap,
        block_length=cfg.block_length,
        ci_level=cfg.ci_level,
        rng_seed=cfg.seed,
    )
    layout = SystemLayout(n_assets=panel.n_assets, mode=cfg.mode)
    labels = layout.variable_labels(panel.assets)
    notes = []
    outputs = []

    # full-sample table over the whole panel, same conventions as the series
    try:
        data = panel.to_matrix(cfg.mode, log_transform=cfg.log_transform)
        model = fit_var(data, cfg.lags)
        decomp = gfevd(ma_coefficients(model, cfg.horizon), model.sigma_eps, cfg.horizon, labels)
        table_path = out / "spillover_table.csv"
        write_spillover_table(decomp, layout, table_path)
        outputs.append(table_path)
    except NumericalError as exc:
        raise NumericalError(f"spillover: full-sample fit failed: {exc}") from exc

    series = run_rolling(panel, roll_cfg, jobs=jobs, layout=layout,
                         log_transform=cfg.log_transform)
    rolling_path = out / "rolling.csv"
    write_rolling_csv(series, rolling_path)
    outputs.append(rolling_path)
    if series.gaps:
        gaps_path = out / "gaps.csv"
        write_gaps_csv(series, gaps_path)
        outputs.append(gaps_path)
        notes.append(f"{len(series.gaps)} window(s) gapped")

    if cfg.mode == "signed" and cfg.bootstrap > 0 and series.cis:
        flags = test_hypotheses(series)
        hypo_path = out / "hypotheses.csv"
        write_hypotheses_csv(flags, series, hypo_path)
        outputs.append(hypo_path)
    else:
        notes.append("hypotheses.csv skipped: needs signed mode with bootstrap_reps > 0")

    params = cfg.resolved_parameters()
    params["jobs"] = jobs
    params["block_order"] = "positive_first"
    manifest = build_manifest(cfg.config_path, params, [measures_path], outputs, notes)
    write_manifest(out, manifest)
    print(
        f"spillover: {len(series.snapshots)} windows, {len(series.gaps)} gaps, "
        f"mode={cfg.mode}, window={cfg.window}, H={cfg.horizon}, p={cfg.lags}, seed={cfg.seed}"
    )
    if series.snapshots:
        last = series.snapshots[-1]
        line = f"  last window {last.window_end}: total={last.total:.2f}"
        if last.sam is not None:
            line += f", sam={last.sam:.4f}"
        print(line)


def _read_rolling_csv(path: Path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "window_end":
            raise DataError(f"{path}: not a rolling series file")
        rows = list(reader)
    return header, rows


def cmd_plotdata(cfg: RunConfig, out: Path) -> None:
    rolling_path = out / "rolling.csv"
    if not rolling_path.exists():
        raise DataError(f"plotdata: {rolling_path} not found, run spillover first")
    header, rows = _read_rolling_csv(rolling_path)
    col = {name: i for i, name in enumerate(header)}
    signed = "sam" in col
    assets = [name[len("net_"):] for name in header if name.startswith("net_")]
    outputs = []
    notes = []

    fig_total = out / "fig_total.csv"
    with open(fig_total, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_end", "total"])
        for row in rows:
            writer.writerow([row[col["window_end"]], row[col["total"]]])
    outputs.append(fig_total)

    fig_net = out / "fig_net.csv"
    with open(fig_net, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_end", "asset", "net"])
        for row in rows:
            for a in assets:
                writer.writerow([row[col["window_end"]], a, row[col[f"net_{a}"]]])
    outputs.append(fig_net)

    if signed:
        fig_sam = out / "fig_sam.csv"
        with open(fig_sam, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["window_end", "sam", "lo", "hi"])
            for row in rows:
                writer.writerow(
                    [row[col["window_end"]], row[col["sam"]],
                     row[col["sam_lo"]], row[col["sam_hi"]]]
                )
        outputs.append(fig_sam)

        fig_dsam = out / "fig_dsam.csv"
        with open(fig_dsam, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["window_end", "asset", "to_good", "to_bad", "dsam"])
            for row in rows:
                for a in assets:
                    writer.writerow(
                        [
                            row[col["window_end"]],
                            a,
                            row[col[f"to_{a}_pos"]],
                            row[col[f"to_{a}_neg"]],
                            row[col[f"dsam_{a}"]],
                        ]
                    )
        outputs.append(fig_dsam)
    else:
        notes.append("fig_sam.csv and fig_dsam.csv skipped: plain-mode series")

    manifest = build_manifest(cfg.config_path, cfg.resolved_parameters(),
                              [rolling_path], outputs, notes)
    write_manifest(out, manifest)
    print(f"plotdata: wrote {', '.join(p.name for p in outputs)}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spillnet",
        description="Volatility spillover and asymmetry pipeline for tick data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--out", required=True, help="output directory")

    def spill_flags(p):
        p.add_argument("--mode", choices=["plain", "signed"])
        p.add_argument("--window", type=int)
        p.add_argument("--horizon", type=int)
        p.add_argument("--lags", type=int)
        p.add_argument("--bootstrap", type=int)
        p.add_argument("--block-length", dest="block_length", type=int)
        p.add_argument("--ci-level", dest="ci_level", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--log-measures", dest="log_measures", action="store_true",
                       help="fit the system on log measures (robustness option)")
        p.add_argument("--jobs", type=int, default=0,
                       help="parallel window workers (0 = machine parallelism)")

    common(sub.add_parser("ingest", help="parse ticks into intraday grids"))
    common(sub.add_parser("measures", help="daily realized measures from grids"))
    p_spill = sub.add_parser("spillover", help="rolling spillover indices")
    common(p_spill)
    spill_flags(p_spill)
    p_plot = sub.add_parser("plotdata", help="tidy per-figure CSV files")
    common(p_plot)
    p_all = sub.add_parser("all", help="run the whole pipeline")
    common(p_all)
    spill_flags(p_all)
    return parser


def main(argv=None) -> int:
    _setup_logging()
    args = _build_parser().parse_args(argv)
    stage = args.command
    try:
        cfg = load_config(args.config)
        cfg = _apply_overrides(cfg, args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        jobs = getattr(args, "jobs", 0)
        if jobs <= 0:
            jobs = os.cpu_count() or 1
        if args.command in ("ingest", "all"):
            stage = "ingest"
            cmd_ingest(cfg, out)
        if args.command in ("measures", "all"):
            stage = "measures"
            cmd_measures(cfg, out)
        if args.command in ("spillover", "all"):
            stage = "spillover"
            cmd_spillover(cfg, out, jobs)
        if args.command in ("plotdata", "all"):
            stage = "plotdata"
            cmd_plotdata(cfg, out)
    except ConfigError as exc:
        print(f"error [{stage}] config: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error [{stage}] data: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"error [{stage}] numerical: {exc}", file=sys.stderr)
        return 4
    except SpillnetError as exc:  # pragma: no cover - defensive catch-all
        print(f"error [{stage}]: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
