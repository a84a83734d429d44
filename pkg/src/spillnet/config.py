"""Run configuration: one YAML file drives the whole pipeline.

Paths inside the file are resolved relative to the file's own directory, so a
config can travel with its data. CLI flags override individual values; the
manifest records what was actually used.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, time
from pathlib import Path

import yaml

from .errors import ConfigError

__all__ = ["RunConfig", "load_config"]


@dataclass
class RunConfig:
    config_path: Path
    assets: dict[str, Path] = field(default_factory=dict)
    session_start: time = time(17, 0)
    session_end: time = time(16, 0)
    timezone: str = "America/Chicago"
    interval_minutes: int = 5
    min_ticks: int = 10
    weekends: bool = True
    year_end: bool = True
    holidays: list[date] = field(default_factory=list)
    log_transform: bool = False
    measures_path: Path | None = None
    mode: str = "plain"
    window: int = 200
    horizon: int = 10
    lags: int = 2
    bootstrap: int = 500
    block_length: int = 50
    ci_level: float = 0.95
    seed: int = 0

    def resolved_parameters(self) -> dict:
        """Flat view of every resolved value, for the run manifest."""
        return {
            "assets": {a: str(p) for a, p in self.assets.items()},
            "session_start": self.session_start.isoformat(timespec="minutes"),
            "session_end": self.session_end.isoformat(timespec="minutes"),
            "timezone": self.timezone,
            "interval_minutes": self.interval_minutes,
            "min_ticks": self.min_ticks,
            "weekends": self.weekends,
            "year_end": self.year_end,
            "holidays": [d.isoformat() for d in self.holidays],
            "log_transform": self.log_transform,
            "measures_path": str(self.measures_path) if self.measures_path else None,
            "mode": self.mode,
            "window": self.window,
            "horizon": self.horizon,
            "lags": self.lags,
            "bootstrap": self.bootstrap,
            "block_length": self.block_length,
            "ci_level": self.ci_level,
            "seed": self.seed,
        }


def _as_time(value, key: str) -> time:
    # YAML 1.1 reads an unquoted 17:00 as the sexagesimal integer 1020.
    if isinstance(value, time):
        return value
    if isinstance(value, int):
        return time(value // 60, value % 60)
    if isinstance(value, str):
        try:
            return time.fromisoformat(value)
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot parse time {value!r}") from exc
    raise ConfigError(f"{key}: expected a HH:MM time, got {value!r}")


def _as_date(value, key: str) -> date:
    if isinstance(value, date):
        return value
    if isinstance(value, str):
        try:
            return date.fromisoformat(value)
        except ValueError as exc:
            raise ConfigError(f"{key}: cannot parse date {value!r}") from exc
    raise ConfigError(f"{key}: expected a date, got {value!r}")


def _as_bool(value, key: str) -> bool:
    if isinstance(value, bool):
        return value
    raise ConfigError(f"{key}: expected true/false, got {value!r}")


def _as_int(value, key: str, minimum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{key}: must be >= {minimum}, got {value}")
    return value


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")

    base = path.parent
    cfg = RunConfig(config_path=path)

    assets = raw.get("assets", {})
    if assets:
        if not isinstance(assets, dict):
            raise ConfigError("assets: expected a mapping of id to file path")
        cfg.assets = {str(a): (base / str(p)) for a, p in assets.items()}

    session = raw.get("session", {})
    if session:
        if "start" in session:
            cfg.session_start = _as_time(session["start"], "session.start")
        if "end" in session:
            cfg.session_end = _as_time(session["end"], "session.end")
        if "timezone" in session:
            cfg.timezone = str(session["timezone"])

    ingest = raw.get("ingest", {})
    if ingest:
        if "interval_minutes" in ingest:
            cfg.interval_minutes = _as_int(ingest["interval_minutes"], "ingest.interval_minutes", 1)
        if "min_ticks" in ingest:
            cfg.min_ticks = _as_int(ingest["min_ticks"], "ingest.min_ticks", 0)
        if "weekends" in ingest:
            cfg.weekends = _as_bool(ingest["weekends"], "ingest.weekends")
        if "year_end" in ingest:
            cfg.year_end = _as_bool(ingest["year_end"], "ingest.year_end")
        if "holidays" in ingest:
            cfg.holidays = [_as_date(d, "ingest.holidays") for d in ingest["holidays"]]

    measures = raw.get("measures", {})
    if measures and "log_transform" in measures:
        cfg.log_transform = _as_bool(measures["log_transform"], "measures.log_transform")

    if raw.get("measures_path"):
        cfg.measures_path = base / str(raw["measures_path"])

    spill = raw.get("spillover", {})
    if spill:
        if "mode" in spill:
            cfg.mode = str(spill["mode"])
            if cfg.mode not in ("plain", "signed"):
                raise ConfigError(f"spillover.mode: expected plain or signed, got {cfg.mode!r}")
        if "window" in spill:
            cfg.window = _as_int(spill["window"], "spillover.window", 2)
        if "horizon" in spill:
            cfg.horizon = _as_int(spill["horizon"], "spillover.horizon", 1)
        if "lags" in spill:
            cfg.lags = _as_int(spill["lags"], "spillover.lags", 1)
        if "bootstrap" in spill:
            cfg.bootstrap = _as_int(spill["bootstrap"], "spillover.bootstrap", 0)
        if "block_length" in spill:
            cfg.block_length = _as_int(spill["block_length"], "spillover.block_length", 1)
        if "ci_level" in spill:
            lvl = spill["ci_level"]
            if not isinstance(lvl, (int, float)) or not 0.0 < float(lvl) < 1.0:
                raise ConfigError(f"spillover.ci_level: expected a fraction in (0,1), got {lvl!r}")
            cfg.ci_level = float(lvl)
        if "seed" in spill:
            cfg.seed = _as_int(spill["seed"], "spillover.seed", 0)

    return cfg
