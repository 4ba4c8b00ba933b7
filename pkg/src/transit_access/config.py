"""Run-level configuration: cities, windows, routing knobs, bracket names."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .demographics import DemographicSchema
from .errors import ConfigError
from .hexgrid import DEFAULT_EDGE_M, GeoPoint
from .routing import (
    DEFAULT_BUDGET_S,
    DEFAULT_SAMPLE_STEP_S,
    DEFAULT_WINDOWS,
    RouterParams,
    TimeWindow,
)

_CLOCK_RE = re.compile(r"^(\d{1,2}):(\d{2})(?::(\d{2}))?$")


def _clock_seconds(text: str) -> int:
    m = _CLOCK_RE.match(str(text).strip())
    if not m:
        raise ConfigError(f"bad clock time {text!r}, expected HH:MM[:SS]")
    return int(m.group(1)) * 3600 + int(m.group(2)) * 60 + int(m.group(3) or 0)


@dataclass(frozen=True)
class CityConfig:
    id: str
    name: str
    center: GeoPoint
    edge_m: float
    gtfs_dir: Path
    pois: Path
    census_geojson: Path
    census_demographics: Path


@dataclass(frozen=True)
class RunConfig:
    cities: tuple[CityConfig, ...]
    windows: dict[str, TimeWindow]
    router_params: RouterParams
    budget_s: int
    sample_step_s: int
    schema: DemographicSchema
    cache_dir: Path
    host: str = "127.0.0.1"
    port: int = 8000
    static_dir: Path | None = field(default=None)


def load_config(path: str | Path) -> RunConfig:
    """Parse the YAML run configuration; all relative paths resolve against it."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    base = path.parent

    def resolve(p: str) -> Path:
        candidate = Path(p)
        return candidate if candidate.is_absolute() else (base / candidate)

    try:
        demo_cfg = raw.get("demographics", {}) or {}
        schema = DemographicSchema(
            age_sex=tuple(demo_cfg.get("age_sex_brackets", DemographicSchema().age_sex)),
            income=tuple(demo_cfg.get("income_brackets", DemographicSchema().income)),
        )

        windows: dict[str, TimeWindow] = {}
        windows_cfg = raw.get("windows") or {
            label: None for label in DEFAULT_WINDOWS
        }
        for label, bounds in windows_cfg.items():
            if bounds is None:
                windows[label] = TimeWindow.default(label)
            else:
                start, end = bounds
                windows[label] = TimeWindow(label, _clock_seconds(start), _clock_seconds(end))

        routing_cfg = raw.get("routing", {}) or {}
        router_params = RouterParams(
            walk_speed_mps=float(routing_cfg.get("walk_speed_mps", 1.4)),
            max_walk_m=float(routing_cfg.get("max_walk_m", 800.0)),
            transfer_slack_s=int(routing_cfg.get("transfer_slack_s", 60)),
            weekday=str(routing_cfg.get("weekday", "wednesday")),
        )
        budget_s = int(routing_cfg.get("budget_s", DEFAULT_BUDGET_S))
        sample_step_s = int(routing_cfg.get("sample_step_s", DEFAULT_SAMPLE_STEP_S))
        if budget_s <= 0 or sample_step_s <= 0:
            raise ConfigError("budget_s and sample_step_s must be positive")

        cities = []
        for c in raw.get("cities", []):
            center = c.get("center") or {}
            cities.append(CityConfig(
                id=str(c["id"]),
                name=str(c.get("name", c["id"])),
                center=GeoPoint(float(center["lat"]), float(center["lon"])),
                edge_m=float(c.get("edge_m", DEFAULT_EDGE_M)),
                gtfs_dir=resolve(c["gtfs_dir"]),
                pois=resolve(c["pois"]),
                census_geojson=resolve(c["census_geojson"]),
                census_demographics=resolve(c["census_demographics"]),
            ))
        if not cities:
            raise ConfigError("config declares no cities")
        ids = [c.id for c in cities]
        if len(set(ids)) != len(ids):
            raise ConfigError(f"duplicate city ids: {ids}")

        listen = raw.get("listen", {}) or {}
        static_dir = raw.get("static_dir")
        return RunConfig(
            cities=tuple(cities),
            windows=windows,
            router_params=router_params,
            budget_s=budget_s,
            sample_step_s=sample_step_s,
            schema=schema,
            cache_dir=resolve(str(raw.get("cache_dir", "cache"))),
            host=str(listen.get("host", "127.0.0.1")),
            port=int(listen.get("port", 8000)),
            static_dir=resolve(str(static_dir)) if static_dir else None,
        )
    except ConfigError:
        raise
    except Exception as exc:  # missing keys, bad types
        raise ConfigError(f"invalid config: {exc}") from exc
