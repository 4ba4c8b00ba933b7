"""City bundle assembly: ingest -> routing -> access, plus the file cache.

A bundle is everything the server needs for one city, immutable after
build. The cache directory holds the expensive intermediate results
(catchments) and the derived layers/reports in deterministic text formats,
so two builds over identical inputs produce byte-identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from threading import Lock

from .access import (
    AccessibilityLayer,
    EquityReport,
    accessibility_layer,
    city_summary,
    equity_report,
    layer_csv,
    layer_geojson,
    reports_to_json,
    supply_ratio,
)
from .config import CityConfig, RunConfig
from .demographics import DIMENSIONS, HexDemographics
from .errors import DataError
from .gtfs import TimetableNetwork, parse_gtfs
from .hexgrid import HexGrid
from .ingest import Poi, allocate_demographics, parse_census, parse_pois
from .routing import (
    Catchment,
    Router,
    TimeWindow,
    catchment_batch,
    catchments_from_ndjson,
    catchments_to_ndjson,
)
from .scenario import BaselineSlice, BoundingBox

BBOX_MARGIN_M = 2000.0


@dataclass
class CityBundle:
    """Immutable per-city state shared by all requests."""

    city_id: str
    name: str
    grid: HexGrid
    network: TimetableNetwork
    router: Router
    demo: HexDemographics
    pois: dict[str, Poi]
    windows: dict[str, TimeWindow]
    budget_s: int
    sample_step_s: int
    slices: dict[tuple[str, str], BaselineSlice]  # (category, window label)
    reports: dict[tuple[str, str, str], EquityReport]  # (category, window, dimension)
    summaries: dict[str, dict[str, float | None]]  # window label -> category -> score
    bbox: BoundingBox
    _geojson_cache: dict[tuple[str, str, str], bytes] = field(default_factory=dict)
    _geojson_lock: Lock = field(default_factory=Lock)

    @property
    def categories(self) -> list[str]:
        return sorted({p.category for p in self.pois.values()})

    def baseline_poi_ids(self) -> frozenset[str]:
        return frozenset(self.pois)

    def slice_for(self, category: str, window: str) -> BaselineSlice:
        try:
            return self.slices[(category, window)]
        except KeyError:
            raise DataError(f"no baseline for category={category} window={window}") from None

    def layer_geojson_bytes(self, category: str, window: str, dimension: str) -> bytes:
        """Serialized layer payload, memoized per (category, window, dimension)."""
        key = (category, window, dimension)
        cached = self._geojson_cache.get(key)
        if cached is not None:
            return cached
        with self._geojson_lock:
            cached = self._geojson_cache.get(key)
            if cached is None:
                layer = self.slice_for(category, window).layer
                payload = layer_geojson(layer, self.demo, self.grid, dimension)
                cached = json.dumps(payload, separators=(",", ":"), sort_keys=True).encode()
                self._geojson_cache[key] = cached
        return cached


def compute_bbox(
    demo: HexDemographics, grid: HexGrid, network: TimetableNetwork, pois: list[Poi]
) -> BoundingBox:
    """Lat/lon box around all city data, padded by a walkable margin."""
    lats: list[float] = []
    lons: list[float] = []
    for cell in demo.cells:
        center = grid.cell_center(cell)
        lats.append(center.lat)
        lons.append(center.lon)
    for stop in network.stops.values():
        lats.append(stop.location.lat)
        lons.append(stop.location.lon)
    for poi in pois:
        lats.append(poi.location.lat)
        lons.append(poi.location.lon)
    if not lats:
        raise DataError("cannot compute a bounding box for an empty city")
    from .hexgrid import EARTH_RADIUS_M

    dlat = math.degrees(BBOX_MARGIN_M / EARTH_RADIUS_M)
    dlon = dlat / max(math.cos(math.radians(grid.anchor.lat)), 1e-9)
    return BoundingBox(
        min_lat=min(lats) - dlat,
        min_lon=min(lons) - dlon,
        max_lat=max(lats) + dlat,
        max_lon=max(lons) + dlon,
    )


def build_slices(
    city_id: str,
    grid: HexGrid,
    router: Router,
    demo: HexDemographics,
    pois: list[Poi],
    windows: dict[str, TimeWindow],
    budget_s: int,
    sample_step_s: int,
    bbox: BoundingBox,
    cached_catchments: dict[tuple[str, str], list[Catchment]] | None = None,
) -> dict[tuple[str, str], BaselineSlice]:
    """One BaselineSlice per (category, window); catchments reused if cached."""
    by_category: dict[str, list[Poi]] = {}
    for poi in pois:
        by_category.setdefault(poi.category, []).append(poi)

    slices: dict[tuple[str, str], BaselineSlice] = {}
    for category in sorted(by_category):
        cat_pois = sorted(by_category[category], key=lambda p: p.id)
        for label in sorted(windows):
            window = windows[label]
            key = (category, label)
            if cached_catchments is not None and key in cached_catchments:
                catchments = cached_catchments[key]
            else:
                batch = catchment_batch(router, grid, cat_pois, [window], budget_s, sample_step_s)
                if batch.errors:
                    raise DataError(f"catchment failures: {batch.errors}")
                catchments = batch.catchments
            ratios = [
                supply_ratio(poi, catchment, demo)
                for poi, catchment in zip(cat_pois, catchments)
            ]
            layer = accessibility_layer(city_id, category, label, ratios, catchments, demo)
            slices[key] = BaselineSlice.build(
                city_id, category, window, budget_s, catchments, ratios, layer, bbox
            )
    return slices


def build_city_bundle(
    city_cfg: CityConfig,
    run_cfg: RunConfig,
    cached_catchments: dict[tuple[str, str], list[Catchment]] | None = None,
) -> CityBundle:
    """Run the full per-city pipeline from configured input files."""
    network = parse_gtfs(city_cfg.gtfs_dir)
    pois = parse_pois(city_cfg.pois)
    units = parse_census(city_cfg.census_geojson, city_cfg.census_demographics, run_cfg.schema)

    grid = HexGrid(city_cfg.center, city_cfg.edge_m)
    demo = allocate_demographics(units, grid)
    params = replace(run_cfg.router_params, anchor=city_cfg.center)
    router = Router(network, params)
    bbox = compute_bbox(demo, grid, network, pois)

    slices = build_slices(
        city_cfg.id, grid, router, demo, pois, run_cfg.windows,
        run_cfg.budget_s, run_cfg.sample_step_s, bbox, cached_catchments,
    )

    reports: dict[tuple[str, str, str], EquityReport] = {}
    summaries: dict[str, dict[str, float | None]] = {}
    for label in sorted(run_cfg.windows):
        window_layers: dict[str, AccessibilityLayer] = {}
        for (category, win), slc in slices.items():
            if win != label:
                continue
            window_layers[category] = slc.layer
            for dim in DIMENSIONS:
                reports[(category, label, dim)] = equity_report(slc.layer, demo, dim)
        summaries[label] = city_summary(window_layers, demo)

    return CityBundle(
        city_id=city_cfg.id,
        name=city_cfg.name,
        grid=grid,
        network=network,
        router=router,
        demo=demo,
        pois={p.id: p for p in pois},
        windows=dict(run_cfg.windows),
        budget_s=run_cfg.budget_s,
        sample_step_s=run_cfg.sample_step_s,
        slices=slices,
        reports=reports,
        summaries=summaries,
        bbox=bbox,
    )


# -- cache ---------------------------------------------------------------------


def city_cache_dir(run_cfg: RunConfig, city_id: str) -> Path:
    return run_cfg.cache_dir / city_id


def write_cache(bundle: CityBundle, run_cfg: RunConfig) -> list[Path]:
    """Write all deterministic cache files for a city; returns written paths."""
    out_dir = city_cache_dir(run_cfg, bundle.city_id)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(name: str, text: str) -> None:
        path = out_dir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)

    emit("demographics.csv", bundle.demo.to_csv())
    for (category, label), slc in sorted(bundle.slices.items()):
        emit(f"catchments_{category}_{label}.ndjson",
             catchments_to_ndjson(slc.catchments.values()))
        emit(f"layer_{category}_{label}.csv", layer_csv(slc.layer))
        emit(f"reports_{category}_{label}.json", reports_to_json(
            [bundle.reports[(category, label, dim)] for dim in DIMENSIONS]
        ))
    emit("summary.json", json.dumps(bundle.summaries, indent=2, sort_keys=True) + "\n")
    return written


def load_cached_catchments(
    run_cfg: RunConfig, city_cfg: CityConfig
) -> dict[tuple[str, str], list[Catchment]] | None:
    """All catchment files for the city, or None when any is missing."""
    out_dir = city_cache_dir(run_cfg, city_cfg.id)
    if not out_dir.is_dir():
        return None
    pois = parse_pois(city_cfg.pois)
    categories = sorted({p.category for p in pois})
    cached: dict[tuple[str, str], list[Catchment]] = {}
    for category in categories:
        for label in sorted(run_cfg.windows):
            path = out_dir / f"catchments_{category}_{label}.ndjson"
            if not path.exists():
                return None
            cached[(category, label)] = catchments_from_ndjson(path.read_text(encoding="utf-8"))
    return cached


def load_or_build_bundle(run_cfg: RunConfig, city_cfg: CityConfig, use_cache: bool = True) -> CityBundle:
    cached = load_cached_catchments(run_cfg, city_cfg) if use_cache else None
    return build_city_bundle(city_cfg, run_cfg, cached)


def build_all(run_cfg: RunConfig, use_cache: bool = False) -> dict[str, CityBundle]:
    return {
        city_cfg.id: load_or_build_bundle(run_cfg, city_cfg, use_cache)
        for city_cfg in run_cfg.cities
    }
