"""What-if overlays: add or remove facilities and recompute impact.

A scenario never mutates baseline state. Only cells covered by the
catchments of added/removed facilities are recomputed, and each affected
cell is re-summed from scratch over its active facilities in ascending id
order - the same reduction the full pipeline uses - so the incremental
result is bit-identical to a from-scratch recomputation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Mapping

from .access import (
    AccessibilityLayer,
    EquityReport,
    SupplyRatio,
    equity_report,
    supply_ratio,
)
from .demographics import DIMENSIONS, HexDemographics
from .errors import DataError
from .hexgrid import GeoPoint, HexCellId, HexGrid
from .ingest import Poi
from .routing import Catchment, Router, TimeWindow


@dataclass(frozen=True)
class Scenario:
    id: str
    city: str
    added: tuple[Poi, ...] = ()
    removed: frozenset[str] = frozenset()
    created_at: float = field(default_factory=time.time)

    def with_added(self, poi: Poi) -> "Scenario":
        return Scenario(self.id, self.city, self.added + (poi,), self.removed, self.created_at)

    def without_added(self, poi_id: str) -> "Scenario":
        kept = tuple(p for p in self.added if p.id != poi_id)
        return Scenario(self.id, self.city, kept, self.removed, self.created_at)

    def with_removed(self, poi_id: str) -> "Scenario":
        return Scenario(self.id, self.city, self.added, self.removed | {poi_id}, self.created_at)


@dataclass(frozen=True)
class BoundingBox:
    min_lat: float
    min_lon: float
    max_lat: float
    max_lon: float

    def contains(self, p: GeoPoint) -> bool:
        return self.min_lat <= p.lat <= self.max_lat and self.min_lon <= p.lon <= self.max_lon


@dataclass(frozen=True)
class BaselineSlice:
    """Precomputed immutable baseline for one (city, category, window)."""

    city: str
    category: str
    window: TimeWindow
    budget_s: int
    catchments: Mapping[str, Catchment]
    ratios: Mapping[str, SupplyRatio]
    layer: AccessibilityLayer
    coverage: Mapping[HexCellId, tuple[str, ...]]  # cell -> covering poi ids, sorted
    bbox: BoundingBox

    @classmethod
    def build(
        cls,
        city: str,
        category: str,
        window: TimeWindow,
        budget_s: int,
        catchments: list[Catchment],
        ratios: list[SupplyRatio],
        layer: AccessibilityLayer,
        bbox: BoundingBox,
    ) -> "BaselineSlice":
        coverage: dict[HexCellId, list[str]] = {}
        for c in catchments:
            for cell in c.cells:
                coverage.setdefault(cell, []).append(c.poi_id)
        return cls(
            city=city,
            category=category,
            window=window,
            budget_s=budget_s,
            catchments={c.poi_id: c for c in catchments},
            ratios={r.poi_id: r for r in ratios},
            layer=layer,
            coverage={cell: tuple(sorted(ids)) for cell, ids in coverage.items()},
            bbox=bbox,
        )


@dataclass(frozen=True)
class ScenarioResult:
    scenario_id: str
    layer: AccessibilityLayer
    delta: Mapping[HexCellId, float]  # nonzero entries only
    baseline_reports: Mapping[str, EquityReport]
    scenario_reports: Mapping[str, EquityReport]
    added_catchments: Mapping[str, Catchment]
    added_ratios: Mapping[str, SupplyRatio]


def apply_scenario(
    baseline: BaselineSlice,
    scenario: Scenario,
    router: Router,
    grid: HexGrid,
    demo: HexDemographics,
    sample_step_s: int = 1800,
    known_poi_ids: frozenset[str] | None = None,
) -> ScenarioResult:
    """Overlay a scenario onto a baseline slice.

    Catchments and supply ratios are computed only for added facilities of
    this slice's category; removed facilities reuse the cached baseline
    values. The returned layer is bit-identical to running the full
    pipeline on the modified facility set.

    ``known_poi_ids`` is the city-wide baseline id set; without it, removed
    ids are validated against this slice only.
    """
    known = known_poi_ids if known_poi_ids is not None else frozenset(baseline.catchments)
    unknown_removed = sorted(scenario.removed - known)
    if unknown_removed:
        raise DataError(f"removed ids not in baseline: {unknown_removed}")
    added_ids = {p.id for p in scenario.added}
    if len(added_ids) != len(scenario.added):
        raise DataError("scenario contains duplicate added POI ids")
    collisions = sorted(added_ids & known)
    if collisions:
        raise DataError(f"added POI ids collide with baseline: {collisions}")

    added_here = [p for p in scenario.added if p.category == baseline.category]
    removed_here = {pid for pid in scenario.removed if pid in baseline.catchments}

    for poi in added_here:
        if not baseline.bbox.contains(poi.location):
            raise DataError(f"added POI {poi.id} is outside the city bounding box")

    added_catchments: dict[str, Catchment] = {}
    added_ratios: dict[str, SupplyRatio] = {}
    for poi in sorted(added_here, key=lambda p: p.id):
        catchment = router.compute_catchment(
            grid, poi, baseline.window, baseline.budget_s, sample_step_s
        )
        added_catchments[poi.id] = catchment
        added_ratios[poi.id] = supply_ratio(poi, catchment, demo)

    affected: set[HexCellId] = set()
    for catchment in added_catchments.values():
        affected |= catchment.cells
    for poi_id in removed_here:
        affected |= baseline.catchments[poi_id].cells

    added_cover: dict[HexCellId, list[str]] = {}
    for poi_id, catchment in added_catchments.items():
        for cell in catchment.cells:
            added_cover.setdefault(cell, []).append(poi_id)

    scores = dict(baseline.layer.scores)
    delta: dict[HexCellId, float] = {}
    for cell in sorted(affected):
        active = [
            pid for pid in baseline.coverage.get(cell, ())
            if pid not in removed_here
        ] + added_cover.get(cell, [])
        active.sort()
        total = 0.0
        for pid in active:
            ratio = added_ratios[pid] if pid in added_ratios else baseline.ratios[pid]
            if ratio.r_value:
                total += ratio.r_value
        total = max(total, 0.0)
        old = scores.get(cell, 0.0)
        if not active and cell not in demo:
            # full recomputation would not key this cell at all
            scores.pop(cell, None)
        else:
            scores[cell] = total
        if total != old:
            delta[cell] = total - old

    layer = AccessibilityLayer(baseline.city, baseline.category, baseline.window.label, scores)
    baseline_reports = {dim: equity_report(baseline.layer, demo, dim) for dim in DIMENSIONS}
    scenario_reports = {dim: equity_report(layer, demo, dim) for dim in DIMENSIONS}
    return ScenarioResult(
        scenario_id=scenario.id,
        layer=layer,
        delta=delta,
        baseline_reports=baseline_reports,
        scenario_reports=scenario_reports,
        added_catchments=added_catchments,
        added_ratios=added_ratios,
    )


def isochrone_preview(
    router: Router,
    grid: HexGrid,
    location: GeoPoint,
    window: TimeWindow,
    budget_s: int,
    bbox: BoundingBox,
    sample_step_s: int = 1800,
) -> Catchment:
    """Catchment of an anonymous, hypothetical facility at ``location``."""
    if not bbox.contains(location):
        raise DataError("preview location is outside the city bounding box")
    probe = Poi(
        id="__preview__", category="vaccination_center", name="preview", location=location
    )
    catchment = router.compute_catchment(grid, probe, window, budget_s, sample_step_s)
    return Catchment("__preview__", "preview", window.label, budget_s, catchment.cells)


@dataclass(frozen=True)
class ReportDiff:
    dimension: str
    brackets: tuple[str, ...]
    score_deltas: tuple[float | None, ...]
    gap_ratio_delta: float | None


def diff_reports(baseline: EquityReport, scenario: EquityReport) -> ReportDiff:
    """Element-wise scenario-minus-baseline deltas; bracket order preserved."""
    if baseline.dimension != scenario.dimension or baseline.brackets != scenario.brackets:
        raise DataError(
            f"report mismatch: {baseline.dimension}/{baseline.brackets} vs "
            f"{scenario.dimension}/{scenario.brackets}"
        )
    deltas = tuple(
        None if (b is None or s is None) else s - b
        for b, s in zip(baseline.scores, scenario.scores)
    )
    if baseline.gap_ratio is None or scenario.gap_ratio is None:
        gap_delta = None
    else:
        gap_delta = scenario.gap_ratio - baseline.gap_ratio
    return ReportDiff(baseline.dimension, baseline.brackets, deltas, gap_delta)


# -- JSON export/import ----------------------------------------------------------


def scenario_to_json(scenario: Scenario) -> dict:
    """Portable scenario form: {id, city, added: [poi objects], removed: [ids]}."""
    return {
        "id": scenario.id,
        "city": scenario.city,
        "added": [
            {
                "id": p.id,
                "category": p.category,
                "name": p.name,
                "lat": p.location.lat,
                "lon": p.location.lon,
                "supply_units": p.supply_units,
            }
            for p in scenario.added
        ],
        "removed": sorted(scenario.removed),
    }


def scenario_from_json(raw: dict) -> Scenario:
    try:
        added = tuple(
            Poi(
                id=p["id"],
                category=p["category"],
                name=p.get("name", p["id"]),
                location=GeoPoint(float(p["lat"]), float(p["lon"])),
                supply_units=float(p.get("supply_units", 1.0)),
                origin="scenario",
            )
            for p in raw.get("added", [])
        )
        return Scenario(
            id=str(raw["id"]),
            city=str(raw["city"]),
            added=added,
            removed=frozenset(str(pid) for pid in raw.get("removed", [])),
        )
    except KeyError as exc:
        raise DataError(f"scenario JSON missing field {exc}") from exc
