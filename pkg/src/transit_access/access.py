"""Two-step floating catchment area scores and demographic equity reports.

Step 1 assigns each facility a supply-to-population ratio over its
catchment; step 2 sums those ratios over every catchment covering a cell.
Per-cell sums always run in ascending facility-id order so that layers are
bit-stable and incremental recomputation can reproduce them exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .demographics import DIMENSIONS, HexDemographics
from .errors import DataError
from .hexgrid import HexCellId, HexGrid
from .ingest import Poi
from .routing import Catchment


@dataclass(frozen=True)
class SupplyRatio:
    """Step-1 result for one facility."""

    poi_id: str
    r_value: float
    catchment_pop: float
    degenerate: bool = False


@dataclass(frozen=True)
class AccessibilityLayer:
    """Cell -> score for one (city, category, window) triple.

    Every cell with demographic data is keyed (explicit zeros); cells inside
    some catchment but without demographics are keyed too so maps stay
    total.
    """

    city: str
    category: str
    window: str
    scores: Mapping[HexCellId, float]


@dataclass(frozen=True)
class EquityReport:
    dimension: str
    brackets: tuple[str, ...]
    scores: tuple[float | None, ...]  # None when the bracket has no population
    populations: tuple[float, ...]
    gap_ratio: float | None

    def score_of(self, bracket: str) -> float | None:
        return self.scores[self.brackets.index(bracket)]


def supply_ratio(poi: Poi, catchment: Catchment, demo: HexDemographics) -> SupplyRatio:
    """Facility supply divided by total population inside its catchment.

    An empty-population catchment yields r = 0 flagged degenerate rather
    than a division error, so downstream layers stay total.
    """
    if catchment.poi_id != poi.id:
        raise DataError(f"catchment {catchment.poi_id} does not belong to POI {poi.id}")
    pop = 0.0
    for cell in catchment.sorted_cells():
        pop += demo.total(cell)
    if pop <= 0.0:
        return SupplyRatio(poi.id, 0.0, pop, degenerate=True)
    return SupplyRatio(poi.id, poi.supply_units / pop, pop)


def accessibility_layer(
    city: str,
    category: str,
    window: str,
    ratios: Sequence[SupplyRatio],
    catchments: Sequence[Catchment],
    demo: HexDemographics,
) -> AccessibilityLayer:
    """Step 2: per-cell sum of catchment ratios, in ascending poi-id order."""
    ratio_by_id = {r.poi_id: r for r in ratios}
    catchment_by_id = {c.poi_id: c for c in catchments}
    if set(ratio_by_id) != set(catchment_by_id) or len(ratio_by_id) != len(ratios):
        raise DataError("supply ratios and catchments do not match one-to-one")

    scores: dict[HexCellId, float] = {cell: 0.0 for cell in demo.cells}
    for poi_id in sorted(ratio_by_id):
        r = ratio_by_id[poi_id].r_value
        if r == 0.0:
            # still key uncovered cells so the map stays total
            for cell in catchment_by_id[poi_id].cells:
                scores.setdefault(cell, 0.0)
            continue
        for cell in catchment_by_id[poi_id].cells:
            scores[cell] = scores.get(cell, 0.0) + r
    return AccessibilityLayer(city, category, window, scores)


def group_weighted_score(
    layer: AccessibilityLayer,
    demo: HexDemographics,
    dimension: str,
    bracket: str,
) -> float | None:
    """Population-weighted mean score for one demographic bracket.

    Returns None when the bracket has no population city-wide.
    """
    counts = demo.bracket_array(dimension, bracket)
    pop = float(counts.sum())
    if pop <= 0.0:
        return None
    weighted = 0.0
    for i, cell in enumerate(demo.cells):
        c = counts[i]
        if c:
            weighted += layer.scores.get(cell, 0.0) * c
    return weighted / pop


def equity_report(layer: AccessibilityLayer, demo: HexDemographics, dimension: str) -> EquityReport:
    """Per-bracket weighted scores plus the max/min gap ratio.

    Brackets with zero population are reported with a None score and are
    excluded from the gap. If the populated minimum score is 0 while the
    maximum is positive the gap is infinite; if all populated scores are 0
    the gap is 1 (no spread).
    """
    brackets = demo.schema.brackets(dimension)
    scores: list[float | None] = []
    populations: list[float] = []
    for bracket in brackets:
        populations.append(demo.bracket_total(dimension, bracket))
        scores.append(group_weighted_score(layer, demo, dimension, bracket))
    populated = [s for s, p in zip(scores, populations) if p > 0 and s is not None]
    if not populated:
        gap: float | None = None
    else:
        hi, lo = max(populated), min(populated)
        if hi == lo:
            gap = 1.0
        elif lo == 0.0:
            gap = math.inf
        else:
            gap = hi / lo
    return EquityReport(dimension, brackets, tuple(scores), tuple(populations), gap)


def city_summary(
    layers: Mapping[str, AccessibilityLayer], demo: HexDemographics
) -> dict[str, float | None]:
    """Total-population weighted score per POI category."""
    out: dict[str, float | None] = {}
    totals = demo.totals_array()
    pop = float(totals.sum())
    for category in sorted(layers):
        layer = layers[category]
        if pop <= 0.0:
            out[category] = None
            continue
        weighted = 0.0
        for i, cell in enumerate(demo.cells):
            c = totals[i]
            if c:
                weighted += layer.scores.get(cell, 0.0) * c
        out[category] = weighted / pop
    return out


# -- presentation helpers ------------------------------------------------------


def round_sig(x: float, digits: int = 4) -> float:
    """Round to significant digits for display payloads."""
    if x == 0 or not math.isfinite(x):
        return x
    return round(x, digits - 1 - math.floor(math.log10(abs(x))))


def layer_csv(layer: AccessibilityLayer) -> str:
    """Full-precision cache format: cell_id,score rows sorted by cell."""
    lines = ["cell_id,score"]
    for cell in sorted(layer.scores):
        lines.append(f"{cell.key()},{layer.scores[cell]!r}")
    return "\n".join(lines) + "\n"


def layer_from_csv(text: str, city: str, category: str, window: str) -> AccessibilityLayer:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "cell_id,score":
        raise DataError("bad layer CSV header")
    scores = {}
    for line in lines[1:]:
        key, value = line.split(",")
        scores[HexCellId.parse(key)] = float(value)
    return AccessibilityLayer(city, category, window, scores)


def layer_geojson(
    layer: AccessibilityLayer,
    demo: HexDemographics,
    grid: HexGrid,
    dimension: str,
) -> dict:
    """FeatureCollection of cell hexagons with score and selected demographics."""
    if dimension not in DIMENSIONS:
        raise DataError(f"unknown demographic dimension {dimension!r}")
    brackets = demo.schema.brackets(dimension)
    features = []
    for cell in sorted(layer.scores):
        ring = [
            [round(p.lon, 7), round(p.lat, 7)]
            for p in grid.cell_polygon(cell).exterior
        ]
        ring.append(ring[0])
        vec = demo.vector(cell)
        props: dict = {
            "cell_id": cell.key(),
            "score": round_sig(layer.scores[cell]),
            "population": round_sig(vec.total if vec else 0.0),
        }
        for bracket in brackets:
            props[f"{dimension}.{bracket}"] = round_sig(
                vec.counts(dimension)[bracket] if vec else 0.0
            )
        features.append({
            "type": "Feature",
            "geometry": {"type": "Polygon", "coordinates": [ring]},
            "properties": props,
        })
    return {"type": "FeatureCollection", "features": features}


def report_json(report: EquityReport) -> dict:
    gap = report.gap_ratio
    return {
        "dimension": report.dimension,
        "brackets": [
            {"name": name, "score": score, "population": pop}
            for name, score, pop in zip(report.brackets, report.scores, report.populations)
        ],
        "gap_ratio": None if gap is None else (gap if math.isfinite(gap) else "inf"),
    }


def report_from_json(raw: dict) -> EquityReport:
    gap = raw.get("gap_ratio")
    if gap == "inf":
        gap = math.inf
    return EquityReport(
        dimension=raw["dimension"],
        brackets=tuple(b["name"] for b in raw["brackets"]),
        scores=tuple(b["score"] for b in raw["brackets"]),
        populations=tuple(b["population"] for b in raw["brackets"]),
        gap_ratio=gap,
    )


def reports_to_json(reports: Iterable[EquityReport]) -> str:
    payload = {r.dimension: report_json(r) for r in reports}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"
