"""Point-of-interest and census inputs, and areal interpolation onto the grid.

Census units arrive as GeoJSON polygons plus a demographics CSV keyed by
``unit_id``; their counts are spread over hex cells in proportion to
overlapped area. POIs arrive as a flat CSV.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .demographics import (
    DIMENSIONS,
    DemographicSchema,
    DemographicVector,
    HexDemographics,
)
from .errors import DataError
from .hexgrid import GeoPoint, HexCellId, HexGrid, Polygon

POI_CATEGORIES = (
    "vaccination_center",
    "grocery",
    "restaurant",
    "school",
    "hospital_clinic",
    "cinema_theatre",
)

POI_HEADER = ("id", "category", "name", "lat", "lon")


@dataclass(frozen=True)
class Poi:
    id: str
    category: str
    name: str
    location: GeoPoint
    supply_units: float = 1.0
    origin: str = "baseline"

    def __post_init__(self):
        if self.category not in POI_CATEGORIES:
            raise DataError(f"unknown POI category {self.category!r}")
        if not (math.isfinite(self.supply_units) and self.supply_units > 0):
            raise DataError(f"POI {self.id}: supply_units must be > 0")
        if self.origin not in ("baseline", "scenario"):
            raise DataError(f"POI {self.id}: bad origin {self.origin!r}")


@dataclass(frozen=True)
class CensusUnit:
    id: str
    boundary: Polygon
    demographics: DemographicVector


def parse_pois(path: str | Path) -> list[Poi]:
    """Read the POI CSV (id,category,name,lat,lon[,supply_units])."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"missing POI file {path}")
    pois: list[Poi] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        header = tuple(reader.fieldnames or ())
        if header[: len(POI_HEADER)] != POI_HEADER:
            raise DataError(f"{path.name}: header must start with {','.join(POI_HEADER)}")
        for i, row in enumerate(reader, start=2):
            pid = row["id"].strip()
            if not pid:
                raise DataError(f"{path.name} row {i}: empty id")
            if pid in seen:
                raise DataError(f"{path.name} row {i}: duplicate POI id {pid}")
            seen.add(pid)
            try:
                loc = GeoPoint(float(row["lat"]), float(row["lon"]))
            except (ValueError, DataError) as exc:
                raise DataError(f"{path.name} row {i}: {exc}") from exc
            supply_text = (row.get("supply_units") or "").strip()
            try:
                supply = float(supply_text) if supply_text else 1.0
            except ValueError as exc:
                raise DataError(f"{path.name} row {i}: bad supply_units {supply_text!r}") from exc
            try:
                pois.append(Poi(pid, row["category"].strip(), row["name"].strip(), loc, supply))
            except DataError as exc:
                raise DataError(f"{path.name} row {i}: {exc}") from exc
    return pois


def _ring_to_points(ring: list[list[float]], context: str) -> tuple[GeoPoint, ...]:
    try:
        return tuple(GeoPoint(lat, lon) for lon, lat in ring)
    except (TypeError, ValueError) as exc:
        raise DataError(f"{context}: malformed ring coordinates") from exc


def _feature_polygons(geometry: dict, context: str) -> list[Polygon]:
    gtype = geometry.get("type")
    if gtype == "Polygon":
        part_coords = [geometry.get("coordinates", [])]
    elif gtype == "MultiPolygon":
        part_coords = geometry.get("coordinates", [])
    else:
        raise DataError(f"{context}: unsupported geometry type {gtype!r}")
    polys = []
    for rings in part_coords:
        if not rings:
            raise DataError(f"{context}: empty polygon coordinates")
        exterior = _ring_to_points(rings[0], context)
        holes = tuple(_ring_to_points(r, context) for r in rings[1:])
        polys.append(Polygon(exterior, holes))
    return polys


def _polygon_planar_area(poly: Polygon, lat0: float) -> float:
    # Local equirectangular shoelace; only area *shares* matter, so any one
    # consistent projection per feature is fine.
    from .hexgrid import EARTH_RADIUS_M

    kx = EARTH_RADIUS_M * math.cos(math.radians(lat0)) * math.pi / 180.0
    ky = EARTH_RADIUS_M * math.pi / 180.0

    def ring_area(ring: tuple[GeoPoint, ...]) -> float:
        total = 0.0
        n = len(ring)
        for i in range(n):
            a, b = ring[i], ring[(i + 1) % n]
            total += (a.lon * kx) * (b.lat * ky) - (b.lon * kx) * (a.lat * ky)
        return abs(total) / 2.0

    return ring_area(poly.exterior) - sum(ring_area(h) for h in poly.holes)


def parse_census(
    geometry_path: str | Path,
    demographics_path: str | Path,
    schema: DemographicSchema,
) -> list[CensusUnit]:
    """Join census polygons (GeoJSON) with their demographics CSV.

    MultiPolygon features are split into one unit per part, with counts
    divided by planar area share.
    """
    geometry_path = Path(geometry_path)
    demographics_path = Path(demographics_path)
    if not geometry_path.exists():
        raise DataError(f"missing census geometry file {geometry_path}")
    if not demographics_path.exists():
        raise DataError(f"missing census demographics file {demographics_path}")

    try:
        collection = json.loads(geometry_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{geometry_path.name}: invalid JSON: {exc}") from exc
    if collection.get("type") != "FeatureCollection":
        raise DataError(f"{geometry_path.name}: expected a FeatureCollection")

    geometries: dict[str, list[Polygon]] = {}
    for feature in collection.get("features", []):
        unit_id = str((feature.get("properties") or {}).get("unit_id", "")).strip()
        if not unit_id:
            raise DataError(f"{geometry_path.name}: feature without unit_id property")
        if unit_id in geometries:
            raise DataError(f"{geometry_path.name}: duplicate unit_id {unit_id}")
        geometries[unit_id] = _feature_polygons(
            feature.get("geometry") or {}, f"{geometry_path.name} unit {unit_id}"
        )

    vectors: dict[str, DemographicVector] = {}
    expected_cols = schema.columns()
    with open(demographics_path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        header = list(reader.fieldnames or ())
        missing = [c for c in ["unit_id", "total", *expected_cols] if c not in header]
        if missing:
            raise DataError(f"{demographics_path.name}: missing columns {missing}")
        for i, row in enumerate(reader, start=2):
            unit_id = row["unit_id"].strip()
            if unit_id in vectors:
                raise DataError(f"{demographics_path.name} row {i}: duplicate unit_id {unit_id}")
            try:
                counts = {
                    dim: {b: float(row[f"{dim}.{b}"]) for b in schema.brackets(dim)}
                    for dim in DIMENSIONS
                }
                vec = DemographicVector(total=float(row["total"]), **counts)
            except ValueError as exc:
                raise DataError(f"{demographics_path.name} row {i}: {exc}") from exc
            vec.validate(schema, context=f"unit {unit_id}")
            vectors[unit_id] = vec

    only_geom = sorted(set(geometries) - set(vectors))
    only_demo = sorted(set(vectors) - set(geometries))
    if only_geom or only_demo:
        raise DataError(
            "census files do not join: "
            f"geometry-only units {only_geom}, demographics-only units {only_demo}"
        )

    units: list[CensusUnit] = []
    for unit_id in sorted(geometries):
        parts = geometries[unit_id]
        vec = vectors[unit_id]
        if len(parts) == 1:
            units.append(CensusUnit(unit_id, parts[0], vec))
            continue
        lat0 = _mean_lat(parts)
        areas = [_polygon_planar_area(p, lat0) for p in parts]
        total_area = sum(areas)
        if total_area <= 0:
            raise DataError(f"unit {unit_id}: zero total area")
        for k, (part, area) in enumerate(zip(parts, areas)):
            units.append(CensusUnit(f"{unit_id}#{k}", part, vec * (area / total_area)))
    return units


def _mean_lat(parts: list[Polygon]) -> float:
    lats = [pt.lat for poly in parts for pt in poly.exterior]
    return sum(lats) / len(lats)


def allocate_demographics(units: list[CensusUnit], grid: HexGrid) -> HexDemographics:
    """Spread every unit's counts over the cells it overlaps, by area share.

    The per-cell sum is taken in sorted unit-id order, so the result is
    bit-identical under any permutation of ``units``.
    """
    if not units:
        raise DataError("no census units to allocate")
    schema = _infer_schema(units[0].demographics)
    contributions: dict[HexCellId, list[tuple[str, DemographicVector]]] = {}
    for unit in units:
        for cell, fraction in grid.polygon_cells(unit.boundary):
            contributions.setdefault(cell, []).append((unit.id, unit.demographics * fraction))
    vectors: dict[HexCellId, DemographicVector] = {}
    for cell, contribs in contributions.items():
        contribs.sort(key=lambda item: item[0])
        acc = DemographicVector.zero(schema)
        for _, vec in contribs:
            acc = acc + vec
        vectors[cell] = acc
    return HexDemographics.from_vectors(schema, vectors)


def _infer_schema(vec: DemographicVector) -> DemographicSchema:
    return DemographicSchema(age_sex=tuple(vec.age_sex.keys()), income=tuple(vec.income.keys()))
