"""Synthetic city generators.

Gridville is the shipped desk-scale fixture: ~400 hex cells, two crossing
transit lines, 12 census units and a handful of POIs per category. The
generator is deterministic for a given seed and writes the exact input
formats the ingest module consumes, so it doubles as format documentation.

The module also builds randomized in-memory timetables and census
geometries for oracle-based tests, and a large synthetic city for scale
smoke tests.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from pathlib import Path

import numpy as np

from .demographics import (
    DIMENSIONS,
    DemographicSchema,
    DemographicVector,
    HexDemographics,
)
from .gtfs import (
    Footpath,
    Route,
    Stop,
    TimetableNetwork,
    Trip,
    TripStop,
    write_gtfs,
)
from .hexgrid import SQRT3, GeoPoint, HexCellId, HexGrid, Polygon
from .ingest import POI_CATEGORIES, Poi

GRIDVILLE_CENTER = GeoPoint(39.9, -83.0)

_POI_COUNTS = {
    "vaccination_center": 4,
    "grocery": 5,
    "restaurant": 6,
    "school": 4,
    "hospital_clinic": 3,
    "cinema_theatre": 3,
}


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


def gridville_network(grid: HexGrid) -> TimetableNetwork:
    """Two crossing lines with 20-minute headways, 06:00-21:00."""
    stops: dict[str, Stop] = {}
    ew_ids, ns_ids = [], []
    for k in range(14):
        x = -3900.0 + 600.0 * k
        sid = f"ew{k:02d}"
        stops[sid] = Stop(sid, f"East-West {k}", grid.unproject(x, 0.0))
        ew_ids.append(sid)
    for k in range(9):
        y = -2400.0 + 600.0 * k
        sid = f"ns{k:02d}"
        stops[sid] = Stop(sid, f"North-South {k}", grid.unproject(0.0, y))
        ns_ids.append(sid)

    routes = {
        "EW": Route("EW", "Crosstown", "3"),
        "NS": Route("NS", "Mainline", "3"),
    }
    services = {"wk": frozenset(
        ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")
    )}

    trips: dict[str, Trip] = {}
    hop_s = 90

    def add_trips(route_id: str, stop_ids: list[str]) -> None:
        for direction, ordered in (("o", stop_ids), ("b", stop_ids[::-1])):
            for n, start_s in enumerate(range(6 * 3600, 21 * 3600 + 1, 1200)):
                tid = f"{route_id}-{direction}-{n:02d}"
                sts = tuple(
                    TripStop(i + 1, sid, start_s + hop_s * i, start_s + hop_s * i)
                    for i, sid in enumerate(ordered)
                )
                trips[tid] = Trip(tid, route_id, "wk", sts)

    add_trips("EW", ew_ids)
    add_trips("NS", ns_ids)

    footpaths = (Footpath("ew06", "ns04", 120), Footpath("ns04", "ew06", 120))
    return TimetableNetwork(stops, routes, trips, services, footpaths)


def gridville_census(
    grid: HexGrid, schema: DemographicSchema, seed: int
) -> list[tuple[str, Polygon, DemographicVector]]:
    """12 rectangular census units in a 4x3 arrangement over 8 km x 5 km."""
    rng = random.Random(seed)
    units = []
    x0, y0 = -4000.0, -2500.0
    w, h = 2000.0, 5000.0 / 3.0
    for col in range(4):
        for row in range(3):
            uid = f"bg{col}{row}"
            xs = x0 + col * w
            ys = y0 + row * h
            ring = tuple(
                grid.unproject(x, y)
                for x, y in [(xs, ys), (xs + w, ys), (xs + w, ys + h), (xs, ys + h)]
            )
            total = float(rng.randint(400, 3000))
            units.append((uid, Polygon(ring), _random_vector(rng, schema, total)))
    return units


def _random_vector(rng: random.Random, schema: DemographicSchema, total: float) -> DemographicVector:
    def split(brackets: tuple[str, ...]) -> dict[str, float]:
        weights = [rng.random() + 0.05 for _ in brackets]
        s = sum(weights)
        counts = {b: total * w / s for b, w in zip(brackets, weights)}
        # close the sum exactly on the last bracket
        drift = total - sum(counts.values())
        counts[brackets[-1]] += drift
        return counts

    return DemographicVector(
        total=total,
        race=split(schema.brackets("race")),
        age_sex=split(schema.brackets("age_sex")),
        income=split(schema.brackets("income")),
        vehicle=split(schema.brackets("vehicle")),
    )


def gridville_pois(grid: HexGrid, seed: int) -> list[Poi]:
    rng = random.Random(seed + 1)
    pois = []
    for category in POI_CATEGORIES:
        count = _POI_COUNTS[category]
        for k in range(count):
            pid = f"{category[:4]}{k}"
            if k == 0:
                # on the east-west line, guaranteed transit access
                x, y = -3900.0 + 600.0 * rng.randint(2, 11), rng.uniform(-150.0, 150.0)
            elif k == 1:
                # far corner transit desert
                x, y = rng.uniform(3200.0, 3900.0), rng.uniform(-2400.0, -1800.0)
            else:
                x, y = rng.uniform(-3800.0, 3800.0), rng.uniform(-2300.0, 2300.0)
            supply = 2.5 if (category == "hospital_clinic" and k == 2) else 1.0
            pois.append(Poi(pid, category, f"{category} {k}", grid.unproject(x, y), supply))
    return pois


def write_gridville(out_dir: str | Path, seed: int = 7) -> Path:
    """Generate the Gridville input tree + config; returns the config path."""
    out_dir = Path(out_dir)
    data_dir = out_dir / "gridville"
    gtfs_dir = data_dir / "gtfs"
    gtfs_dir.mkdir(parents=True, exist_ok=True)

    grid = HexGrid(GRIDVILLE_CENTER)
    schema = DemographicSchema()
    network = gridville_network(grid)
    units = gridville_census(grid, schema, seed)
    pois = gridville_pois(grid, seed)

    write_gtfs(network, gtfs_dir)

    _write_csv(
        data_dir / "pois.csv",
        ["id", "category", "name", "lat", "lon", "supply_units"],
        [[p.id, p.category, p.name, repr(p.location.lat), repr(p.location.lon),
          repr(p.supply_units)] for p in pois],
    )

    features = []
    for uid, poly, _vec in units:
        ring = [[pt.lon, pt.lat] for pt in poly.exterior]
        ring.append(ring[0])
        features.append({
            "type": "Feature",
            "properties": {"unit_id": uid},
            "geometry": {"type": "Polygon", "coordinates": [ring]},
        })
    (data_dir / "census.geojson").write_text(
        json.dumps({"type": "FeatureCollection", "features": features}, indent=2) + "\n",
        encoding="utf-8",
    )

    demo_header = ["unit_id", "total"] + schema.columns()
    demo_rows = []
    for uid, _poly, vec in units:
        row = [uid, repr(vec.total)]
        for col in schema.columns():
            dim, bracket = col.split(".", 1)
            row.append(repr(vec.counts(dim)[bracket]))
        demo_rows.append(row)
    _write_csv(data_dir / "demographics.csv", demo_header, demo_rows)

    config = f"""\
cache_dir: cache
listen:
  host: 127.0.0.1
  port: 8080
static_dir: ../frontend/dist
windows:
  morning: ["07:00", "09:00"]
  afternoon: ["12:00", "14:00"]
  evening: ["17:00", "19:00"]
routing:
  walk_speed_mps: 1.4
  max_walk_m: 800
  transfer_slack_s: 60
  weekday: wednesday
  budget_s: 1800
  sample_step_s: 1800
cities:
  - id: gridville
    name: Gridville
    center: {{lat: {GRIDVILLE_CENTER.lat}, lon: {GRIDVILLE_CENTER.lon}}}
    gtfs_dir: gridville/gtfs
    pois: gridville/pois.csv
    census_geojson: gridville/census.geojson
    census_demographics: gridville/demographics.csv
"""
    config_path = out_dir / "config.yaml"
    config_path.write_text(config, encoding="utf-8")
    return config_path


# -- randomized oracle fixtures -------------------------------------------------


def random_network(seed: int, overnight: bool = False) -> TimetableNetwork:
    """Small random timetable: <= 10 stops, <= 5 trips, optional HH >= 24 times."""
    rng = random.Random(seed)
    grid = HexGrid(GRIDVILLE_CENTER)
    n_stops = rng.randint(4, 10)
    stops = {}
    for i in range(n_stops):
        sid = f"s{i}"
        x = rng.uniform(-2500.0, 2500.0)
        y = rng.uniform(-2500.0, 2500.0)
        stops[sid] = Stop(sid, sid, grid.unproject(x, y))
    stop_ids = sorted(stops)

    routes = {"r0": Route("r0", "r0", "3")}
    services = {"svc": frozenset(("wednesday",))}
    base = 25 * 3600 if overnight else 8 * 3600

    trips = {}
    n_trips = rng.randint(1, 5)
    for t in range(n_trips):
        length = rng.randint(2, min(5, n_stops))
        path = rng.sample(stop_ids, length)
        start = base + rng.randint(0, 1800)
        sts = []
        now = start
        for i, sid in enumerate(path):
            arr = now
            dep = arr + rng.choice((0, 30, 60))
            sts.append(TripStop(i + 1, sid, arr, dep))
            now = dep + rng.randint(120, 600)
        trips[f"t{t}"] = Trip(f"t{t}", "r0", "svc", tuple(sts))

    footpaths = []
    if rng.random() < 0.5 and n_stops >= 2:
        a, b = rng.sample(stop_ids, 2)
        footpaths = [Footpath(a, b, rng.randint(30, 240)),
                     Footpath(b, a, rng.randint(30, 240))]
    return TimetableNetwork(stops, routes, trips, services, tuple(sorted(footpaths)))


def random_census_polygon(rng: random.Random, grid: HexGrid) -> Polygon:
    """Random convex polygon (hull of points on a jittered ellipse)."""
    cx = rng.uniform(-3000.0, 3000.0)
    cy = rng.uniform(-3000.0, 3000.0)
    rx = rng.uniform(250.0, 1500.0)
    ry = rng.uniform(250.0, 1500.0)
    k = rng.randint(4, 9)
    angles = sorted(rng.uniform(0.0, 2.0 * math.pi) for _ in range(k))
    if angles[-1] - angles[0] < 1.0:  # avoid near-degenerate slivers
        angles = [2.0 * math.pi * i / k for i in range(k)]
    ring = tuple(
        grid.unproject(cx + rx * math.cos(a), cy + ry * math.sin(a)) for a in angles
    )
    return Polygon(ring)


# -- scale smoke fixtures --------------------------------------------------------


def synthetic_demographics(
    grid: HexGrid, n_cells: int, schema: DemographicSchema, seed: int
) -> HexDemographics:
    """Exactly n_cells cells filling a centered square region, seeded populations."""
    e = grid.edge_m
    side_m = math.sqrt(n_cells * grid.cell_area_m2)
    half = side_m / 2.0
    cells: list[HexCellId] = []
    q_hi = math.ceil(half / (1.5 * e))
    for q in range(-q_hi, q_hi + 1):
        r_lo = math.floor(-half / (SQRT3 * e) - q / 2.0)
        r_hi = math.ceil(half / (SQRT3 * e) - q / 2.0)
        for r in range(r_lo, r_hi + 1):
            cells.append(HexCellId(q, r))
    if len(cells) < n_cells:
        raise ValueError(f"region too small: {len(cells)} < {n_cells}")
    cells.sort()
    cells = cells[:n_cells]
    rng = np.random.default_rng(seed)
    totals = rng.uniform(10.0, 100.0, size=n_cells)
    counts = {}
    for dim in DIMENSIONS:
        brackets = schema.brackets(dim)
        weights = rng.dirichlet(np.ones(len(brackets)), size=n_cells)
        for j, bracket in enumerate(brackets):
            counts[(dim, bracket)] = totals * weights[:, j]
    return HexDemographics(schema, cells, totals, counts)


def synthetic_big_network(
    grid: HexGrid,
    extent_m: float,
    line_spacing_m: float = 3000.0,
    segment_len_m: float = 30000.0,
    stop_spacing_m: float = 600.0,
    headway_s: int = 600,
    first_depart_s: int = 6 * 3600 + 1800,
    last_depart_s: int = 7 * 3600 + 1800,
) -> TimetableNetwork:
    """Orthogonal bus grid over a square region, for scale tests.

    Lines are split into fixed-length segments with trips departing every
    headway across the service window, so every stop sees service near the
    morning samples without needing day-long timetables.
    """
    stops: dict[str, Stop] = {}
    routes: dict[str, Route] = {}
    trips: dict[str, Trip] = {}
    services = {"wk": frozenset(("wednesday",))}
    half = extent_m / 2.0
    n_lines = int(extent_m / line_spacing_m)
    n_segments = max(1, round(extent_m / segment_len_m))
    stops_per_segment = int(segment_len_m / stop_spacing_m) + 1
    hop_s = int(stop_spacing_m / 8.0)  # ~8 m/s commercial speed
    departures = list(range(first_depart_s, last_depart_s + 1, headway_s))

    for axis in ("h", "v"):
        for line in range(n_lines):
            offset = -half + (line + 0.5) * line_spacing_m
            for seg in range(n_segments):
                rid = f"{axis}{line}g{seg}"
                routes[rid] = Route(rid, rid, "3")
                seg_start = -half + seg * segment_len_m
                ids = []
                for k in range(stops_per_segment):
                    pos = seg_start + k * stop_spacing_m
                    if pos > half:
                        break
                    sid = f"{rid}s{k}"
                    x, y = (pos, offset) if axis == "h" else (offset, pos)
                    stops[sid] = Stop(sid, sid, grid.unproject(x, y))
                    ids.append(sid)
                if len(ids) < 2:
                    continue
                for direction, ordered in (("o", ids), ("b", ids[::-1])):
                    for n, start in enumerate(departures):
                        sts = tuple(
                            TripStop(i + 1, sid, start + hop_s * i, start + hop_s * i)
                            for i, sid in enumerate(ordered)
                        )
                        tid = f"{rid}{direction}{n}"
                        trips[tid] = Trip(tid, rid, "wk", sts)
    return TimetableNetwork(stops, routes, trips, services)


def synthetic_pois(grid: HexGrid, extent_m: float, n_pois: int, seed: int,
                   category: str = "grocery") -> list[Poi]:
    rng = random.Random(seed)
    half = extent_m / 2.0
    return [
        Poi(
            f"poi{k:04d}", category, f"poi {k}",
            grid.unproject(rng.uniform(-half, half), rng.uniform(-half, half)),
        )
        for k in range(n_pois)
    ]


def main(argv: list[str] | None = None) -> int:
    import argparse

    parser = argparse.ArgumentParser(description="Generate the Gridville fixture city")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    config = write_gridville(args.out, args.seed)
    print(f"wrote {config}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
