import json
import random

import pytest

from transit_access.demographics import (
    DemographicSchema,
    DemographicVector,
    HexDemographics,
)
from transit_access.errors import DataError
from transit_access.fixtures import GRIDVILLE_CENTER, random_census_polygon
from transit_access.hexgrid import HexGrid, Polygon
from transit_access.ingest import (
    CensusUnit,
    Poi,
    allocate_demographics,
    parse_census,
    parse_pois,
)

GRID = HexGrid(GRIDVILLE_CENTER)
SCHEMA = DemographicSchema(age_sex=("young", "old"), income=("low", "high"))


def vector(total, race=None, age_sex=None, income=None, vehicle=None):
    return DemographicVector(
        total=total,
        race=race or {"white": total * 0.4, "black": total * 0.3,
                      "asian": total * 0.2, "other": total * 0.1},
        age_sex=age_sex or {"young": total * 0.5, "old": total * 0.5},
        income=income or {"low": total * 0.6, "high": total * 0.4},
        vehicle=vehicle or {"no_vehicle": total * 0.25, "has_vehicle": total * 0.75},
    )


def square(cx, cy, half):
    return Polygon(tuple(
        GRID.unproject(x, y)
        for x, y in [(cx - half, cy - half), (cx + half, cy - half),
                     (cx + half, cy + half), (cx - half, cy + half)]
    ))


class TestParsePois:
    def test_default_supply(self, tmp_path):
        path = tmp_path / "pois.csv"
        path.write_text(
            "id,category,name,lat,lon\n"
            "h1,hospital_clinic,General,33.75,-84.39\n"
        )
        pois = parse_pois(path)
        assert pois == [Poi("h1", "hospital_clinic", "General",
                            pois[0].location, 1.0, "baseline")]
        assert pois[0].supply_units == 1.0

    def test_explicit_supply(self, tmp_path):
        path = tmp_path / "pois.csv"
        path.write_text(
            "id,category,name,lat,lon,supply_units\n"
            "g1,grocery,Shop,33.75,-84.39,2.5\n"
        )
        assert parse_pois(path)[0].supply_units == 2.5

    def test_unknown_category_fatal(self, tmp_path):
        path = tmp_path / "pois.csv"
        path.write_text("id,category,name,lat,lon\nb1,bank,Bank,33.75,-84.39\n")
        with pytest.raises(DataError, match="row 2"):
            parse_pois(path)

    def test_duplicate_id_fatal(self, tmp_path):
        path = tmp_path / "pois.csv"
        path.write_text(
            "id,category,name,lat,lon\n"
            "g1,grocery,A,33.75,-84.39\n"
            "g1,grocery,B,33.76,-84.39\n"
        )
        with pytest.raises(DataError, match="duplicate"):
            parse_pois(path)

    def test_out_of_range_coordinates_fatal(self, tmp_path):
        path = tmp_path / "pois.csv"
        path.write_text("id,category,name,lat,lon\ng1,grocery,A,98.0,-84.39\n")
        with pytest.raises(DataError):
            parse_pois(path)


def demographics_csv(rows: list[tuple[str, DemographicVector]]) -> str:
    header = ["unit_id", "total"] + SCHEMA.columns()
    lines = [",".join(header)]
    for uid, vec in rows:
        row = [uid, repr(vec.total)]
        for col in SCHEMA.columns():
            dim, bracket = col.split(".", 1)
            row.append(repr(vec.counts(dim)[bracket]))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def geojson(features: list[dict]) -> str:
    return json.dumps({"type": "FeatureCollection", "features": features})


def polygon_feature(uid: str, poly: Polygon) -> dict:
    ring = [[p.lon, p.lat] for p in poly.exterior]
    ring.append(ring[0])
    return {
        "type": "Feature",
        "properties": {"unit_id": uid},
        "geometry": {"type": "Polygon", "coordinates": [ring]},
    }


class TestParseCensus:
    def test_join(self, tmp_path):
        geo = tmp_path / "census.geojson"
        demo = tmp_path / "demo.csv"
        geo.write_text(geojson([
            polygon_feature("u1", square(0, 0, 400)),
            polygon_feature("u2", square(1000, 0, 400)),
        ]))
        demo.write_text(demographics_csv([("u1", vector(100.0)), ("u2", vector(250.0))]))
        units = parse_census(geo, demo, SCHEMA)
        assert [u.id for u in units] == ["u1", "u2"]
        assert units[1].demographics.total == 250.0

    def test_demographics_without_geometry_fatal(self, tmp_path):
        geo = tmp_path / "census.geojson"
        demo = tmp_path / "demo.csv"
        geo.write_text(geojson([polygon_feature("u1", square(0, 0, 400))]))
        demo.write_text(demographics_csv([("u1", vector(100.0)), ("u2", vector(50.0))]))
        with pytest.raises(DataError, match="u2"):
            parse_census(geo, demo, SCHEMA)

    def test_negative_count_fatal(self, tmp_path):
        geo = tmp_path / "census.geojson"
        demo = tmp_path / "demo.csv"
        geo.write_text(geojson([polygon_feature("u1", square(0, 0, 400))]))
        bad = vector(100.0)
        bad = DemographicVector(
            total=bad.total,
            race={**bad.race, "white": -1.0, "black": 41.0},
            age_sex=bad.age_sex, income=bad.income, vehicle=bad.vehicle,
        )
        demo.write_text(demographics_csv([("u1", bad)]))
        with pytest.raises(DataError, match="negative"):
            parse_census(geo, demo, SCHEMA)

    def test_multipolygon_split_by_area(self, tmp_path):
        # parts with area ratio 1:3 and total 400 -> totals 100 and 300
        small = square(-2000, 0, 250)
        big = square(2000, 0, 250 * 3 ** 0.5)  # 3x the area
        ring_small = [[p.lon, p.lat] for p in small.exterior]
        ring_small.append(ring_small[0])
        ring_big = [[p.lon, p.lat] for p in big.exterior]
        ring_big.append(ring_big[0])
        feature = {
            "type": "Feature",
            "properties": {"unit_id": "m1"},
            "geometry": {
                "type": "MultiPolygon",
                "coordinates": [[ring_small], [ring_big]],
            },
        }
        geo = tmp_path / "census.geojson"
        demo = tmp_path / "demo.csv"
        geo.write_text(geojson([feature]))
        demo.write_text(demographics_csv([("m1", vector(400.0))]))
        units = parse_census(geo, demo, SCHEMA)
        assert [u.id for u in units] == ["m1#0", "m1#1"]
        assert units[0].demographics.total == pytest.approx(100.0, rel=1e-6)
        assert units[1].demographics.total == pytest.approx(300.0, rel=1e-6)
        total = units[0].demographics + units[1].demographics
        assert total.total == pytest.approx(400.0, rel=1e-12)


class TestAllocate:
    def test_unit_covering_one_cell(self):
        cell_poly = GRID.cell_polygon(GRID.cell_of(GRID.anchor))
        unit = CensusUnit("u1", cell_poly, vector(200.0))
        demo = allocate_demographics([unit], GRID)
        assert demo.total(GRID.cell_of(GRID.anchor)) == pytest.approx(200.0, abs=1e-6)
        assert demo.population_total() == pytest.approx(200.0, rel=1e-9)

    def test_contributions_sum_across_units(self):
        unit1 = CensusUnit("u1", square(0, 0, 600), vector(100.0))
        unit2 = CensusUnit("u2", square(100, 0, 600), vector(300.0))
        demo = allocate_demographics([unit1, unit2], GRID)
        assert demo.population_total() == pytest.approx(400.0, rel=1e-9)

    def test_order_independence_is_exact(self):
        rng = random.Random(17)
        units = [
            CensusUnit(f"u{i}", random_census_polygon(rng, GRID), vector(100.0 + i))
            for i in range(8)
        ]
        forward = allocate_demographics(units, GRID)
        backward = allocate_demographics(units[::-1], GRID)
        assert forward.cells == backward.cells
        for cell in forward.cells:
            assert forward.vector(cell) == backward.vector(cell)

    def test_mass_conservation_every_bracket(self):
        rng = random.Random(23)
        units = [
            CensusUnit(
                f"u{i}", random_census_polygon(rng, GRID),
                vector(float(rng.randint(50, 5000))),
            )
            for i in range(12)
        ]
        demo = allocate_demographics(units, GRID)
        expected_total = sum(u.demographics.total for u in units)
        assert demo.population_total() == pytest.approx(expected_total, rel=0.005)
        for dim in ("race", "age_sex", "income", "vehicle"):
            for bracket in demo.schema.brackets(dim):
                expected = sum(u.demographics.counts(dim)[bracket] for u in units)
                assert demo.bracket_total(dim, bracket) == pytest.approx(expected, rel=0.005)

    def test_vector_invariants_hold_after_allocation(self):
        rng = random.Random(29)
        units = [
            CensusUnit(f"u{i}", random_census_polygon(rng, GRID), vector(500.0))
            for i in range(5)
        ]
        demo = allocate_demographics(units, GRID)
        for _cell, vec in demo.items():
            vec.validate(demo.schema)


class TestDemographicsRoundTrip:
    def test_csv_roundtrip(self):
        rng = random.Random(31)
        units = [
            CensusUnit(f"u{i}", random_census_polygon(rng, GRID), vector(321.0 + i))
            for i in range(4)
        ]
        demo = allocate_demographics(units, GRID)
        text = demo.to_csv()
        back = HexDemographics.from_csv(text, demo.schema)
        assert back.cells == demo.cells
        assert back.to_csv() == text
