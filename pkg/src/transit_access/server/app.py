"""FastAPI application over immutable city bundles.

All GET endpoints are pure reads of shared immutable state; scenario
mutations go through the per-scenario lock in the store. GeoJSON layer
payloads are served from bundle-level byte caches so repeated fetches are
cheap and byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Query, Response
from fastapi.staticfiles import StaticFiles

from ..access import layer_geojson, report_json
from ..demographics import DIMENSIONS
from ..errors import DataError
from ..hexgrid import GeoPoint
from ..ingest import POI_CATEGORIES, Poi
from ..pipeline import CityBundle
from ..scenario import Scenario, apply_scenario, diff_reports, isochrone_preview
from .models import AddPoiIn, CityInfo, LatLon, PoiOut, ScenarioCreateIn, ScenarioOut
from .store import ScenarioBusy, ScenarioStore


def _error(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status_code=status, detail={"code": code, "message": message})


def create_app(bundles: dict[str, CityBundle], static_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="transit-access", docs_url="/api/docs", openapi_url="/api/openapi.json")
    store = ScenarioStore()
    app.state.bundles = bundles
    app.state.scenarios = store

    def get_bundle(city: str) -> CityBundle:
        bundle = bundles.get(city)
        if bundle is None:
            raise _error(404, "unknown_city", f"no such city: {city}")
        return bundle

    def check_category(bundle: CityBundle, category: str) -> str:
        if category not in bundle.categories:
            raise _error(404, "unknown_category", f"no such category: {category}")
        return category

    def check_window(bundle: CityBundle, window: str) -> str:
        if window not in bundle.windows:
            raise _error(404, "unknown_window", f"no such window: {window}")
        return window

    def check_dimension(dimension: str) -> str:
        if dimension not in DIMENSIONS:
            raise _error(404, "unknown_dimension", f"no such dimension: {dimension}")
        return dimension

    # -- read endpoints ------------------------------------------------------

    @app.get("/api/cities", response_model=list[CityInfo])
    def cities() -> list[CityInfo]:
        return [
            CityInfo(
                id=b.city_id,
                name=b.name,
                center=LatLon(lat=b.grid.anchor.lat, lon=b.grid.anchor.lon),
                categories=b.categories,
                windows=sorted(b.windows),
            )
            for b in sorted(bundles.values(), key=lambda b: b.city_id)
        ]

    @app.get("/api/layer")
    def layer(city: str, category: str, window: str, dimension: str = "race") -> Response:
        bundle = get_bundle(city)
        check_category(bundle, category)
        check_window(bundle, window)
        check_dimension(dimension)
        body = bundle.layer_geojson_bytes(category, window, dimension)
        return Response(content=body, media_type="application/geo+json")

    @app.get("/api/pois", response_model=list[PoiOut])
    def pois(city: str, category: str | None = None) -> list[PoiOut]:
        bundle = get_bundle(city)
        if category is not None:
            check_category(bundle, category)
        return [
            PoiOut.from_poi(p)
            for p in sorted(bundle.pois.values(), key=lambda p: p.id)
            if category is None or p.category == category
        ]

    @app.get("/api/poi/{poi_id}/isochrone")
    def poi_isochrone(
        poi_id: str,
        city: str,
        window: str,
        scenario: str | None = Query(default=None),
    ) -> Response:
        bundle = get_bundle(city)
        check_window(bundle, window)
        catchment = None
        poi = bundle.pois.get(poi_id)
        if poi is not None:
            catchment = bundle.slice_for(poi.category, window).catchments[poi_id]
        elif scenario is not None:
            scn = store.get(scenario)
            if scn is None:
                raise _error(404, "unknown_scenario", f"no such scenario: {scenario}")
            added = next((p for p in scn.added if p.id == poi_id), None)
            if added is not None:
                catchment = bundle.router.compute_catchment(
                    bundle.grid, added, bundle.windows[window],
                    bundle.budget_s, bundle.sample_step_s,
                )
        if catchment is None:
            raise _error(404, "unknown_poi", f"no such POI: {poi_id}")
        return Response(content=json.dumps(_isochrone_geojson(bundle, catchment),
                                           separators=(",", ":"), sort_keys=True),
                        media_type="application/geo+json")

    @app.get("/api/report")
    def report(city: str, category: str, window: str, dimension: str) -> dict:
        bundle = get_bundle(city)
        check_category(bundle, category)
        check_window(bundle, window)
        check_dimension(dimension)
        return report_json(bundle.reports[(category, window, dimension)])

    @app.get("/api/summary")
    def summary(city: str, window: str) -> dict:
        bundle = get_bundle(city)
        check_window(bundle, window)
        return {"window": window, "scores": bundle.summaries[window]}

    # -- scenario endpoints ---------------------------------------------------

    @app.post("/api/scenario", response_model=ScenarioOut, status_code=201)
    def create_scenario(payload: ScenarioCreateIn) -> ScenarioOut:
        get_bundle(payload.city)
        try:
            scenario = store.create(payload.city, payload.id)
        except KeyError:
            raise _error(409, "scenario_exists", f"scenario id {payload.id} already exists")
        return _scenario_out(scenario)

    @app.get("/api/scenario/{scenario_id}", response_model=ScenarioOut)
    def get_scenario(scenario_id: str) -> ScenarioOut:
        scenario = store.get(scenario_id)
        if scenario is None:
            raise _error(404, "unknown_scenario", f"no such scenario: {scenario_id}")
        return _scenario_out(scenario)

    @app.post("/api/scenario/{scenario_id}/poi", response_model=ScenarioOut)
    def add_poi(scenario_id: str, payload: AddPoiIn = Body(...)) -> ScenarioOut:
        scenario = store.get(scenario_id)
        if scenario is None:
            raise _error(404, "unknown_scenario", f"no such scenario: {scenario_id}")
        bundle = get_bundle(scenario.city)
        if payload.category not in POI_CATEGORIES:
            raise _error(422, "invalid_poi", f"unknown category {payload.category!r}")
        try:
            location = GeoPoint(payload.lat, payload.lon)
        except DataError as exc:
            raise _error(422, "invalid_poi", str(exc))
        if not bundle.bbox.contains(location):
            raise _error(422, "invalid_poi", "location outside the city bounding box")

        def mutate(current: Scenario) -> Scenario:
            poi_id = payload.id or f"new-{len(current.added) + 1:03d}"
            taken = {p.id for p in current.added} | bundle.baseline_poi_ids()
            if poi_id in taken:
                raise DataError(f"POI id {poi_id} already in use")
            poi = Poi(
                id=poi_id,
                category=payload.category,
                name=payload.name or poi_id,
                location=location,
                supply_units=payload.supply_units,
                origin="scenario",
            )
            return current.with_added(poi)

        return _scenario_out(_mutate(store, scenario_id, mutate))

    @app.delete("/api/scenario/{scenario_id}/poi/{poi_id}", response_model=ScenarioOut)
    def delete_poi(scenario_id: str, poi_id: str) -> ScenarioOut:
        scenario = store.get(scenario_id)
        if scenario is None:
            raise _error(404, "unknown_scenario", f"no such scenario: {scenario_id}")
        bundle = get_bundle(scenario.city)

        def mutate(current: Scenario) -> Scenario:
            if any(p.id == poi_id for p in current.added):
                return current.without_added(poi_id)
            if poi_id in bundle.pois and poi_id not in current.removed:
                return current.with_removed(poi_id)
            raise KeyError(poi_id)

        try:
            return _scenario_out(_mutate(store, scenario_id, mutate))
        except KeyError:
            raise _error(404, "unknown_poi", f"no such POI to remove: {poi_id}")

    @app.get("/api/scenario/{scenario_id}/result")
    def scenario_result(scenario_id: str, category: str, window: str, dimension: str) -> dict:
        scenario = store.get(scenario_id)
        if scenario is None:
            raise _error(404, "unknown_scenario", f"no such scenario: {scenario_id}")
        bundle = get_bundle(scenario.city)
        check_category(bundle, category)
        check_window(bundle, window)
        check_dimension(dimension)
        baseline = bundle.slice_for(category, window)
        try:
            result = apply_scenario(
                baseline, scenario, bundle.router, bundle.grid, bundle.demo,
                bundle.sample_step_s, known_poi_ids=bundle.baseline_poi_ids(),
            )
        except DataError as exc:
            raise _error(422, "invalid_scenario", str(exc))
        diff = diff_reports(result.baseline_reports[dimension], result.scenario_reports[dimension])
        return {
            "scenario": _scenario_out(scenario).model_dump(),
            "city": scenario.city,
            "category": category,
            "window": window,
            "dimension": dimension,
            "layer": layer_geojson(result.layer, bundle.demo, bundle.grid, dimension),
            "delta": [
                {"cell_id": cell.key(), "delta": result.delta[cell]}
                for cell in sorted(result.delta)
            ],
            "report": {
                "baseline": report_json(result.baseline_reports[dimension]),
                "scenario": report_json(result.scenario_reports[dimension]),
                "diff": {
                    "dimension": diff.dimension,
                    "brackets": list(diff.brackets),
                    "score_deltas": list(diff.score_deltas),
                    "gap_ratio_delta": diff.gap_ratio_delta,
                },
            },
        }

    @app.get("/api/preview/isochrone")
    def preview_isochrone(city: str, lat: float, lon: float, window: str) -> Response:
        bundle = get_bundle(city)
        check_window(bundle, window)
        try:
            catchment = isochrone_preview(
                bundle.router, bundle.grid, GeoPoint(lat, lon),
                bundle.windows[window], bundle.budget_s, bundle.bbox,
                bundle.sample_step_s,
            )
        except DataError as exc:
            raise _error(422, "invalid_location", str(exc))
        return Response(content=json.dumps(_isochrone_geojson(bundle, catchment),
                                           separators=(",", ":"), sort_keys=True),
                        media_type="application/geo+json")

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def _mutate(store: ScenarioStore, scenario_id: str, fn) -> Scenario:
    try:
        return store.mutate(scenario_id, fn)
    except ScenarioBusy:
        raise _error(409, "scenario_busy", "another mutation is in progress")
    except DataError as exc:
        raise _error(422, "invalid_poi", str(exc))


def _scenario_out(scenario: Scenario) -> ScenarioOut:
    return ScenarioOut(
        id=scenario.id,
        city=scenario.city,
        added=[PoiOut.from_poi(p) for p in scenario.added],
        removed=sorted(scenario.removed),
    )


def _isochrone_geojson(bundle: CityBundle, catchment) -> dict:
    features = []
    for cell in catchment.sorted_cells():
        ring = [
            [round(p.lon, 7), round(p.lat, 7)]
            for p in bundle.grid.cell_polygon(cell).exterior
        ]
        ring.append(ring[0])
        features.append({
            "type": "Feature",
            "geometry": {"type": "Polygon", "coordinates": [ring]},
            "properties": {"cell_id": cell.key()},
        })
    return {
        "type": "FeatureCollection",
        "features": features,
        "poi_id": catchment.poi_id,
        "window": catchment.window,
        "budget_s": catchment.budget_s,
        "cell_count": len(features),
    }
