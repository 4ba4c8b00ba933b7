"""Record real API payloads as JSON fixtures for the frontend contract tests.

Builds the committed Gridville city, runs the service in-process, and saves
each endpoint response under frontend/tests/fixtures/. Re-run after any
change to the API payloads:

    python3 tools/record_ui_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from fastapi.testclient import TestClient

from transit_access.config import load_config
from transit_access.pipeline import build_city_bundle
from transit_access.server import create_app

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "frontend" / "tests" / "fixtures"


def save(name: str, payload) -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    (OUT / f"{name}.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"recorded {name}.json")


def main() -> int:
    run_cfg = load_config(ROOT / "data" / "config.yaml")
    bundle = build_city_bundle(run_cfg.cities[0], run_cfg)
    app = create_app({"gridville": bundle})

    with TestClient(app) as client:
        save("cities", client.get("/api/cities").json())
        layer_params = {"city": "gridville", "category": "grocery",
                        "window": "morning", "dimension": "race"}
        save("layer_grocery_morning_race", client.get("/api/layer", params=layer_params).json())
        save("pois_grocery", client.get(
            "/api/pois", params={"city": "gridville", "category": "grocery"}).json())
        save("report_grocery_morning_race", client.get(
            "/api/report", params=layer_params).json())

        poi_id = client.get("/api/pois", params={
            "city": "gridville", "category": "grocery"}).json()[0]["id"]
        save("isochrone_first_grocery", client.get(
            f"/api/poi/{poi_id}/isochrone",
            params={"city": "gridville", "window": "morning"}).json())

        created = client.post("/api/scenario",
                              json={"city": "gridville", "id": "rec-demo"}).json()
        save("scenario_created", created)
        sid = created["id"]

        added = client.post(f"/api/scenario/{sid}/poi", json={
            "lat": 39.9, "lon": -83.0, "category": "grocery",
            "id": "new-001", "name": "candidate site",
        }).json()
        save("scenario_with_add", added)
        result_params = {"category": "grocery", "window": "morning", "dimension": "race"}
        save("scenario_result_added", client.get(
            f"/api/scenario/{sid}/result", params=result_params).json())

        retracted = client.delete(f"/api/scenario/{sid}/poi/new-001").json()
        save("scenario_after_retract", retracted)
        save("scenario_result_after_retract", client.get(
            f"/api/scenario/{sid}/result", params=result_params).json())

        removed = client.delete(f"/api/scenario/{sid}/poi/{poi_id}").json()
        save("scenario_removed", removed)
        save("scenario_result_removed", client.get(
            f"/api/scenario/{sid}/result", params=result_params).json())
    return 0


if __name__ == "__main__":
    sys.exit(main())
