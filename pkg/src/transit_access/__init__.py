"""Public-transit accessibility of points of interest on a hexagonal grid.

Core flow: ingest timetables/POIs/census data, compute per-facility
catchments under a travel-time budget, score every hex cell with the
two-step floating catchment area method, and report per-demographic equity
gaps. A FastAPI service and a thin CLI expose the results; scenarios
overlay added/removed facilities with exact incremental recomputation.
"""

from .access import (
    AccessibilityLayer,
    EquityReport,
    SupplyRatio,
    accessibility_layer,
    city_summary,
    equity_report,
    group_weighted_score,
    supply_ratio,
)
from .demographics import DemographicSchema, DemographicVector, HexDemographics
from .errors import ConfigError, DataError
from .gtfs import TimetableNetwork, parse_gtfs
from .hexgrid import GeoPoint, HexCellId, HexGrid, Polygon
from .ingest import CensusUnit, Poi, allocate_demographics, parse_census, parse_pois
from .routing import (
    Catchment,
    Router,
    RouterParams,
    TimeWindow,
    build_router,
    catchment_batch,
)
from .scenario import Scenario, ScenarioResult, apply_scenario, diff_reports, isochrone_preview

__version__ = "0.1.0"

__all__ = [
    "AccessibilityLayer",
    "Catchment",
    "CensusUnit",
    "ConfigError",
    "DataError",
    "DemographicSchema",
    "DemographicVector",
    "EquityReport",
    "GeoPoint",
    "HexCellId",
    "HexDemographics",
    "HexGrid",
    "Poi",
    "Polygon",
    "Router",
    "RouterParams",
    "Scenario",
    "ScenarioResult",
    "SupplyRatio",
    "TimeWindow",
    "TimetableNetwork",
    "accessibility_layer",
    "allocate_demographics",
    "apply_scenario",
    "build_router",
    "catchment_batch",
    "city_summary",
    "diff_reports",
    "equity_report",
    "group_weighted_score",
    "isochrone_preview",
    "parse_census",
    "parse_gtfs",
    "parse_pois",
    "supply_ratio",
]
