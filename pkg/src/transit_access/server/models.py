"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..ingest import Poi


class LatLon(BaseModel):
    lat: float
    lon: float


class CityInfo(BaseModel):
    id: str
    name: str
    center: LatLon
    categories: list[str]
    windows: list[str]


class PoiOut(BaseModel):
    id: str
    category: str
    name: str
    lat: float
    lon: float
    supply_units: float
    origin: str

    @classmethod
    def from_poi(cls, poi: Poi) -> "PoiOut":
        return cls(
            id=poi.id,
            category=poi.category,
            name=poi.name,
            lat=poi.location.lat,
            lon=poi.location.lon,
            supply_units=poi.supply_units,
            origin=poi.origin,
        )


class ScenarioCreateIn(BaseModel):
    city: str
    id: str | None = None


class ScenarioOut(BaseModel):
    id: str
    city: str
    added: list[PoiOut]
    removed: list[str]


class AddPoiIn(BaseModel):
    lat: float
    lon: float
    category: str
    name: str | None = None
    supply_units: float = Field(default=1.0, gt=0)
    id: str | None = None
