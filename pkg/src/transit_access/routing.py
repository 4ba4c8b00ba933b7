"""Time-dependent transit reachability and catchment computation.

The router answers "departing from here at time t, which stops can I reach
within the budget?" with a round-based label-correcting search in the
spirit of RAPTOR: round 0 walks from the origin to nearby stops, each later
round boards trips from stops improved in the previous round and then
relaxes stop-to-stop footpaths.

Two labels are kept per stop - earliest arrival on foot and earliest
arrival by vehicle - because boarding readiness differs: alighting a
vehicle costs ``transfer_slack_s`` before the next boarding, while arriving
on foot does not. Tracking both makes the search exact even when a slower
walk arrival enables an earlier boarding, and trips are scanned
individually so timetables where a later trip overtakes an earlier one are
still handled exactly.

A catchment discretizes the classic isochrone: the union, over departure
samples in a time-of-day window, of hex-cell disks around every reached
stop sized by the remaining walk time.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DataError
from .gtfs import TimetableNetwork, WEEKDAYS
from .hexgrid import GeoPoint, HexCellId, HexGrid
from .ingest import Poi

WINDOW_LABELS = ("morning", "afternoon", "evening")

DEFAULT_WINDOWS = {
    "morning": (7 * 3600, 9 * 3600),
    "afternoon": (12 * 3600, 14 * 3600),
    "evening": (17 * 3600, 19 * 3600),
}

DEFAULT_BUDGET_S = 1800
DEFAULT_SAMPLE_STEP_S = 1800


@dataclass(frozen=True)
class TimeWindow:
    label: str
    start_s: int
    end_s: int

    def __post_init__(self):
        if self.label not in WINDOW_LABELS:
            raise DataError(f"unknown window label {self.label!r}")
        if not 0 <= self.start_s < self.end_s:
            raise DataError(f"window {self.label}: start must precede end")

    @classmethod
    def default(cls, label: str) -> "TimeWindow":
        try:
            start, end = DEFAULT_WINDOWS[label]
        except KeyError:
            raise DataError(f"unknown window label {label!r}") from None
        return cls(label, start, end)

    def samples(self, step_s: int = DEFAULT_SAMPLE_STEP_S) -> list[int]:
        """Departure times: start, start+step, ... while <= end."""
        if step_s <= 0:
            raise DataError(f"sample step must be > 0, got {step_s}")
        return list(range(self.start_s, self.end_s + 1, step_s))


@dataclass(frozen=True)
class RouterParams:
    walk_speed_mps: float = 1.4
    max_walk_m: float = 800.0
    transfer_slack_s: int = 60
    weekday: str = "wednesday"
    anchor: GeoPoint | None = None

    def __post_init__(self):
        if self.walk_speed_mps <= 0 or self.max_walk_m < 0 or self.transfer_slack_s < 0:
            raise DataError("invalid router parameters")
        if self.weekday not in WEEKDAYS:
            raise DataError(f"unknown weekday {self.weekday!r}")


@dataclass(frozen=True)
class Catchment:
    """Hex cells reachable from one POI within the budget, for one window."""

    poi_id: str
    category: str
    window: str
    budget_s: int
    cells: frozenset[HexCellId]

    def sorted_cells(self) -> list[HexCellId]:
        return sorted(self.cells)


@dataclass
class _TripTable:
    trip_id: str
    stops: np.ndarray  # stop indices along the trip
    arr: np.ndarray
    dep: np.ndarray


class Router:
    """Immutable query engine over one service day of a timetable network."""

    def __init__(self, network: TimetableNetwork, params: RouterParams = RouterParams()):
        self.network = network
        self.params = params
        self.stop_ids = sorted(network.stops)
        self._idx = {sid: i for i, sid in enumerate(self.stop_ids)}
        n = len(self.stop_ids)

        anchor = params.anchor or self._mean_location()
        self._anchor = anchor
        lat_k = math.cos(math.radians(anchor.lat))
        from .hexgrid import EARTH_RADIUS_M

        self._xs = np.array(
            [EARTH_RADIUS_M * lat_k * math.radians(network.stops[s].location.lon - anchor.lon)
             for s in self.stop_ids])
        self._ys = np.array(
            [EARTH_RADIUS_M * math.radians(network.stops[s].location.lat - anchor.lat)
             for s in self.stop_ids])

        self._trips = self._build_trip_tables()
        self._stop_trips: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for t, table in enumerate(self._trips):
            for pos, s in enumerate(table.stops.tolist()):
                self._stop_trips[s].append((t, pos))

        self._foot_idx, self._foot_dur = self._build_footpaths()

    def _mean_location(self) -> GeoPoint:
        stops = self.network.stops
        if not stops:
            return GeoPoint(0.0, 0.0)
        return GeoPoint(
            sum(s.location.lat for s in stops.values()) / len(stops),
            sum(s.location.lon for s in stops.values()) / len(stops),
        )

    def _build_trip_tables(self) -> list[_TripTable]:
        weekday = self.params.weekday
        tables = []
        for trip in self.network.trips.values():
            if weekday not in self.network.services.get(trip.service_id, frozenset()):
                continue
            if len(trip.stop_times) < 2:
                continue
            tables.append(_TripTable(
                trip_id=trip.id,
                stops=np.array([self._idx[st.stop_id] for st in trip.stop_times], dtype=np.int64),
                arr=np.array([st.arrival_s for st in trip.stop_times], dtype=float),
                dep=np.array([st.departure_s for st in trip.stop_times], dtype=float),
            ))
        tables.sort(key=lambda t: (t.dep[0], t.trip_id))
        return tables

    def _build_footpaths(self) -> tuple[list[np.ndarray], list[np.ndarray]]:
        n = len(self.stop_ids)
        best: dict[tuple[int, int], float] = {}
        if n and self.params.max_walk_m > 0:
            tree = cKDTree(np.column_stack([self._xs, self._ys]))
            # query with a hair of slack, then apply the exact cutoff, so the
            # pair set does not depend on KDTree-internal float details
            for a, b in tree.query_pairs(self.params.max_walk_m * (1.0 + 1e-9)):
                dx = self._xs[a] - self._xs[b]
                dy = self._ys[a] - self._ys[b]
                dist = math.sqrt(dx * dx + dy * dy)
                if dist > self.params.max_walk_m:
                    continue
                dur = dist / self.params.walk_speed_mps
                best[(a, b)] = dur
                best[(b, a)] = dur
        for fp in self.network.footpaths:
            a, b = self._idx[fp.from_stop], self._idx[fp.to_stop]
            if a == b:
                continue
            key = (a, b)
            best[key] = min(best.get(key, math.inf), float(fp.duration_s))
        by_stop: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for (a, b), dur in best.items():
            by_stop[a].append((b, dur))
        idx_arrays, dur_arrays = [], []
        for neighbors in by_stop:
            neighbors.sort()
            idx_arrays.append(np.array([v for v, _ in neighbors], dtype=np.int64))
            dur_arrays.append(np.array([d for _, d in neighbors], dtype=float))
        return idx_arrays, dur_arrays

    @property
    def footpath_count(self) -> int:
        return sum(len(a) for a in self._foot_idx)

    def footpath_duration(self, from_stop: str, to_stop: str) -> float | None:
        a, b = self._idx[from_stop], self._idx[to_stop]
        hits = np.nonzero(self._foot_idx[a] == b)[0]
        return float(self._foot_dur[a][hits[0]]) if hits.size else None

    def _project(self, p: GeoPoint) -> tuple[float, float]:
        from .hexgrid import EARTH_RADIUS_M

        lat_k = math.cos(math.radians(self._anchor.lat))
        return (
            EARTH_RADIUS_M * lat_k * math.radians(p.lon - self._anchor.lon),
            EARTH_RADIUS_M * math.radians(p.lat - self._anchor.lat),
        )

    # -- queries -------------------------------------------------------------

    def earliest_arrivals(self, origin: GeoPoint, depart_s: float, budget_s: float) -> dict[str, float]:
        """Earliest arrival time per reachable stop, capped at depart + budget."""
        idx, times = self._arrivals(origin, depart_s, budget_s)
        return {self.stop_ids[i]: float(t) for i, t in zip(idx.tolist(), times.tolist())}

    def _arrivals(self, origin: GeoPoint, depart_s: float, budget_s: float) -> tuple[np.ndarray, np.ndarray]:
        if budget_s <= 0:
            raise DataError(f"budget must be > 0, got {budget_s}")
        n = len(self.stop_ids)
        horizon = depart_s + budget_s
        slack = float(self.params.transfer_slack_s)

        walk_label = np.full(n, np.inf)
        trip_label = np.full(n, np.inf)

        ox, oy = self._project(origin)
        dist = np.sqrt((self._xs - ox) ** 2 + (self._ys - oy) ** 2)
        t0 = depart_s + dist / self.params.walk_speed_mps
        reach = (dist <= self.params.max_walk_m) & (t0 <= horizon)
        walk_label[reach] = t0[reach]
        marked = np.nonzero(reach)[0].tolist()

        while marked:
            prev_ready = np.minimum(walk_label, trip_label + slack)

            candidates: dict[int, int] = {}
            for s in marked:
                for t, pos in self._stop_trips[s]:
                    cur = candidates.get(t)
                    if cur is None or pos < cur:
                        candidates[t] = pos

            improved_by_trip: set[int] = set()
            for t in sorted(candidates):
                table = self._trips[t]
                start = candidates[t]
                stops = table.stops
                # departures within a trip are monotone, so a trip that
                # passes its first candidate stop after the horizon cannot
                # be boarded in time anywhere later either
                if table.dep[start] > horizon:
                    continue
                boardable = prev_ready[stops[start:]] <= table.dep[start:]
                if not boardable.any():
                    continue
                p = start + int(np.argmax(boardable))
                if p + 1 >= len(stops):
                    continue
                ride_stops = stops[p + 1:]
                ride_arr = np.where(table.arr[p + 1:] <= horizon, table.arr[p + 1:], np.inf)
                before = trip_label[ride_stops].copy()
                np.minimum.at(trip_label, ride_stops, ride_arr)
                changed = trip_label[ride_stops] < before
                if changed.any():
                    improved_by_trip.update(ride_stops[changed].tolist())

            improved_by_walk: set[int] = set()
            for u in improved_by_trip:
                neighbors = self._foot_idx[u]
                if not neighbors.size:
                    continue
                cand = trip_label[u] + self._foot_dur[u]
                ok = (cand < walk_label[neighbors]) & (cand <= horizon)
                if ok.any():
                    walk_label[neighbors[ok]] = cand[ok]
                    improved_by_walk.update(neighbors[ok].tolist())

            marked = sorted(improved_by_trip | improved_by_walk)

        final = np.minimum(walk_label, trip_label)
        idx = np.nonzero(final <= horizon)[0]
        return idx, final[idx]

    def compute_catchment(
        self,
        grid: HexGrid,
        poi: Poi,
        window: TimeWindow,
        budget_s: int = DEFAULT_BUDGET_S,
        sample_step_s: int = DEFAULT_SAMPLE_STEP_S,
    ) -> Catchment:
        """Cells reachable from ``poi`` within the budget during the window.

        Departures are sampled every ``sample_step_s`` across the window and
        the per-departure cell sets are unioned. Each reached stop
        contributes a walking disk sized by the remaining time, capped at
        the maximum walk distance; the POI itself contributes its own disk.
        """
        speed = self.params.walk_speed_mps
        max_walk = self.params.max_walk_m
        cells_qr: set[tuple[int, int]] = set()

        px, py = grid.project(poi.location)
        cells_qr.update(grid.disk_cells_qr(px, py, min(budget_s * speed, max_walk)))

        for depart in window.samples(sample_step_s):
            idx, times = self._arrivals(poi.location, depart, budget_s)
            for i, arrival in zip(idx.tolist(), times.tolist()):
                t_rem = depart + budget_s - arrival
                radius = min(t_rem * speed, max_walk)
                sx, sy = grid.project(self.network.stops[self.stop_ids[i]].location)
                cells_qr.update(grid.disk_cells_qr(sx, sy, radius))

        return Catchment(
            poi_id=poi.id,
            category=poi.category,
            window=window.label,
            budget_s=budget_s,
            cells=frozenset(HexCellId(q, r) for q, r in cells_qr),
        )


def build_router(network: TimetableNetwork, params: RouterParams = RouterParams()) -> Router:
    return Router(network, params)


@dataclass
class CatchmentBatch:
    catchments: list[Catchment]
    errors: list[tuple[str, str, str]] = field(default_factory=list)  # (poi_id, window, message)


def catchment_batch(
    router: Router,
    grid: HexGrid,
    pois: Sequence[Poi],
    windows: Iterable[TimeWindow],
    budget_s: int = DEFAULT_BUDGET_S,
    sample_step_s: int = DEFAULT_SAMPLE_STEP_S,
) -> CatchmentBatch:
    """Per-(poi, window) catchments in deterministic (poi_id, window) order.

    Failures are collected per POI; the batch keeps going.
    """
    result = CatchmentBatch(catchments=[])
    window_list = sorted(windows, key=lambda w: w.label)
    for poi in sorted(pois, key=lambda p: p.id):
        for window in window_list:
            try:
                result.catchments.append(
                    router.compute_catchment(grid, poi, window, budget_s, sample_step_s)
                )
            except DataError as exc:
                result.errors.append((poi.id, window.label, str(exc)))
    return result


# -- serialization ------------------------------------------------------------


def catchments_to_ndjson(catchments: Iterable[Catchment]) -> str:
    """One JSON object per line, sorted by (poi_id, window)."""
    lines = []
    for c in sorted(catchments, key=lambda c: (c.poi_id, c.window)):
        lines.append(json.dumps({
            "poi_id": c.poi_id,
            "category": c.category,
            "window": c.window,
            "budget_s": c.budget_s,
            "cells": [cell.key() for cell in c.sorted_cells()],
        }, separators=(",", ":"), sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")


def catchments_from_ndjson(text: str) -> list[Catchment]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        raw = json.loads(line)
        out.append(Catchment(
            poi_id=raw["poi_id"],
            category=raw["category"],
            window=raw["window"],
            budget_s=int(raw["budget_s"]),
            cells=frozenset(HexCellId.parse(k) for k in raw["cells"]),
        ))
    return out
