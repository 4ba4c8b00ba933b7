"""GTFS static feed subset: parse, validate, serialize.

Only the five core files plus optional transfers.txt are read; anything the
timetable connectivity does not need (shapes, frequencies, fares) is out of
scope. Times use the standard GTFS convention of seconds past midnight of
the service day, with HH >= 24 allowed for overnight trips.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError
from .hexgrid import GeoPoint

REQUIRED_FILES = ("stops.txt", "routes.txt", "trips.txt", "stop_times.txt", "calendar.txt")

WEEKDAYS = ("monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday")

#: Times must stay within two service days (overnight wrap allowed once).
MAX_TIME_S = 172_800

_TIME_RE = re.compile(r"^(\d{1,3}):([0-5]\d):([0-5]\d)$")


def parse_gtfs_time(text: str, context: str = "") -> int:
    """HH:MM:SS (HH may exceed 24) to seconds-of-service-day."""
    m = _TIME_RE.match(text.strip())
    if not m:
        raise DataError(f"malformed time {text!r}{_at(context)}")
    seconds = int(m.group(1)) * 3600 + int(m.group(2)) * 60 + int(m.group(3))
    if seconds >= MAX_TIME_S:
        raise DataError(f"time {text!r} beyond {MAX_TIME_S} s{_at(context)}")
    return seconds


def format_gtfs_time(seconds: int) -> str:
    h, rem = divmod(int(seconds), 3600)
    m, s = divmod(rem, 60)
    return f"{h:02d}:{m:02d}:{s:02d}"


def _at(context: str) -> str:
    return f" ({context})" if context else ""


@dataclass(frozen=True)
class Stop:
    id: str
    name: str
    location: GeoPoint


@dataclass(frozen=True)
class Route:
    id: str
    name: str
    mode: str


@dataclass(frozen=True)
class TripStop:
    sequence: int
    stop_id: str
    arrival_s: int
    departure_s: int


@dataclass(frozen=True)
class Trip:
    id: str
    route_id: str
    service_id: str
    stop_times: tuple[TripStop, ...]


@dataclass(frozen=True, order=True)
class Footpath:
    from_stop: str
    to_stop: str
    duration_s: int


@dataclass(frozen=True)
class TimetableNetwork:
    stops: dict[str, Stop]
    routes: dict[str, Route]
    trips: dict[str, Trip]
    services: dict[str, frozenset[str]]
    footpaths: tuple[Footpath, ...] = ()


def _read_rows(directory: Path, filename: str, required: bool) -> list[dict[str, str]]:
    path = directory / filename
    if not path.exists():
        if required:
            raise DataError(f"missing required GTFS file {filename} in {directory}")
        return []
    with open(path, newline="", encoding="utf-8-sig") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{filename}: empty file")
        return [{(k or "").strip(): (v or "").strip() for k, v in row.items()} for row in reader]


def _need(row: dict[str, str], column: str, filename: str, rownum: int) -> str:
    value = row.get(column, "")
    if value == "":
        raise DataError(f"{filename} row {rownum}: missing {column}")
    return value


def parse_gtfs(directory: str | Path) -> TimetableNetwork:
    """Parse and validate a GTFS directory (five core files + transfers.txt)."""
    directory = Path(directory)

    stops: dict[str, Stop] = {}
    for i, row in enumerate(_read_rows(directory, "stops.txt", required=True), start=2):
        sid = _need(row, "stop_id", "stops.txt", i)
        if sid in stops:
            raise DataError(f"stops.txt row {i}: duplicate stop_id {sid}")
        try:
            loc = GeoPoint(float(_need(row, "stop_lat", "stops.txt", i)),
                           float(_need(row, "stop_lon", "stops.txt", i)))
        except (ValueError, DataError) as exc:
            raise DataError(f"stops.txt row {i} ({sid}): {exc}") from exc
        stops[sid] = Stop(sid, row.get("stop_name", ""), loc)

    routes: dict[str, Route] = {}
    for i, row in enumerate(_read_rows(directory, "routes.txt", required=True), start=2):
        rid = _need(row, "route_id", "routes.txt", i)
        if rid in routes:
            raise DataError(f"routes.txt row {i}: duplicate route_id {rid}")
        name = row.get("route_short_name") or row.get("route_long_name") or rid
        routes[rid] = Route(rid, name, row.get("route_type", ""))

    services: dict[str, frozenset[str]] = {}
    for i, row in enumerate(_read_rows(directory, "calendar.txt", required=True), start=2):
        sid = _need(row, "service_id", "calendar.txt", i)
        if sid in services:
            raise DataError(f"calendar.txt row {i}: duplicate service_id {sid}")
        days = frozenset(day for day in WEEKDAYS if row.get(day, "0") == "1")
        services[sid] = days

    trip_meta: dict[str, tuple[str, str]] = {}
    for i, row in enumerate(_read_rows(directory, "trips.txt", required=True), start=2):
        tid = _need(row, "trip_id", "trips.txt", i)
        if tid in trip_meta:
            raise DataError(f"trips.txt row {i}: duplicate trip_id {tid}")
        rid = _need(row, "route_id", "trips.txt", i)
        svc = _need(row, "service_id", "trips.txt", i)
        if rid not in routes:
            raise DataError(f"trips.txt row {i}: trip {tid} references missing route {rid}")
        if svc not in services:
            raise DataError(f"trips.txt row {i}: trip {tid} references missing service {svc}")
        trip_meta[tid] = (rid, svc)

    stop_times: dict[str, list[TripStop]] = {tid: [] for tid in trip_meta}
    for i, row in enumerate(_read_rows(directory, "stop_times.txt", required=True), start=2):
        tid = _need(row, "trip_id", "stop_times.txt", i)
        if tid not in trip_meta:
            raise DataError(f"stop_times.txt row {i}: unknown trip {tid}")
        sid = _need(row, "stop_id", "stop_times.txt", i)
        if sid not in stops:
            raise DataError(f"stop_times.txt row {i}: trip {tid} references missing stop {sid}")
        try:
            seq = int(_need(row, "stop_sequence", "stop_times.txt", i))
        except ValueError as exc:
            raise DataError(f"stop_times.txt row {i}: bad stop_sequence") from exc
        arr = parse_gtfs_time(_need(row, "arrival_time", "stop_times.txt", i),
                              f"stop_times.txt row {i}")
        dep = parse_gtfs_time(_need(row, "departure_time", "stop_times.txt", i),
                              f"stop_times.txt row {i}")
        stop_times[tid].append(TripStop(seq, sid, arr, dep))

    trips: dict[str, Trip] = {}
    for tid, (rid, svc) in trip_meta.items():
        sts = sorted(stop_times[tid], key=lambda st: st.sequence)
        if not sts:
            raise DataError(f"trip {tid} has no stop-times")
        prev = None
        for st in sts:
            if st.arrival_s > st.departure_s:
                raise DataError(f"trip {tid}: arrival after departure at sequence {st.sequence}")
            if prev is not None:
                if st.sequence == prev.sequence:
                    raise DataError(f"trip {tid}: duplicate stop_sequence {st.sequence}")
                if st.arrival_s < prev.departure_s:
                    raise DataError(
                        f"trip {tid}: stop-times not monotone at sequence {st.sequence} "
                        f"({format_gtfs_time(prev.departure_s)} then {format_gtfs_time(st.arrival_s)})"
                    )
            prev = st
        trips[tid] = Trip(tid, rid, svc, tuple(sts))

    footpaths = []
    for i, row in enumerate(_read_rows(directory, "transfers.txt", required=False), start=2):
        a = row.get("from_stop_id", "")
        b = row.get("to_stop_id", "")
        dur = row.get("min_transfer_time", "")
        if not a or not b or not dur:
            continue  # only timed transfers are usable
        if a not in stops or b not in stops:
            raise DataError(f"transfers.txt row {i}: unknown stop in transfer {a}->{b}")
        try:
            duration = int(dur)
        except ValueError as exc:
            raise DataError(f"transfers.txt row {i}: bad min_transfer_time {dur!r}") from exc
        if duration < 0:
            raise DataError(f"transfers.txt row {i}: negative transfer time")
        footpaths.append(Footpath(a, b, duration))

    # canonical order so parse -> serialize -> parse is the identity
    return TimetableNetwork(stops, routes, trips, services, tuple(sorted(footpaths)))


def write_gtfs(network: TimetableNetwork, directory: str | Path) -> None:
    """Serialize a network back to GTFS files in canonical (sorted) order."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    def dump(filename: str, header: list[str], rows: list[list[str]]) -> None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        (directory / filename).write_text(buf.getvalue(), encoding="utf-8")

    dump("stops.txt", ["stop_id", "stop_name", "stop_lat", "stop_lon"],
         [[s.id, s.name, repr(s.location.lat), repr(s.location.lon)]
          for s in sorted(network.stops.values(), key=lambda s: s.id)])
    dump("routes.txt", ["route_id", "route_short_name", "route_type"],
         [[r.id, r.name, r.mode]
          for r in sorted(network.routes.values(), key=lambda r: r.id)])
    dump("calendar.txt", ["service_id", *WEEKDAYS, "start_date", "end_date"],
         [[sid, *["1" if d in days else "0" for d in WEEKDAYS], "20240101", "20341231"]
          for sid, days in sorted(network.services.items())])
    dump("trips.txt", ["route_id", "service_id", "trip_id"],
         [[t.route_id, t.service_id, t.id]
          for t in sorted(network.trips.values(), key=lambda t: t.id)])
    st_rows = []
    for t in sorted(network.trips.values(), key=lambda t: t.id):
        for st in t.stop_times:
            st_rows.append([t.id, format_gtfs_time(st.arrival_s),
                            format_gtfs_time(st.departure_s), st.stop_id, str(st.sequence)])
    dump("stop_times.txt", ["trip_id", "arrival_time", "departure_time", "stop_id", "stop_sequence"],
         st_rows)
    if network.footpaths:
        dump("transfers.txt", ["from_stop_id", "to_stop_id", "transfer_type", "min_transfer_time"],
             [[fp.from_stop, fp.to_stop, "2", str(fp.duration_s)]
              for fp in sorted(network.footpaths)])
