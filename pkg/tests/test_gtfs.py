from pathlib import Path

import pytest

from transit_access.errors import DataError
from transit_access.fixtures import GRIDVILLE_CENTER, gridville_network, random_network
from transit_access.gtfs import (
    format_gtfs_time,
    parse_gtfs,
    parse_gtfs_time,
    write_gtfs,
)
from transit_access.hexgrid import HexGrid

FIXTURE_FILES = {
    "stops.txt": (
        "stop_id,stop_name,stop_lat,stop_lon\n"
        "s1,First,39.90,-83.00\n"
        "s2,Second,39.91,-83.00\n"
        "s3,Third,39.92,-83.00\n"
    ),
    "routes.txt": "route_id,route_short_name,route_type\nr1,Line One,3\n",
    "calendar.txt": (
        "service_id,monday,tuesday,wednesday,thursday,friday,saturday,sunday,start_date,end_date\n"
        "wk,1,1,1,1,1,0,0,20240101,20341231\n"
    ),
    "trips.txt": "route_id,service_id,trip_id\nr1,wk,t1\n",
    "stop_times.txt": (
        "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
        "t1,08:00:00,08:00:00,s1,1\n"
        "t1,08:10:00,08:10:00,s2,2\n"
        "t1,08:25:00,08:25:00,s3,3\n"
    ),
}


def write_feed(directory: Path, overrides: dict[str, str] | None = None) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    files = dict(FIXTURE_FILES)
    files.update(overrides or {})
    for name, text in files.items():
        if text is not None:
            (directory / name).write_text(text, encoding="utf-8")
    return directory


class TestTimeParsing:
    def test_plain(self):
        assert parse_gtfs_time("08:00:00") == 8 * 3600

    def test_overnight(self):
        assert parse_gtfs_time("25:30:00") == 91_800

    def test_format_roundtrip(self):
        assert format_gtfs_time(91_800) == "25:30:00"
        assert parse_gtfs_time(format_gtfs_time(8 * 3600 + 61)) == 8 * 3600 + 61

    @pytest.mark.parametrize("bad", ["8:0:0", "08:61:00", "08:00", "abc", "-1:00:00"])
    def test_malformed(self, bad):
        with pytest.raises(DataError):
            parse_gtfs_time(bad)

    def test_beyond_two_days(self):
        with pytest.raises(DataError):
            parse_gtfs_time("48:00:00")


class TestParseGtfs:
    def test_fixture_feed(self, tmp_path):
        network = parse_gtfs(write_feed(tmp_path / "feed"))
        assert len(network.stops) == 3
        assert len(network.trips) == 1
        trip = network.trips["t1"]
        assert [st.arrival_s for st in trip.stop_times] == [28800, 29400, 30300]
        assert network.services["wk"] == frozenset(
            ("monday", "tuesday", "wednesday", "thursday", "friday")
        )

    def test_missing_file_fatal(self, tmp_path):
        feed = write_feed(tmp_path / "feed")
        (feed / "calendar.txt").unlink()
        with pytest.raises(DataError, match="calendar.txt"):
            parse_gtfs(feed)

    def test_unknown_columns_ignored(self, tmp_path):
        feed = write_feed(tmp_path / "feed", {
            "routes.txt": "route_id,route_short_name,route_type,route_color\nr1,Line One,3,FF0000\n",
        })
        assert parse_gtfs(feed).routes["r1"].name == "Line One"

    def test_dangling_stop_reference(self, tmp_path):
        feed = write_feed(tmp_path / "feed", {
            "stop_times.txt": (
                "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                "t1,08:00:00,08:00:00,s1,1\n"
                "t1,08:10:00,08:10:00,ghost,2\n"
            ),
        })
        with pytest.raises(DataError, match="ghost"):
            parse_gtfs(feed)

    def test_dangling_route_reference(self, tmp_path):
        feed = write_feed(tmp_path / "feed", {
            "trips.txt": "route_id,service_id,trip_id\nnope,wk,t1\n",
        })
        with pytest.raises(DataError, match="nope"):
            parse_gtfs(feed)

    def test_non_monotone_times_fatal_and_names_trip(self, tmp_path):
        feed = write_feed(tmp_path / "feed", {
            "stop_times.txt": (
                "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                "t1,08:10:00,08:10:00,s1,1\n"
                "t1,08:05:00,08:05:00,s2,2\n"
            ),
        })
        with pytest.raises(DataError, match="t1"):
            parse_gtfs(feed)

    def test_malformed_time_names_row(self, tmp_path):
        feed = write_feed(tmp_path / "feed", {
            "stop_times.txt": (
                "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                "t1,08:00:00,08:00:00,s1,1\n"
                "t1,0810,0810,s2,2\n"
            ),
        })
        with pytest.raises(DataError, match="row 3"):
            parse_gtfs(feed)

    def test_duplicate_stop_id(self, tmp_path):
        feed = write_feed(tmp_path / "feed", {
            "stops.txt": (
                "stop_id,stop_name,stop_lat,stop_lon\n"
                "s1,A,39.90,-83.00\ns1,B,39.91,-83.00\n"
                "s2,C,39.91,-83.0\ns3,D,39.92,-83.0\n"
            ),
        })
        with pytest.raises(DataError, match="duplicate stop_id"):
            parse_gtfs(feed)

    def test_transfers_parsed(self, tmp_path):
        feed = write_feed(tmp_path / "feed", {
            "transfers.txt": (
                "from_stop_id,to_stop_id,transfer_type,min_transfer_time\n"
                "s1,s2,2,120\n"
            ),
        })
        network = parse_gtfs(feed)
        assert network.footpaths[0].duration_s == 120

    def test_out_of_sequence_rows_are_sorted(self, tmp_path):
        feed = write_feed(tmp_path / "feed", {
            "stop_times.txt": (
                "trip_id,arrival_time,departure_time,stop_id,stop_sequence\n"
                "t1,08:25:00,08:25:00,s3,3\n"
                "t1,08:00:00,08:00:00,s1,1\n"
                "t1,08:10:00,08:10:00,s2,2\n"
            ),
        })
        trip = parse_gtfs(feed).trips["t1"]
        assert [st.stop_id for st in trip.stop_times] == ["s1", "s2", "s3"]


class TestRoundTrip:
    def test_parse_serialize_parse_identity(self, tmp_path):
        grid = HexGrid(GRIDVILLE_CENTER)
        original = gridville_network(grid)
        write_gtfs(original, tmp_path / "out")
        reparsed = parse_gtfs(tmp_path / "out")
        assert reparsed == original

    @pytest.mark.parametrize("seed", range(5))
    def test_random_networks_roundtrip(self, tmp_path, seed):
        original = random_network(seed, overnight=seed % 2 == 0)
        write_gtfs(original, tmp_path / f"feed{seed}")
        assert parse_gtfs(tmp_path / f"feed{seed}") == original
