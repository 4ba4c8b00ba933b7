from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from transit_access.config import load_config
from transit_access.fixtures import write_gridville
from transit_access.pipeline import build_city_bundle


@pytest.fixture(scope="session")
def gridville_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("gridville_data")
    write_gridville(out, seed=7)
    return out


@pytest.fixture(scope="session")
def gridville_config(gridville_dir):
    return load_config(gridville_dir / "config.yaml")


@pytest.fixture(scope="session")
def gridville_bundle(gridville_config):
    return build_city_bundle(gridville_config.cities[0], gridville_config)
