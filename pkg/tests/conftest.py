import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from uavplace.channel import ChannelParams  # noqa: E402
from uavplace.terrain import Area, Building, TerrainMap  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# filled by the acceptance module, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def params():
    return ChannelParams.default()


@pytest.fixture
def area():
    return Area(0.0, 0.0, 300.0, 300.0)


@pytest.fixture
def empty_terrain(area):
    return TerrainMap((), area)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def wall_terrain():
    """One tall, thin wall across the x axis between x = 10 and x = 12."""
    return TerrainMap((Building(((10, -1), (12, -1), (12, 1), (10, 1)), 30.0),), Area(-100, -100, 100, 100))
