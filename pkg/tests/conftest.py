import sys
from pathlib import Path

import pytest

from forestplan import Polygon, Workspace

sys.path.insert(0, str(Path(__file__).parent))  # make helpers importable


@pytest.fixture
def empty_ws():
    return Workspace((0.0, 0.0, 100.0, 80.0), [], robot_radius=2.0)


@pytest.fixture
def box_ws():
    """100x80 workspace with one square block in the middle."""
    block = Polygon([(40, 30), (60, 30), (60, 50), (40, 50)])
    return Workspace((0.0, 0.0, 100.0, 80.0), [block], robot_radius=2.0)
