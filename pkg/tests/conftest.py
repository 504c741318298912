import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mtsrkit.layout import StationSpec, generate_layout, shortest_distances


@pytest.fixture(scope="session")
def small_layout():
    """Desk-scale warehouse: 2x2 blocks of 2x3 shelves, three stations."""
    return generate_layout(
        (2, 2),
        2,
        3,
        1.0,
        [StationSpec("west", 1), StationSpec("south", 1), StationSpec("east", 1)],
        StationSpec("north", 2),
    )


@pytest.fixture(scope="session")
def small_dist(small_layout):
    return shortest_distances(small_layout)


@pytest.fixture(scope="session")
def three_shelf_layout():
    """Single row of three shelves; used by exhaustive tour oracles."""
    return generate_layout(
        (1, 1), 1, 3, 1.0, [StationSpec("west", 1)], StationSpec("north", 1)
    )


@pytest.fixture(scope="session")
def three_shelf_dist(three_shelf_layout):
    return shortest_distances(three_shelf_layout)
