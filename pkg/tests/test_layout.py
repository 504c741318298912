import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mtsrkit.errors import LayoutError
from mtsrkit.layout import (
    DistanceMatrix,
    GridLayout,
    StationSpec,
    generate_layout,
    shortest_distances,
)
from oracles import floyd_warshall


def bfs_reachable(n_cells, edges, source):
    adj = [[] for _ in range(n_cells)]
    for u, v, _ in edges:
        adj[u].append(v)
    seen = {source}
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return seen


def test_minimal_layout_valid_and_strongly_connected():
    lay = generate_layout((1, 1), 1, 1, 1.0, [StationSpec("west", 1)], StationSpec("north", 1))
    assert lay.n_shelves == 1
    n = len(lay.cells)
    for src in range(n):
        assert bfs_reachable(n, lay.directed_edges, src) == set(range(n))


def test_two_by_two_blocks_all_pairs_reachable(small_layout):
    n = len(small_layout.cells)
    for src in range(n):
        assert bfs_reachable(n, small_layout.directed_edges, src) == set(range(n))


def test_workstation_on_shelf_cell_rejected(small_layout):
    shelf_cell = small_layout.shelves[0]
    with pytest.raises(LayoutError):
        GridLayout(
            cells=small_layout.cells,
            directed_edges=small_layout.directed_edges,
            shelves=small_layout.shelves,
            workstations=((shelf_cell, 1),),
            charging_station=small_layout.charging_station,
            cell_pitch=small_layout.cell_pitch,
        )


def test_overlapping_station_placement_rejected():
    with pytest.raises(LayoutError):
        generate_layout(
            (1, 1),
            2,
            2,
            1.0,
            [StationSpec("west", 1, offset=1), StationSpec("west", 1, offset=1)],
            StationSpec("north", 1),
        )


def test_counts_validated(small_layout):
    with pytest.raises(LayoutError):
        GridLayout(
            cells=small_layout.cells,
            directed_edges=small_layout.directed_edges,
            shelves=small_layout.shelves,
            workstations=((0, 0),),
            charging_station=small_layout.charging_station,
            cell_pitch=small_layout.cell_pitch,
        )
    with pytest.raises(LayoutError):
        generate_layout((0, 1), 1, 1, 1.0, [StationSpec("west", 1)], StationSpec("north", 1))


def ring_layout():
    # 4-cell one-way ring: 0 -> 1 -> 2 -> 3 -> 0, pitch 1 m
    cells = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))
    edges = ((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0))
    return GridLayout(
        cells=cells,
        directed_edges=edges,
        shelves=(0, 1),
        workstations=((2, 1),),
        charging_station=(3, 1),
        cell_pitch=1.0,
    )


def test_identity_distance_zero(small_dist):
    assert np.all(np.diag(small_dist.d) == 0.0)


def test_one_way_ring_distances():
    dm = shortest_distances(ring_layout())
    # poi order: shelf c0, shelf c1, ws c2, charger c3
    assert dm.d[0][1] == 1.0
    assert dm.d[1][0] == 3.0
    assert dm.d[1][2] == 1.0
    assert dm.d[2][1] == 3.0


def test_distances_match_floyd_warshall(small_layout, small_dist):
    full = floyd_warshall(len(small_layout.cells), small_layout.directed_edges)
    pois = small_layout.poi_cells()
    for a, ca in enumerate(pois):
        for b, cb in enumerate(pois):
            assert small_dist.d[a][b] == full[ca][cb]


def test_directed_triangle_inequality(small_dist):
    d = small_dist.d
    n = d.shape[0]
    for u, v, w in itertools.product(range(n), repeat=3):
        assert d[u][w] <= d[u][v] + d[v][w] + 1e-12


def test_reversed_graph_transposes_distances(small_layout, small_dist):
    reversed_edges = tuple((v, u, l) for u, v, l in small_layout.directed_edges)
    rev = GridLayout(
        cells=small_layout.cells,
        directed_edges=reversed_edges,
        shelves=small_layout.shelves,
        workstations=small_layout.workstations,
        charging_station=small_layout.charging_station,
        cell_pitch=small_layout.cell_pitch,
    )
    rev_d = shortest_distances(rev).d
    assert np.allclose(rev_d, small_dist.d.T)


def test_distances_are_multiples_of_pitch(small_layout, small_dist):
    steps = small_dist.d / small_layout.cell_pitch
    assert np.allclose(steps, np.round(steps))


@settings(max_examples=20, deadline=None)
@given(
    bx=st.integers(1, 3),
    by=st.integers(1, 2),
    rows=st.integers(1, 3),
    cols=st.integers(1, 3),
)
def test_generated_layouts_always_strongly_connected(bx, by, rows, cols):
    lay = generate_layout(
        (bx, by), rows, cols, 1.5,
        [StationSpec("west", 1), StationSpec("east", 2)],
        StationSpec("north", 1),
    )
    n = len(lay.cells)
    assert bfs_reachable(n, lay.directed_edges, 0) == set(range(n))
    assert lay.n_shelves == bx * by * rows * cols


def test_distance_matrix_validation():
    with pytest.raises(LayoutError):
        DistanceMatrix(d=np.array([[0.0, 1.0], [1.0, 0.5]]), n_shelves=1, n_workstations=1)
    with pytest.raises(LayoutError):
        DistanceMatrix(d=-np.ones((2, 2)) + np.eye(2), n_shelves=1, n_workstations=0)
