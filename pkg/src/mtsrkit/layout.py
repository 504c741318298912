"""Warehouse grid: directed unidirectional path network and shortest distances.

The warehouse is a rectangular grid of cells. The perimeter forms a clockwise
one-way ring; interior rows and columns are one-way aisles with alternating
directions. Shelves occupy interior block cells, workstations sit on the
west/south/east boundary and the charging station on the north boundary.
Robots traverse cell centers; picks and drops happen at the cell itself.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import LayoutError

SIDES = ("west", "south", "east", "north")


@dataclass(frozen=True)
class StationSpec:
    """Placement request for a boundary station."""

    side: str
    workers: int = 1
    offset: int | None = None  # cell index along the side; None = spread evenly


@dataclass(frozen=True)
class GridLayout:
    """Directed grid of cells with designated shelf, workstation and charger cells.

    cells: planar (x, y) coordinates in meters, y growing southward.
    directed_edges: (from_cell, to_cell, length_m) triples.
    shelves: cell indices holding shelves, in id order.
    workstations: (cell_index, worker_count) per station.
    charging_station: (cell_index, charger_count).
    """

    cells: tuple
    directed_edges: tuple
    shelves: tuple
    workstations: tuple
    charging_station: tuple
    cell_pitch: float

    def __post_init__(self):
        n = len(self.cells)
        if len(self.shelves) < 1:
            raise LayoutError("at least one shelf required")
        if len(self.workstations) < 1:
            raise LayoutError("at least one workstation required")
        for cell, workers in self.workstations:
            if workers < 1:
                raise LayoutError(f"workstation at cell {cell} needs >= 1 worker")
        if self.charging_station[1] < 1:
            raise LayoutError("charging station needs >= 1 charger")
        special = list(self.shelves)
        special += [c for c, _ in self.workstations]
        special.append(self.charging_station[0])
        if len(set(special)) != len(special):
            raise LayoutError("shelf, workstation and charging cells must be pairwise distinct")
        for c in special:
            if not 0 <= c < n:
                raise LayoutError(f"cell index {c} out of range")
        for u, v, length in self.directed_edges:
            if not (0 <= u < n and 0 <= v < n):
                raise LayoutError(f"edge ({u},{v}) references unknown cell")
            if length <= 0:
                raise LayoutError(f"edge ({u},{v}) has non-positive length")
        if not self._strongly_connected():
            raise LayoutError("path network is not strongly connected")

    def _adjacency(self, reverse=False):
        adj = [[] for _ in self.cells]
        for u, v, length in self.directed_edges:
            if reverse:
                adj[v].append((u, length))
            else:
                adj[u].append((v, length))
        return adj

    def _strongly_connected(self) -> bool:
        # forward and reverse BFS from cell 0 must each cover every cell
        for reverse in (False, True):
            adj = self._adjacency(reverse)
            seen = [False] * len(self.cells)
            seen[0] = True
            queue = deque([0])
            while queue:
                u = queue.popleft()
                for v, _ in adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        queue.append(v)
            if not all(seen):
                return False
        return True

    @property
    def n_shelves(self) -> int:
        return len(self.shelves)

    @property
    def n_workstations(self) -> int:
        return len(self.workstations)

    def worker_counts(self) -> list:
        return [w for _, w in self.workstations]

    def poi_cells(self) -> list:
        """Points of interest: shelves, then workstations, then the charger."""
        return list(self.shelves) + [c for c, _ in self.workstations] + [self.charging_station[0]]


@dataclass(frozen=True)
class DistanceMatrix:
    """Directed shortest distances (meters) between all points of interest.

    Index order: shelf 0..N_sh-1, workstation 0..N_w-1, charging station last.
    """

    d: np.ndarray
    n_shelves: int
    n_workstations: int
    poi_cells: tuple = field(default=())

    def __post_init__(self):
        n = self.n_shelves + self.n_workstations + 1
        if self.d.shape != (n, n):
            raise LayoutError(f"distance matrix must be {n}x{n}, got {self.d.shape}")
        if np.any(np.diag(self.d) != 0.0):
            raise LayoutError("d(u,u) must be 0")
        if np.any(self.d < 0.0):
            raise LayoutError("distances must be nonnegative")

    def shelf(self, m: int) -> int:
        return m

    def workstation(self, i: int) -> int:
        return self.n_shelves + i

    @property
    def charger(self) -> int:
        return self.n_shelves + self.n_workstations

    def shelf_to_workstation(self, i: int) -> np.ndarray:
        """Distances from every shelf to workstation i."""
        return self.d[: self.n_shelves, self.workstation(i)]

    def workstation_to_shelf(self, i: int) -> np.ndarray:
        return self.d[self.workstation(i), : self.n_shelves]

    def shelf_pairwise(self) -> np.ndarray:
        return self.d[: self.n_shelves, : self.n_shelves]

    def shelf_to_charger(self) -> np.ndarray:
        return self.d[: self.n_shelves, self.charger]

    def charger_to_shelf(self) -> np.ndarray:
        return self.d[self.charger, : self.n_shelves]


def _dijkstra(adj, source, n):
    dist = [float("inf")] * n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        du, u = heapq.heappop(heap)
        if du > dist[u]:
            continue
        for v, length in adj[u]:
            dv = du + length
            if dv < dist[v]:
                dist[v] = dv
                heapq.heappush(heap, (dv, v))
    return dist


def shortest_distances(layout: GridLayout) -> DistanceMatrix:
    """All-pairs shortest directed distances over the layout's points of interest."""
    adj = layout._adjacency()
    pois = layout.poi_cells()
    n_cells = len(layout.cells)
    rows = []
    for src in pois:
        dist = _dijkstra(adj, src, n_cells)
        rows.append([dist[c] for c in pois])
    d = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(d)):
        raise LayoutError("some points of interest are unreachable")
    return DistanceMatrix(
        d=d,
        n_shelves=layout.n_shelves,
        n_workstations=layout.n_workstations,
        poi_cells=tuple(pois),
    )


def generate_layout(
    blocks,
    shelf_rows: int,
    shelf_cols: int,
    cell_pitch: float,
    workstations,
    charging,
) -> GridLayout:
    """Build the parameterized warehouse grid.

    blocks: (bx, by) shelf block counts; each block is shelf_cols x shelf_rows
    shelf cells, separated and surrounded by one-way aisles.
    workstations: list of StationSpec (sides west/south/east/north).
    charging: StationSpec whose `workers` field carries the charger count.
    """
    bx, by = blocks
    if bx < 1 or by < 1 or shelf_rows < 1 or shelf_cols < 1:
        raise LayoutError("block and shelf counts must be >= 1")
    if cell_pitch <= 0:
        raise LayoutError("cell_pitch must be positive")
    nx = bx * shelf_cols + bx + 1
    ny = by * shelf_rows + by + 1

    def cell_id(x, y):
        return y * nx + x

    cells = [(x * cell_pitch, y * cell_pitch) for y in range(ny) for x in range(nx)]

    edges = []

    def add(x0, y0, x1, y1):
        edges.append((cell_id(x0, y0), cell_id(x1, y1), cell_pitch))

    # clockwise perimeter ring (y grows southward)
    for x in range(nx - 1):
        add(x, 0, x + 1, 0)
        add(x + 1, ny - 1, x, ny - 1)
    for y in range(ny - 1):
        add(nx - 1, y, nx - 1, y + 1)
        add(0, y + 1, 0, y)
    # interior one-way rows and columns, alternating direction
    for y in range(1, ny - 1):
        for x in range(nx - 1):
            if y % 2 == 1:
                add(x, y, x + 1, y)
            else:
                add(x + 1, y, x, y)
    for x in range(1, nx - 1):
        for y in range(ny - 1):
            if x % 2 == 1:
                add(x, y, x, y + 1)
            else:
                add(x, y + 1, x, y)

    aisle_col = lambda x: x % (shelf_cols + 1) == 0
    aisle_row = lambda y: y % (shelf_rows + 1) == 0
    shelves = [
        cell_id(x, y)
        for y in range(ny)
        for x in range(nx)
        if not aisle_col(x) and not aisle_row(y)
    ]

    def side_cells(side):
        if side == "west":
            return [cell_id(0, y) for y in range(ny)]
        if side == "east":
            return [cell_id(nx - 1, y) for y in range(ny)]
        if side == "north":
            return [cell_id(x, 0) for x in range(nx)]
        if side == "south":
            return [cell_id(x, ny - 1) for x in range(nx)]
        raise LayoutError(f"unknown side {side!r}; expected one of {SIDES}")

    side_totals = {}
    for spec in workstations:
        side_totals[spec.side] = side_totals.get(spec.side, 0) + 1

    taken = set()

    def place(spec, rank, n_on_side):
        cells_on_side = side_cells(spec.side)
        if spec.offset is not None:
            if not 0 <= spec.offset < len(cells_on_side):
                raise LayoutError(f"offset {spec.offset} outside side {spec.side}")
            cell = cells_on_side[spec.offset]
        else:
            cell = cells_on_side[(rank + 1) * len(cells_on_side) // (n_on_side + 1)]
        if cell in taken:
            raise LayoutError(f"station placement overlaps cell {cell} on side {spec.side}")
        taken.add(cell)
        return cell

    ws = []
    side_rank = {}
    for spec in workstations:
        rank = side_rank.get(spec.side, 0)
        side_rank[spec.side] = rank + 1
        ws.append((place(spec, rank, side_totals[spec.side]), spec.workers))
    charger_cell = place(charging, 0, 1)

    return GridLayout(
        cells=tuple(cells),
        directed_edges=tuple(edges),
        shelves=tuple(shelves),
        workstations=tuple(ws),
        charging_station=(charger_cell, charging.workers),
        cell_pitch=cell_pitch,
    )
