"""2D grid navigation: costed occupancy maps at several lattice spacings.

Maps come in two text formats. The benchmark format:

    type octile
    height H
    width W
    map
    <H rows of W glyphs>      . G -> passable (cost 1); @ O T S W -> obstacle

and a non-uniform cost variant with the same header shape:

    type cost
    height H
    width W
    map
    <H rows of W comma-separated integers, -1 = obstacle>

Coarse lattices are anchored at cell (0, 0): a state lies on resolution r
exactly when both coordinates are multiples of that resolution's factor. An
action at factor f moves f cells in one of the 4/8 compass directions and
costs the sum of the per-cell costs it sweeps (source cell excluded, target
included; a diagonal sweeps one cell per step). Diagonal moves additionally
require the two axis neighbours of the first step to be free, so corners
are never cut.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .domain import DomainModel

OBSTACLE = -1

_PASSABLE_GLYPHS = {".": 1, "G": 1}
_OBSTACLE_GLYPHS = {"@", "O", "T", "S", "W"}

DIRS4 = ((1, 0), (-1, 0), (0, 1), (0, -1))
DIRS8 = DIRS4 + ((1, 1), (1, -1), (-1, 1), (-1, -1))

GridState = tuple  # (x, y) in fine-grid units


class MapParseError(ValueError):
    """Malformed map text; carries the offending 1-based line (and column)."""

    def __init__(self, message: str, line: int, col: Optional[int] = None) -> None:
        at = f"line {line}" + (f", column {col}" if col is not None else "")
        super().__init__(f"{at}: {message}")
        self.line = line
        self.col = col


@dataclass
class Grid2D:
    """Immutable costed occupancy grid plus its search discretisation."""

    width: int
    height: int
    costs: np.ndarray                      # int32 [height, width]; OBSTACLE = -1
    connectivity: int = 4
    resolution_factors: tuple[int, ...] = (1,)

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be >= 1")
        if self.costs.shape != (self.height, self.width):
            raise ValueError("cost array shape does not match dimensions")
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")
        factors = tuple(int(f) for f in self.resolution_factors)
        if not factors or factors[0] != 1 or list(factors) != sorted(set(factors)):
            raise ValueError("resolution factors must be ascending, distinct and start at 1")
        object.__setattr__(self, "resolution_factors", factors)
        bad = (self.costs != OBSTACLE) & (self.costs < 1)
        if bad.any():
            raise ValueError("cell costs must be >= 1 or OBSTACLE")
        # flat python list: much faster than numpy scalars in the inner loops
        self._flat: list[int] = [int(v) for v in self.costs.ravel()]
        free = self.costs[self.costs != OBSTACLE]
        self._min_cost: int = int(free.min()) if free.size else 1

    @property
    def min_cost(self) -> int:
        return self._min_cost

    def in_bounds(self, x: int, y: int) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height

    def cost_at(self, x: int, y: int) -> int:
        return self._flat[y * self.width + x]

    def is_free(self, x: int, y: int) -> bool:
        return self.in_bounds(x, y) and self._flat[y * self.width + x] != OBSTACLE

    def with_search_params(self, connectivity: Optional[int] = None,
                           factors: Optional[Sequence[int]] = None) -> "Grid2D":
        return Grid2D(
            self.width, self.height, self.costs,
            connectivity if connectivity is not None else self.connectivity,
            tuple(factors) if factors is not None else self.resolution_factors,
        )


# -- parsing / writing -----------------------------------------------------------


def _parse_header(lines: list[str], expected_type: str) -> tuple[int, int]:
    if len(lines) < 4:
        raise MapParseError("incomplete header", line=len(lines) or 1)
    if lines[0].strip() != f"type {expected_type}":
        raise MapParseError(f"expected 'type {expected_type}'", line=1)
    try:
        tag, h = lines[1].split()
        if tag != "height":
            raise ValueError
        height = int(h)
    except ValueError:
        raise MapParseError("expected 'height <int>'", line=2) from None
    try:
        tag, w = lines[2].split()
        if tag != "width":
            raise ValueError
        width = int(w)
    except ValueError:
        raise MapParseError("expected 'width <int>'", line=3) from None
    if lines[3].strip() != "map":
        raise MapParseError("expected 'map'", line=4)
    if height < 1 or width < 1:
        raise MapParseError("dimensions must be >= 1", line=2)
    return width, height


def _split_lines(text: "str | bytes") -> list[str]:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = text.split("\n")
    while lines and lines[-1].strip() == "":
        lines.pop()
    return lines


def parse_movingai(text: "str | bytes", connectivity: int = 4,
                   factors: Sequence[int] = (1,)) -> Grid2D:
    """Parse the benchmark glyph format into a unit-cost grid."""
    lines = _split_lines(text)
    width, height = _parse_header(lines, "octile")
    if len(lines) - 4 != height:
        raise MapParseError(
            f"expected {height} map rows, found {len(lines) - 4}", line=len(lines)
        )
    costs = np.empty((height, width), dtype=np.int32)
    for row in range(height):
        lineno = 5 + row
        glyphs = lines[4 + row].rstrip("\r")
        if len(glyphs) != width:
            raise MapParseError(
                f"row has {len(glyphs)} glyphs, expected {width}", line=lineno
            )
        for col, ch in enumerate(glyphs):
            if ch in _PASSABLE_GLYPHS:
                costs[row, col] = _PASSABLE_GLYPHS[ch]
            elif ch in _OBSTACLE_GLYPHS:
                costs[row, col] = OBSTACLE
            else:
                raise MapParseError(f"unknown glyph {ch!r}", line=lineno, col=col + 1)
    return Grid2D(width, height, costs, connectivity, tuple(factors))


def parse_costmap(text: "str | bytes", connectivity: int = 4,
                  factors: Sequence[int] = (1,)) -> Grid2D:
    """Parse the comma-separated integer cost format (-1 = obstacle)."""
    lines = _split_lines(text)
    width, height = _parse_header(lines, "cost")
    if len(lines) - 4 != height:
        raise MapParseError(
            f"expected {height} map rows, found {len(lines) - 4}", line=len(lines)
        )
    costs = np.empty((height, width), dtype=np.int32)
    for row in range(height):
        lineno = 5 + row
        cells = lines[4 + row].rstrip("\r").split(",")
        if len(cells) != width:
            raise MapParseError(
                f"row has {len(cells)} cells, expected {width}", line=lineno
            )
        for col, cell in enumerate(cells):
            try:
                v = int(cell)
            except ValueError:
                raise MapParseError(
                    f"bad cell value {cell.strip()!r}", line=lineno, col=col + 1
                ) from None
            if v != OBSTACLE and v < 1:
                raise MapParseError(
                    f"cell cost must be >= 1 or -1, got {v}", line=lineno, col=col + 1
                )
            costs[row, col] = v
    return Grid2D(width, height, costs, connectivity, tuple(factors))


def parse_map(text: "str | bytes", connectivity: int = 4,
              factors: Sequence[int] = (1,)) -> Grid2D:
    """Dispatch on the 'type' header line."""
    lines = _split_lines(text)
    first = lines[0].strip() if lines else ""
    if first == "type octile":
        return parse_movingai(text, connectivity, factors)
    if first == "type cost":
        return parse_costmap(text, connectivity, factors)
    raise MapParseError("expected 'type octile' or 'type cost'", line=1)


def dump_costmap(grid: Grid2D) -> str:
    rows = ["type cost", f"height {grid.height}", f"width {grid.width}", "map"]
    for y in range(grid.height):
        rows.append(",".join(str(int(v)) for v in grid.costs[y]))
    return "\n".join(rows) + "\n"


# -- metrics ----------------------------------------------------------------------


def manhattan(a: GridState, b: GridState) -> float:
    return float(abs(a[0] - b[0]) + abs(a[1] - b[1]))


def euclidean(a: GridState, b: GridState) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def chebyshev(a: GridState, b: GridState) -> float:
    return float(max(abs(a[0] - b[0]), abs(a[1] - b[1])))


def scaled_heuristic(grid: Grid2D, goal: GridState, metric=None):
    """Distance-to-goal estimate scaled by the cheapest cell cost.

    The scaling keeps the estimate a lower bound on non-uniform maps, where
    every swept cell costs at least ``grid.min_cost``.
    """
    if metric is None:
        metric = anchor_metric(grid)
    scale = float(grid.min_cost)
    return lambda s: scale * metric(s, goal)


def anchor_metric(grid: Grid2D):
    """The consistent metric for this grid's connectivity.

    4-connected moves shorten the Manhattan distance by at most one cell per
    swept cell; 8-connected moves do the same for the Chebyshev distance
    (a Euclidean estimate over-counts diagonals, whose swept cost is one
    cell per step, so it is offered only as inadmissible guidance).
    """
    return manhattan if grid.connectivity == 4 else chebyshev


# -- the domain --------------------------------------------------------------------


class GridDomain(DomainModel):
    """Multi-resolution grid graph with swept-cell action costs."""

    def __init__(self, grid: Grid2D, goal: GridState) -> None:
        gx, gy = goal
        if not grid.is_free(gx, gy):
            raise ValueError(f"goal {goal} is not a free cell")
        self.grid = grid
        self.goal = (int(gx), int(gy))
        self._dirs = DIRS4 if grid.connectivity == 4 else DIRS8
        self._factors = grid.resolution_factors

    @property
    def num_resolutions(self) -> int:
        return len(self._factors)

    def resolutions_of(self, state: GridState) -> tuple[int, ...]:
        x, y = state
        return tuple(
            r for r, f in enumerate(self._factors, start=1)
            if x % f == 0 and y % f == 0
        )

    def is_goal(self, state: GridState) -> bool:
        return state == self.goal

    def successors_at(self, state: GridState, resolution: int) -> list[tuple]:
        f = self._factors[resolution - 1]
        x, y = state
        if x % f or y % f:
            raise ValueError(f"state {state} is not aligned to factor {f}")
        grid = self.grid
        flat = grid._flat
        width = grid.width
        height = grid.height
        out = []
        for d, (dx, dy) in enumerate(self._dirs):
            nx = x + f * dx
            ny = y + f * dy
            if not (0 <= nx < width and 0 <= ny < height):
                continue
            if dx and dy:
                # no corner cutting: both axis neighbours of the first step free
                if flat[y * width + (x + dx)] == OBSTACLE or flat[(y + dy) * width + x] == OBSTACLE:
                    continue
            cost = 0
            blocked = False
            for k in range(1, f + 1):
                c = flat[(y + k * dy) * width + (x + k * dx)]
                if c == OBSTACLE:
                    blocked = True
                    break
                cost += c
            if blocked:
                continue
            out.append(((nx, ny), float(cost), (resolution - 1) * 8 + d))
        return out

    def state_repr(self, state: GridState) -> str:
        return f"{state[0]},{state[1]}"


def action_cost(grid: Grid2D, origin: GridState, target: GridState) -> Optional[float]:
    """Swept cost of the single action from ``origin`` to ``target``.

    The two states must differ by one axis-aligned or exact-diagonal segment.
    Returns None when any swept cell is an obstacle (callers drop the move).
    """
    dx = target[0] - origin[0]
    dy = target[1] - origin[1]
    if dx == 0 and dy == 0:
        raise ValueError("origin and target coincide")
    if dx and dy and abs(dx) != abs(dy):
        raise ValueError("action must be axis-aligned or an exact diagonal")
    steps = max(abs(dx), abs(dy))
    sx = (dx > 0) - (dx < 0)
    sy = (dy > 0) - (dy < 0)
    total = 0
    for k in range(1, steps + 1):
        x = origin[0] + k * sx
        y = origin[1] + k * sy
        if not grid.is_free(x, y):
            return None
        total += grid.cost_at(x, y)
    return float(total)
