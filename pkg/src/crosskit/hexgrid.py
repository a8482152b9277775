"""Hexagonal grids of a given radius and their concentric cycles.

Cells are hexagons addressed by cube coordinates ``(x, y, z)`` with
``x + y + z = 0``; the radius-``s`` grid holds every cell at hex distance
at most ``s - 1`` from the origin. Corners live on the same lattice scaled
by three, so every corner has a unique integer name shared by the (up to
three) cells that meet there.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .graph import Edge, Graph, edge_key

Cell = tuple[int, int, int]

# corner offsets of a cell, counterclockwise
_CORNERS = [(2, -1, -1), (1, 1, -2), (-1, 2, -1), (-2, 1, 1), (-1, -1, 2), (1, -2, 1)]
_AXIS = (1, -1, 0)


def cell_distance(a: Cell, b: Cell) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]), abs(a[2] - b[2]))


def cells_of(radius: int, center: Cell = (0, 0, 0)) -> list[Cell]:
    """Cells of a radius-``radius`` grid around ``center``, in a fixed order."""
    cx, cy, cz = center
    out = []
    for x in range(-radius + 1, radius):
        for y in range(-radius + 1, radius):
            z = -x - y
            if abs(z) < radius:
                out.append((cx + x, cy + y, cz + z))
    return out


def corner_name(c: tuple[int, int, int]) -> str:
    return f"h{c[0]},{c[1]},{c[2]}"


def corner_of(name: str) -> tuple[int, int, int]:
    x, y, z = name[1:].split(",")
    return int(x), int(y), int(z)


def cell_corners(cell: Cell) -> list[str]:
    bx, by, bz = (3 * cell[0], 3 * cell[1], 3 * cell[2])
    return [corner_name((bx + dx, by + dy, bz + dz)) for dx, dy, dz in _CORNERS]


def cell_edges(cell: Cell) -> list[Edge]:
    cs = cell_corners(cell)
    return [edge_key(cs[i], cs[(i + 1) % 6]) for i in range(6)]


def grid_of_cells(cells: Iterable[Cell]) -> Graph:
    g = Graph()
    for cell in cells:
        for v in cell_corners(cell):
            g.add_vertex(v)
        for u, v in cell_edges(cell):
            g.add_edge(u, v)
    return g


@lru_cache(maxsize=None)
def _hex_grid_cached(radius: int, center: Cell) -> Graph:
    return grid_of_cells(cells_of(radius, center))


def hex_grid(radius: int, center: Cell = (0, 0, 0)) -> Graph:
    """The radius-``radius`` hexagonal grid; radius 1 is a single hexagon."""
    if radius < 1:
        raise ValueError("radius must be at least 1")
    return _hex_grid_cached(radius, center).copy()


def boundary_edges(cells: Iterable[Cell]) -> list[Edge]:
    """Edges lying on exactly one of the given cells."""
    count: dict[Edge, int] = {}
    for cell in cells:
        for e in cell_edges(cell):
            count[e] = count.get(e, 0) + 1
    return sorted(e for e, c in count.items() if c == 1)


def concentric_cycle(radius: int, index: int, center: Cell = (0, 0, 0)) -> list[Edge]:
    """Edges of the ``index``-th concentric cycle, 1 being the innermost
    hexagon and ``radius`` the outer boundary."""
    if not 1 <= index <= radius:
        raise ValueError(f"cycle index {index} outside 1..{radius}")
    return boundary_edges(cells_of(index, center))


def subgrid_centers(s: int, r: int, count: int) -> list[Cell]:
    """Centres of ``count`` vertex-disjoint radius-``r`` subgrids of the
    radius-``s`` grid, laid out along one axis in a canonical order.

    Two radius-``r`` subgrids share no corner once their centres are ``2r``
    apart, and a centre at distance ``s - r`` from the origin still fits.
    """
    if count < 1:
        return []
    span = 2 * r * (count - 1)
    if span > 2 * (s - r) or r > s:
        raise ValueError(f"{count} disjoint radius-{r} subgrids do not fit in radius {s}")
    start = span // 2
    return [tuple(a * (start - 2 * r * j) for a in _AXIS) for j in range(count)]


def corner_position(name: str) -> tuple[Fraction, Fraction]:
    """Planar coordinates of a corner (exact, up to a fixed affine map)."""
    x, y, _ = corner_of(name)
    return Fraction(2 * x + y), Fraction(2 * y)


__all__ = [
    "cell_corners",
    "cell_distance",
    "cells_of",
    "concentric_cycle",
    "corner_position",
    "hex_grid",
    "subgrid_centers",
]
