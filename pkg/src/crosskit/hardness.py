"""Grid Tiling reduction to straight-line planarity extension.

A Grid Tiling instance becomes a plane drawing of obstacles (closed
polygonal chains) plus a graph ``H`` that has to be inserted with straight
edges. Each cell of the tiling gets a core grid of candidate points, four
filtering gadgets that only let valid tiles see their filtering vertex,
and a ring of vertical/horizontal channels that force neighbouring cells
to agree on a row or a column.

All coordinates are exact rationals. Channel lengths of the thin
triangular channels are irrational; they are kept as ``a * sqrt(unit)``
with rational ``a`` and compared inside the field Q(sqrt(unit)).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from itertools import product
from math import isqrt, log2
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .constants import BIT_LENGTH_C
from .drawing import PartiallyPredrawnGraph, PolylineDrawing
from .geometry import (
    Point,
    bit_length,
    compare_directions,
    cross,
    dot,
    format_rational,
    orient,
    point_in_polygon,
    rational,
    segment_intersection,
    sub,
)
from .graph import Edge, Graph, edge_key
from .limits import Counter, budget

Tile = tuple[int, int]
Cell = tuple[int, int]

SIDES = ("b", "l", "t", "r")


class DegenerateConstruction(ValueError):
    """The gadget geometry collapsed (coinciding rays or crossing obstacles)."""

    def __init__(self, message: str, witness: Optional[Point] = None):
        super().__init__(message)
        self.witness = witness


class OffsetTooLarge(ValueError):
    """Nested chains would leave their obstacle."""


# ----------------------------------------------------------------------
# exact numbers


def ceil_sqrt(n: int) -> int:
    r = isqrt(n)
    return r if r * r == n else r + 1


def ceil_pow_75(m: int) -> int:
    """``ceil(m ** 7.5)`` computed with integers only."""
    return ceil_sqrt(m ** 15)


@dataclass(frozen=True)
class Surd:
    """The number ``x + y * sqrt(d)`` with rational ``x, y`` and ``d > 0``."""

    x: Fraction
    y: Fraction
    d: Fraction

    @staticmethod
    def of(x, y=0, d=1) -> "Surd":
        x, y, d = Fraction(x), Fraction(y), Fraction(d)
        if d == 1:
            return Surd(x + y, Fraction(0), d)
        return Surd(x, y, d)

    def _lift(self, other) -> "Surd":
        if isinstance(other, Surd):
            if other.y and self.y and other.d != self.d:
                raise ValueError("surds over different radicands")
            return other
        return Surd(Fraction(other), Fraction(0), self.d)

    def _d(self, other: "Surd") -> Fraction:
        return self.d if self.y else other.d

    def __add__(self, other) -> "Surd":
        o = self._lift(other)
        return Surd(self.x + o.x, self.y + o.y, self._d(o))

    __radd__ = __add__

    def __neg__(self) -> "Surd":
        return Surd(-self.x, -self.y, self.d)

    def __sub__(self, other) -> "Surd":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Surd":
        return (-self) + other

    def __mul__(self, other) -> "Surd":
        o = self._lift(other)
        d = self._d(o)
        return Surd(self.x * o.x + self.y * o.y * d, self.x * o.y + self.y * o.x, d)

    __rmul__ = __mul__

    def sign(self) -> int:
        x, y = self.x, self.y
        sx, sy = (x > 0) - (x < 0), (y > 0) - (y < 0)
        if sy == 0 or sx == sy:
            return sx or sy
        if sx == 0:
            return sy
        # opposite signs: compare x^2 with y^2 d
        diff = x * x - y * y * self.d
        return sx * ((diff > 0) - (diff < 0))

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - other).sign() >= 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, (Surd, int, Fraction)):
            return NotImplemented
        return (self - other).sign() == 0

    def __hash__(self) -> int:
        return hash((self.x, self.y, self.d))

    def __float__(self) -> float:
        return float(self.x) + float(self.y) * float(self.d) ** 0.5

    def __str__(self) -> str:
        if not self.y:
            return format_rational(self.x)
        return f"{format_rational(self.x)} + {format_rational(self.y)}*sqrt({format_rational(self.d)})"


# ----------------------------------------------------------------------
# grid tiling


@dataclass(frozen=True)
class GridTilingInstance:
    """Pick one tile per cell so that a row shares second coordinates and a
    column shares first coordinates. Cells and tiles are 1-indexed."""

    k: int
    m: int
    tiles: Mapping[Cell, frozenset]

    def __post_init__(self):
        if self.k < 1 or self.m < 2:
            raise ValueError("need k >= 1 and m >= 2")
        fixed = {}
        for cell, ts in self.tiles.items():
            i, j = cell
            if not (1 <= i <= self.k and 1 <= j <= self.k):
                raise ValueError(f"cell {cell} outside 1..{self.k}")
            ts = frozenset((int(a), int(b)) for a, b in ts)
            for a, b in ts:
                if not (1 <= a <= self.m and 1 <= b <= self.m):
                    raise ValueError(f"tile {(a, b)} outside 1..{self.m}")
            fixed[(i, j)] = ts
        object.__setattr__(self, "tiles", fixed)

    def cells(self) -> list[Cell]:
        return [(i, j) for i in range(1, self.k + 1) for j in range(1, self.k + 1)]

    def tiles_of(self, cell: Cell) -> frozenset:
        return self.tiles.get(cell, frozenset())

    def is_solution(self, pick: Mapping[Cell, Tile]) -> bool:
        for cell in self.cells():
            if pick.get(cell) not in self.tiles_of(cell):
                return False
        for i, j in self.cells():
            if j > 1 and pick[(i, j)][1] != pick[(i, j - 1)][1]:
                return False
            if i > 1 and pick[(i, j)][0] != pick[(i - 1, j)][0]:
                return False
        return True

    def to_dict(self) -> dict:
        return {"k": self.k, "m": self.m,
                "tiles": {f"{i},{j}": [list(t) for t in sorted(self.tiles_of((i, j)))] for i, j in self.cells()}}

    @classmethod
    def from_dict(cls, data: dict) -> "GridTilingInstance":
        tiles = {}
        for key, ts in data["tiles"].items():
            i, j = (int(x) for x in key.split(","))
            tiles[(i, j)] = frozenset(tuple(t) for t in ts)
        return cls(int(data["k"]), int(data["m"]), tiles)


def random_grid_tiling(rng: random.Random, k: int, m: int, *, density: float = 0.3,
                       solvable: Optional[bool] = None) -> GridTilingInstance:
    """Random tile sets; ``solvable`` plants a solution or removes tiles
    until none is left (``None`` leaves it to chance)."""
    all_tiles = list(product(range(1, m + 1), repeat=2))
    tiles = {}
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            chosen = {t for t in all_tiles if rng.random() < density}
            tiles[(i, j)] = chosen or {rng.choice(all_tiles)}
    if solvable:
        cols = [rng.randint(1, m) for _ in range(k)]
        rows = [rng.randint(1, m) for _ in range(k)]
        for i in range(1, k + 1):
            for j in range(1, k + 1):
                tiles[(i, j)].add((cols[j - 1], rows[i - 1]))
    gt = GridTilingInstance(k, m, {c: frozenset(t) for c, t in tiles.items()})
    if solvable is False:
        while True:
            sol = solve_grid_tiling(gt)
            if sol is None:
                break
            choices = [c for c in sorted(sol) if len(tiles[c]) > 1]
            if not choices:
                # every cell is a singleton: move one tile off the solution
                c = rng.choice(sorted(sol))
                a, b = sol[c]
                tiles[c] = {(a % m + 1, b)}
            else:
                c = rng.choice(choices)
                tiles[c].discard(sol[c])
            gt = GridTilingInstance(k, m, {c: frozenset(t) for c, t in tiles.items()})
    return gt


def solve_grid_tiling(gt: GridTilingInstance, *, steps: Optional[int] = None) -> Optional[dict[Cell, Tile]]:
    """Backtracking over column values (first coordinates) and row values
    (second coordinates), pruning as soon as a cell has no matching tile."""
    counter = Counter(budget(10_000_000, steps), "grid tiling search")
    k = gt.k
    col: dict[int, int] = {}
    row: dict[int, int] = {}
    cells = gt.cells()

    def consistent(i: int, j: int) -> bool:
        a, b = col.get(j), row.get(i)
        ts = gt.tiles_of((i, j))
        if a is not None and b is not None:
            return (a, b) in ts
        if a is not None:
            return any(t[0] == a for t in ts)
        if b is not None:
            return any(t[1] == b for t in ts)
        return bool(ts)

    def touched_ok(i: Optional[int], j: Optional[int]) -> bool:
        if i is not None:
            return all(consistent(i, jj) for jj in range(1, k + 1))
        return all(consistent(ii, j) for ii in range(1, k + 1))

    def rec(idx: int) -> bool:
        if idx == len(cells):
            return True
        i, j = cells[idx]
        if j not in col:
            for a in sorted({t[0] for t in gt.tiles_of((i, j))}):
                counter.tick()
                col[j] = a
                if touched_ok(None, j) and rec(idx):
                    return True
                del col[j]
            return False
        if i not in row:
            for b in sorted({t[1] for t in gt.tiles_of((i, j)) if t[0] == col[j]}):
                counter.tick()
                row[i] = b
                if touched_ok(i, None) and rec(idx + 1):
                    return True
                del row[i]
            return False
        return (col[j], row[i]) in gt.tiles_of((i, j)) and rec(idx + 1)

    if not all(gt.tiles_of(c) for c in cells):
        return None
    if not rec(0):
        return None
    return {(i, j): (col[j], row[i]) for i, j in cells}


# ----------------------------------------------------------------------
# convex pieces


def clip_halfplane(poly: Sequence[Point], a: Point, b: Point) -> list[Point]:
    """Part of convex ``poly`` on the closed left side of line ``a -> b``."""
    out: list[Point] = []
    n = len(poly)
    for idx in range(n):
        p, q = poly[idx], poly[(idx + 1) % n]
        sp, sq = orient(a, b, p), orient(a, b, q)
        if sp >= 0:
            out.append(p)
        if sp * sq < 0:
            r, s = sub(b, a), sub(q, p)
            t = cross(sub(a, p), r) / cross(s, r)
            out.append((p[0] + t * s[0], p[1] + t * s[1]))
    # drop repeats so degenerate slivers stay small
    dedup: list[Point] = []
    for p in out:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def box(x0, y0, x1, y1) -> list[Point]:
    x0, y0, x1, y1 = (Fraction(v) for v in (x0, y0, x1, y1))
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def bbox(points: Iterable[Point]) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    pts = list(points)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return min(xs), min(ys), max(xs), max(ys)


def _boxes_meet(a, b) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


@dataclass(frozen=True)
class Wedge:
    """Closed cone ``apex + s*left + t*right`` (s, t >= 0), with ``right``
    clockwise of ``left`` by less than a half turn."""

    apex: Point
    right: Point
    left: Point

    def clip(self, poly: Sequence[Point]) -> list[Point]:
        a = self.apex
        poly = clip_halfplane(poly, a, (a[0] + self.right[0], a[1] + self.right[1]))
        if not poly:
            return poly
        return clip_halfplane(poly, (a[0] + self.left[0], a[1] + self.left[1]), a)

    def contains(self, p: Point, strict: bool = False) -> bool:
        v = sub(p, self.apex)
        c1, c2 = cross(self.right, v), cross(v, self.left)
        return (c1 > 0 and c2 > 0) if strict else (c1 >= 0 and c2 >= 0)


# ----------------------------------------------------------------------
# channels and funnels


@dataclass(frozen=True)
class Channel:
    """An empty rectangle or right triangle between two obstacles.

    Lengths are ``a * sqrt(unit)`` and ``w * sqrt(unit)``; ``unit`` is 1
    for the axis-parallel rectangles. ``corners`` lists a rectangle
    counterclockwise starting at a corner of a short side, or a triangle as
    ``(apex, right-angle corner, far corner)``.
    """

    shape: str
    a: Fraction
    w: Fraction
    corners: tuple
    unit: Fraction = Fraction(1)

    def __post_init__(self):
        if self.shape not in ("rectangular", "triangular"):
            raise ValueError(f"unknown channel shape {self.shape!r}")
        if not self.a > self.w > 0:
            raise ValueError("a channel needs length > width > 0")

    def length(self) -> Surd:
        return Surd.of(0, self.a, self.unit)

    def width(self) -> Surd:
        return Surd.of(0, self.w, self.unit)

    def funnel_pieces(self) -> list[Wedge]:
        """Convex cones whose union with the channel itself is the funnel."""
        if self.shape == "triangular":
            apex, leg, far = self.corners
            d1, d2 = sub(leg, apex), sub(far, apex)
            if cross(d1, d2) > 0:
                return [Wedge(apex, d1, d2)]
            return [Wedge(apex, d2, d1)]
        p0, p1, p2, p3 = self.corners
        centre = ((p0[0] + p2[0]) / 2, (p0[1] + p2[1]) / 2)
        # p0p1 and p2p3 are the short sides
        out = []
        for u, v in ((p2, p3), (p0, p1)):
            d1, d2 = sub(u, centre), sub(v, centre)
            out.append(Wedge(centre, d1, d2) if cross(d1, d2) > 0 else Wedge(centre, d2, d1))
        return out

    def funnel_clip(self, poly: Sequence[Point]) -> list[list[Point]]:
        """Non-empty parts of convex ``poly`` inside the funnel."""
        pieces = [w.clip(poly) for w in self.funnel_pieces()]
        if self.shape == "rectangular":
            rect = list(self.corners)
            inside = list(poly)
            for idx in range(4):
                inside = clip_halfplane(inside, rect[idx], rect[(idx + 1) % 4]) if inside else inside
            pieces.append(inside)
        return [p for p in pieces if p]

    def in_funnel(self, p: Point, strict: bool = False) -> bool:
        return any(w.contains(p, strict) for w in self.funnel_pieces())

    def as_dict(self) -> dict:
        return {"shape": self.shape, "a": format_rational(self.a), "w": format_rational(self.w),
                "unit": format_rational(self.unit),
                "corners": [[format_rational(c) for c in p] for p in self.corners]}

    @classmethod
    def from_dict(cls, data: dict) -> "Channel":
        return cls(data["shape"], rational(data["a"]), rational(data["w"]),
                   tuple((rational(x), rational(y)) for x, y in data["corners"]), rational(data["unit"]))


def channel_shadow(c: Channel, h) -> Surd | Fraction:
    """Width of the funnel at distance ``h`` beyond the short side:
    ``w(2h/a + 1)`` for rectangles and ``w(h/a + 1)`` for triangles.

    Exact; a :class:`Fraction` when the channel has rational lengths.
    """
    h = Fraction(h)
    if h < 0:
        raise ValueError("h must be non-negative")
    factor = 2 if c.shape == "rectangular" else 1
    # w sqrt(u) (f h / (a sqrt(u)) + 1) = f w h / a + w sqrt(u)
    value = Surd.of(factor * c.w * h / c.a, c.w, c.unit)
    return value.x if not value.y else value


def _vec(p: Sequence) -> tuple:
    return (p[0], p[1])


def funnel_section_sq(c: Channel, h) -> Surd:
    """Squared length of the funnel's cut by the line parallel to the short
    side at distance ``h`` beyond it, intersected directly from the rays
    that bound the funnel."""
    h = Fraction(h)
    if c.shape == "triangular":
        apex, leg, far = c.corners
        d = sub(leg, apex)
        e = sub(far, apex)
        dd = dot(d, d)
        # |d| = a sqrt(unit); the cut is (x - apex).d = (|d| + h) |d| = dd + h a sqrt(unit)
        level = Surd.of(dd, h * c.a, c.unit)
        mu = level * Fraction(1, dd)
        nu = level * (1 / dot(e, d))
        diff = (nu * e[0] - mu * d[0], nu * e[1] - mu * d[1])
        return diff[0] * diff[0] + diff[1] * diff[1]
    p0, p1, p2, p3 = c.corners
    # short side p0p1; beyond it the funnel is bounded by the diagonals p2->p0 and p3->p1
    along = sub(p0, p3)
    # the cut line: (x - p0).along = h * |along|, rational because |along| = a
    level = h * c.a
    pts = []
    for start, end in ((p2, p0), (p3, p1)):
        r = sub(end, start)
        t = (level + dot(sub(p0, start), along)) / dot(r, along)
        pts.append((start[0] + t * r[0], start[1] + t * r[1]))
    diff = sub(pts[0], pts[1])
    return Surd.of(dot(diff, diff))


def shadow_bounds_section(c: Channel, h) -> bool:
    """``channel_shadow(c, h)`` is at least the exact funnel cut at ``h``."""
    s = channel_shadow(c, h)
    s = s if isinstance(s, Surd) else Surd.of(s)
    return s * s >= funnel_section_sq(c, h)


# ----------------------------------------------------------------------
# cell layout


def _rot(side: str, p: Point) -> Point:
    """Map bottom-gadget coordinates to ``side`` (quarter turns clockwise)."""
    x, y = p
    if side == "b":
        return (x, y)
    if side == "l":
        return (y, -x)
    if side == "t":
        return (-x, -y)
    return (-y, x)


def _unrot(side: str, p: Point) -> Point:
    x, y = p
    if side == "b":
        return (x, y)
    if side == "l":
        return (-y, x)
    if side == "t":
        return (-x, -y)
    return (y, -x)


@dataclass(frozen=True)
class Dims:
    """Measurements shared by every cell (local coordinates, cell centre 0)."""

    m: int

    @property
    def core(self) -> Fraction:
        return Fraction(self.m ** 3)

    @property
    def big(self) -> int:
        return ceil_pow_75(self.m)

    @property
    def m6(self) -> Fraction:
        return Fraction(self.m ** 6)

    @property
    def half_middle(self) -> Fraction:
        return self.big + self.core / 2

    @property
    def half_outer(self) -> Fraction:
        return self.half_middle + self.m6

    @property
    def pitch(self) -> Fraction:
        return 2 * self.half_outer

    @property
    def eps(self) -> Fraction:
        return Fraction(1, 2 * self.m ** 3)

    def coord(self, a: int) -> Fraction:
        """Centre of the ``a``-th core grid column (or row), 1-indexed."""
        return -self.core / 2 + (Fraction(a) - Fraction(1, 2)) * self.m ** 2

    def index(self, x: Fraction) -> int:
        return int((x + self.core / 2) / self.m ** 2 + Fraction(1, 2))

    def as_dict(self) -> dict:
        return {"m": self.m, "core": format_rational(self.core), "ceil_m_7_5": self.big,
                "middle_side": format_rational(2 * self.half_middle),
                "outer_side": format_rational(2 * self.half_outer)}


@dataclass
class Obstacle:
    points: tuple
    cell: Cell
    kind: str
    anchor: Point
    fan: Optional[str] = None
    chains: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {"points": [_fmt(p) for p in self.points], "cell": list(self.cell), "kind": self.kind,
                "anchor": _fmt(self.anchor), "fan": self.fan,
                "chains": [[_fmt(p) for p in ch] for ch in self.chains]}

    @classmethod
    def from_dict(cls, data: dict) -> "Obstacle":
        return cls(tuple(_pt(p) for p in data["points"]), tuple(data["cell"]), data["kind"], _pt(data["anchor"]),
                   data["fan"], [tuple(_pt(p) for p in ch) for ch in data["chains"]])


@dataclass
class FilteringGadget:
    side: str
    vertex: str
    apex: Point
    outward: Point
    ray_order: list
    frame_tiles: dict
    channels: dict
    fallback: bool

    def as_dict(self) -> dict:
        return {"side": self.side, "vertex": self.vertex, "apex": _fmt(self.apex), "outward": _fmt(self.outward),
                "ray_order": [list(t) for t in self.ray_order],
                "frame_tiles": {_tkey(t): list(f) for t, f in sorted(self.frame_tiles.items())},
                "channels": {_tkey(t): c.as_dict() for t, c in sorted(self.channels.items())},
                "fallback": self.fallback}

    @classmethod
    def from_dict(cls, data: dict) -> "FilteringGadget":
        return cls(data["side"], data["vertex"], _pt(data["apex"]), _pt(data["outward"]),
                   [tuple(t) for t in data["ray_order"]],
                   {_tile(k): tuple(v) for k, v in data["frame_tiles"].items()},
                   {_tile(k): Channel.from_dict(v) for k, v in data["channels"].items()}, data["fallback"])


@dataclass
class CellRecord:
    cell: Cell
    center: Point
    core_points: dict
    filtering: dict
    vh_channels: dict

    def region(self, tile: Tile) -> list[Point]:
        x, y = self.core_points[tile]
        h = Fraction(1, 2)
        return box(x - h, y - h, x + h, y + h)

    def as_dict(self) -> dict:
        return {"cell": list(self.cell), "center": _fmt(self.center),
                "core_points": {_tkey(t): _fmt(p) for t, p in sorted(self.core_points.items())},
                "filtering": {s: g.as_dict() for s, g in self.filtering.items()},
                "vh_channels": {s: [c.as_dict() for c in cs] for s, cs in self.vh_channels.items()}}

    @classmethod
    def from_dict(cls, data: dict) -> "CellRecord":
        return cls(tuple(data["cell"]), _pt(data["center"]),
                   {_tile(k): _pt(v) for k, v in data["core_points"].items()},
                   {s: FilteringGadget.from_dict(g) for s, g in data["filtering"].items()},
                   {s: [Channel.from_dict(c) for c in cs] for s, cs in data["vh_channels"].items()})


def _fmt(p: Point) -> list[str]:
    return [format_rational(p[0]), format_rational(p[1])]


def _pt(p) -> Point:
    return (rational(p[0]), rational(p[1]))


def _tkey(t: Tile) -> str:
    return f"{t[0]},{t[1]}"


def _tile(key: str) -> Tile:
    a, b = key.split(",")
    return int(a), int(b)


def _ccw(points: Sequence[Point]) -> tuple:
    area = sum(cross(points[i], points[(i + 1) % len(points)]) for i in range(len(points)))
    if area == 0:
        raise DegenerateConstruction("obstacle with zero area", points[0])
    return tuple(points) if area > 0 else tuple(reversed(points))


def _centroid(points: Sequence[Point]) -> Point:
    n = len(points)
    return (sum(p[0] for p in points) / n, sum(p[1] for p in points) / n)


def _triangular_channel(apex: Point, lower: Point, upper: Point) -> Channel:
    """The inclusion-maximal right triangle between the pieces ``apex-lower``
    and ``apex-upper`` whose long leg lies on one piece."""
    best = None
    for leg_end, hyp_end in ((lower, upper), (upper, lower)):
        d = sub(leg_end, apex)
        f = sub(hyp_end, apex)
        dd = dot(d, d)
        # right angle at the end of the leg, if the far corner stays on its piece
        mu = dd / dot(f, d)
        if mu <= 1:
            corner, far = leg_end, (apex[0] + mu * f[0], apex[1] + mu * f[1])
        else:
            s = dot(f, d) / dd
            corner, far = (apex[0] + s * d[0], apex[1] + s * d[1]), hyp_end
        s = (corner[0] - apex[0]) / d[0] if d[0] else (corner[1] - apex[1]) / d[1]
        n = (-d[1], d[0])
        t = abs(dot(sub(far, corner), n)) / dd
        cand = Channel("triangular", s, t, (apex, corner, far), dd)
        if best is None or cand.a * cand.a * cand.unit > best.a * best.a * best.unit:
            best = cand
    return best


def _filtering_gadget(dims: Dims, points: list[tuple[Tile, Point]],
                      widen: Optional[Mapping[Tile, Fraction]] = None) -> tuple:
    """Bottom-frame gadget for the given (tile, core point) pairs.

    Returns ``(apex, w2, ordered tiles, channel triangles, obstacle
    triangles, fallback)``.
    """
    m6, e = dims.m6, dims.eps
    xr = -dims.core / 2
    apex = (xr - m6, -dims.half_middle)
    q = []
    for tile, p in points:
        qy = apex[1] + (p[1] - apex[1]) * m6 / (p[0] - apex[0])
        q.append((qy, tile))
    q.sort()
    for (y0, t0), (y1, t1) in zip(q, q[1:]):
        if y0 == y1:
            raise DegenerateConstruction(f"tiles {t0} and {t1} share a ray", (xr, y0))
    n = len(q)
    lower = [e if i == 0 else min(e, (q[i][0] - q[i - 1][0]) / 3) for i in range(n)]
    upper = [e if i == n - 1 else min(e, (q[i + 1][0] - q[i][0]) / 3) for i in range(n)]
    fallback = any(x < e for x in lower + upper)
    for i, (_, tile) in enumerate(q):
        if widen and tile in widen:
            lower[i] = upper[i] = widen[tile] / 2
    lo = [(xr, q[i][0] - lower[i]) for i in range(n)]
    hi = [(xr, q[i][0] + upper[i]) for i in range(n)]
    w1 = (-dims.half_middle, -dims.half_middle)
    w2 = (xr + Fraction(dims.m ** 2 - 1, 2), -dims.half_middle)
    tris = [(apex, w2, lo[0])]
    tris += [(apex, hi[i], lo[i + 1]) for i in range(n - 1)]
    tris.append((apex, hi[-1], w1))
    channels = [(q[i][1], (apex, lo[i], hi[i])) for i in range(n)]
    return apex, w2, [t for _, t in q], channels, tris, fallback


def _vh_ring(dims: Dims) -> tuple[list, list, list]:
    """Bottom-frame L obstacle, narrow rectangles and channels of the
    bottom band (the other three quarters are rotations)."""
    m = dims.m
    e, hm, ho = dims.eps, dims.half_middle, dims.half_outer
    x1 = dims.coord(1)
    apex_x = -dims.core / 2 - dims.m6
    w2x = -dims.core / 2 + Fraction(m * m - 1, 2)
    ell = [(x1 - e, -ho), (x1 - e, -hm), (w2x, -hm), (apex_x, -hm), (-hm, -hm),
           (-hm, x1 - e), (-ho, x1 - e), (-ho, -ho)]
    rects = [box(dims.coord(a) + e, -ho, dims.coord(a + 1) - e, -hm) for a in range(1, m)]
    chans = []
    for a in range(1, m + 1):
        x = dims.coord(a)
        corners = ((x - e, -ho), (x + e, -ho), (x + e, -hm), (x - e, -hm))
        chans.append(Channel("rectangular", dims.m6, 2 * e, corners))
    return ell, rects, chans


def _shift(p: Point, c: Point) -> Point:
    return (p[0] + c[0], p[1] + c[1])


def _move_channel(ch: Channel, side: str, center: Point) -> Channel:
    corners = tuple(_shift(_rot(side, p), center) for p in ch.corners)
    return Channel(ch.shape, ch.a, ch.w, corners, ch.unit)


# ----------------------------------------------------------------------
# instances


@dataclass
class HardnessInstance:
    gt: GridTilingInstance
    dims: Dims
    predrawn: PolylineDrawing
    insertion_graph: Graph
    cells: dict
    obstacles: list
    gap_edges: list = field(default_factory=list)

    @property
    def m(self) -> int:
        return self.dims.m

    @property
    def k(self) -> int:
        return self.gt.k

    def xi(self, cell: Cell) -> str:
        return f"xi:{cell[0]},{cell[1]}"

    def fallback_used(self) -> bool:
        return any(g.fallback for rec in self.cells.values() for g in rec.filtering.values())

    def max_bit_length(self) -> int:
        return max(bit_length(c) for p in self.predrawn.positions.values() for c in p)

    def bit_length_bound(self) -> float:
        return BIT_LENGTH_C * log2(self.m * self.k + 1)

    def meta_dict(self) -> dict:
        return {"gt": self.gt.to_dict(), "dims": self.dims.as_dict(),
                "cells": [self.cells[c].as_dict() for c in sorted(self.cells)],
                "obstacles": [o.as_dict() for o in self.obstacles],
                "gap_edges": [list(e) for e in self.gap_edges],
                "expected_crossings_when_thickened": 2 * self.k * (self.k - 1),
                "fallback_used": self.fallback_used(),
                "max_bit_length": self.max_bit_length()}

    def to_ppg(self) -> PartiallyPredrawnGraph:
        """Obstacles plus ``H`` as one partially predrawn graph."""
        return PartiallyPredrawnGraph(self.predrawn.host, self.predrawn)

    @classmethod
    def from_parts(cls, inst: PartiallyPredrawnGraph, meta: dict) -> "HardnessInstance":
        """Inverse of :meth:`to_ppg` together with :meth:`meta_dict`."""
        gt = GridTilingInstance.from_dict(meta["gt"])
        g = inst.graph
        d = inst.predrawing
        predrawn = PolylineDrawing(g, dict(d.positions), dict(d.polylines))
        drawn = set(predrawn.polylines)
        loose = [e for e in g.edges() if e not in drawn]
        ends = {v for e in loose for v in e}
        h = Graph([v for v in g.vertices if v in ends or v not in predrawn.positions], loose)
        cells = {}
        for data in meta["cells"]:
            rec = CellRecord.from_dict(data)
            cells[rec.cell] = rec
        return cls(gt, Dims(meta["dims"]["m"]), predrawn, h, cells,
                   [Obstacle.from_dict(o) for o in meta["obstacles"]],
                   [tuple(e) for e in meta["gap_edges"]])


class _Namer:
    """One graph vertex per distinct point."""

    def __init__(self):
        self.names: dict[Point, str] = {}
        self.order: list[str] = []

    def name(self, p: Point, preferred: Optional[str] = None) -> str:
        if p in self.names:
            return self.names[p]
        nm = preferred or f"o{len(self.names)}"
        self.names[p] = nm
        self.order.append(nm)
        return nm


def build_instance(gt: GridTilingInstance, *, check: bool = True,
                   widen: Optional[Mapping[tuple, Fraction]] = None) -> HardnessInstance:
    """Obstacle drawing and insertion graph for ``gt``.

    With ``check`` the obstacles are tested for crossing boundaries and a
    :class:`DegenerateConstruction` carries the first witness point.
    ``widen`` maps ``(cell, side, tile)`` to a forced channel width on the
    line ``r``; it exists to inject faults.
    """
    for cell in gt.cells():
        if not gt.tiles_of(cell):
            raise ValueError(f"cell {cell} has no tile")
    dims = Dims(gt.m)
    m = gt.m
    namer = _Namer()
    edges: set[Edge] = set()
    obstacles: list[Obstacle] = []
    cells: dict[Cell, CellRecord] = {}
    ell, rects, vh = _vh_ring(dims)

    def add_polygon(pts: Sequence[Point], cell: Cell, kind: str, anchor: Point, fan: Optional[str] = None):
        pts = _ccw(pts)
        names = [namer.name(p) for p in pts]
        for a, b in zip(names, names[1:] + names[:1]):
            edges.add(edge_key(a, b))
        obstacles.append(Obstacle(pts, cell, kind, anchor, fan))

    for cell in gt.cells():
        i, j = cell
        center = ((j - 1) * dims.pitch, -(i - 1) * dims.pitch)
        core_points = {(a, b): _shift((dims.coord(a), dims.coord(b)), center)
                       for a in range(1, m + 1) for b in range(1, m + 1)}
        filtering = {}
        for side in SIDES:
            frame_tiles = {}
            pts = []
            for t in sorted(gt.tiles_of(cell)):
                local = _unrot(side, (dims.coord(t[0]), dims.coord(t[1])))
                frame_tiles[t] = (dims.index(local[0]), dims.index(local[1]))
                pts.append((t, local))
            forced = {t: Fraction(wd) for (c, sd, t), wd in (widen or {}).items() if c == cell and sd == side}
            apex, w2, order, chans, tris, fallback = _filtering_gadget(dims, pts, forced)
            g_apex = _shift(_rot(side, apex), center)
            vname = namer.name(g_apex, f"v{side}:{i},{j}")
            fan = f"{i},{j}:{side}"
            for tri in tris:
                pts_g = [_shift(_rot(side, p), center) for p in tri]
                add_polygon(pts_g, cell, "fan", _centroid(pts_g), fan)
            channels = {}
            for t, (ap, lo, hi) in chans:
                channels[t] = _triangular_channel(*(_shift(_rot(side, p), center) for p in (ap, lo, hi)))
            outward = sub(g_apex, center)
            filtering[side] = FilteringGadget(side, vname, g_apex, outward, order, frame_tiles, channels, fallback)
        vh_channels = {}
        for side in SIDES:
            ell_g = [_shift(_rot(side, p), center) for p in ell]
            corner = _shift(_rot(side, (-dims.half_outer + dims.m6 / 2, -dims.half_outer + dims.m6 / 2)), center)
            add_polygon(ell_g, cell, "L", corner)
            for r in rects:
                pts_g = [_shift(_rot(side, p), center) for p in r]
                add_polygon(pts_g, cell, "rect", _centroid(pts_g))
            moved = [_move_channel(ch, side, center) for ch in vh]
            axis = 0 if side in "bt" else 1
            moved.sort(key=lambda ch: _centroid(ch.corners)[axis])
            vh_channels[side] = moved
        cells[cell] = CellRecord(cell, center, core_points, filtering, vh_channels)

    # the insertion graph
    h = Graph()
    for cell in gt.cells():
        h.add_vertex(f"xi:{cell[0]},{cell[1]}")
    for cell in gt.cells():
        xi = f"xi:{cell[0]},{cell[1]}"
        for side in SIDES:
            v = cells[cell].filtering[side].vertex
            h.add_vertex(v)
            h.add_edge(xi, v)
        i, j = cell
        if j < gt.k:
            h.add_edge(xi, f"xi:{i},{j + 1}")
        if i < gt.k:
            h.add_edge(xi, f"xi:{i + 1},{j}")

    positions = {nm: p for p, nm in namer.names.items()}
    host = Graph(namer.order + [v for v in h.vertices if v not in positions], sorted(edges | set(h.edges())))
    drawing = PolylineDrawing(host, positions, {e: [positions[e[0]], positions[e[1]]] for e in sorted(edges)})
    inst = HardnessInstance(gt, dims, drawing, h, cells, obstacles)
    if check:
        bad = obstacle_overlaps(inst.obstacles, crossings_only=True)
        if bad:
            raise DegenerateConstruction(bad[0][2], bad[0][3])
    return inst


# ----------------------------------------------------------------------
# obstacle overlap


def _turn_key(base: Point):
    """Sort key for directions counterclockwise starting just after ``base``."""
    bx, by = base

    def rotate(u: Point) -> Point:
        # multiply by the conjugate of base: base itself maps to angle 0
        return (u[0] * bx + u[1] * by, u[1] * bx - u[0] * by)

    return rotate


def _fan_problems(tris: list[Obstacle]) -> list[tuple]:
    """Triangles sharing one apex must occupy disjoint angular intervals."""
    apex = tris[0].points[0]
    out = []
    base = None
    intervals = []
    for ob in tris:
        pts = ob.points
        if apex not in pts:
            out.append((ob, ob, "fan triangle misses the common apex", pts[0]))
            continue
        idx = pts.index(apex)
        p, q = pts[(idx + 1) % 3], pts[(idx + 2) % 3]
        u, w = sub(p, apex), sub(q, apex)
        if cross(u, w) <= 0:
            out.append((ob, ob, "fan triangle is flat or clockwise", p))
            continue
        intervals.append((u, w, ob))
    if not intervals:
        return out
    # a direction outside every interval: opposite of the sum of unit-free bisectors
    sx = sum(u[0] + w[0] for u, w, _ in intervals)
    sy = sum(u[1] + w[1] for u, w, _ in intervals)
    base = (-sx, -sy)
    rotate = _turn_key(base)
    key = cmp_to_key(lambda a, b: compare_directions(rotate(a), rotate(b)))
    intervals.sort(key=lambda t: key(t[0]))
    for (u0, w0, a), (u1, w1, b) in zip(intervals, intervals[1:]):
        if compare_directions(rotate(w0), rotate(u1)) > 0:
            out.append((a, b, "fan triangles overlap", _shift(apex, u1)))
    return out


def _edges_of(pts: Sequence[Point]):
    return [(pts[i], pts[(i + 1) % len(pts)]) for i in range(len(pts))]


def _proper_crossing(a: Point, b: Point, c: Point, d: Point) -> Optional[Point]:
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        r, s = sub(b, a), sub(d, c)
        t = cross(sub(c, a), s) / cross(r, s)
        return (a[0] + t * r[0], a[1] + t * r[1])
    return None


def _pip(p: Point, poly: Sequence[Point]) -> int:
    return point_in_polygon(p, poly)


def _pair_overlap(a: Sequence[Point], b: Sequence[Point], crossings_only: bool) -> Optional[tuple[str, Point]]:
    ba, bb = bbox(a), bbox(b)
    for p, q in _edges_of(a):
        eb = bbox((p, q))
        if not _boxes_meet(eb, bb):
            continue
        for r, s in _edges_of(b):
            x = _proper_crossing(p, q, r, s)
            if x is not None:
                return "obstacle boundaries cross", x
    if crossings_only:
        return None
    if set(a) == set(b):
        return "identical obstacles", a[0]
    for poly, other, obox in ((a, b, bb), (b, a, ba)):
        probes = list(poly) + [((p[0] + q[0]) / 2, (p[1] + q[1]) / 2) for p, q in _edges_of(poly)]
        for x in probes:
            if obox[0] <= x[0] <= obox[2] and obox[1] <= x[1] <= obox[3] and _pip(x, other) == 1:
                return "obstacle inside another obstacle", x
    return None


def obstacle_overlaps(obstacles: Sequence[Obstacle], *, crossings_only: bool = False) -> list[tuple]:
    """Pairs of obstacles whose interiors meet, as ``(a, b, reason, witness)``.

    Triangles of one filtering fan are compared by angular intervals around
    their common apex; all other pairs with touching bounding boxes get the
    exact edge-crossing and containment test.
    """
    out: list[tuple] = []
    fans: dict[str, list[Obstacle]] = {}
    for ob in obstacles:
        if ob.fan is not None:
            fans.setdefault(ob.fan, []).append(ob)
    for key in sorted(fans):
        out.extend(_fan_problems(fans[key]))
    boxes = [(bbox(ob.points), n) for n, ob in enumerate(obstacles)]
    boxes.sort(key=lambda t: (t[0][0], t[1]))
    active: list[tuple] = []
    for bx, n in boxes:
        active = [(ab, an) for ab, an in active if ab[2] >= bx[0]]
        for ab, an in active:
            if not (ab[1] <= bx[3] and bx[1] <= ab[3]):
                continue
            a, b = obstacles[an], obstacles[n]
            if a.fan is not None and a.fan == b.fan:
                continue
            hit = _pair_overlap(a.points, b.points, crossings_only)
            if hit is not None:
                out.append((a, b, hit[0], hit[1]))
        active.append((bx, n))
    return out


# ----------------------------------------------------------------------
# straight segments against the drawing


class SegmentIndex:
    """Predrawn edges bucketed by the cells their endpoints lie in."""

    def __init__(self, inst: HardnessInstance):
        self.dims = inst.dims
        self.k = inst.k
        self.buckets: dict[Cell, list] = {}
        pos = inst.predrawn.positions
        gaps = set(inst.gap_edges)
        for u, v in sorted(inst.predrawn.polylines):
            if (u, v) in gaps:
                continue
            p, q = pos[u], pos[v]
            entry = (bbox((p, q)), p, q)
            for cell in self.cells_at(p) | self.cells_at(q):
                self.buckets.setdefault(cell, []).append(entry)

    def cells_at(self, p: Point) -> set[Cell]:
        """Cells whose closed outer square contains ``p``."""
        pitch, half = self.dims.pitch, self.dims.half_outer
        out = set()
        jx = (p[0] + half) / pitch
        iy = (-p[1] + half) / pitch
        for j in {int(jx) + 1, int(jx) + (0 if jx == int(jx) else 1), int(jx)}:
            for i in {int(iy) + 1, int(iy) + (0 if iy == int(iy) else 1), int(iy)}:
                if 1 <= i <= self.k and 1 <= j <= self.k:
                    cx, cy = (j - 1) * pitch, -(i - 1) * pitch
                    if abs(p[0] - cx) <= half and abs(p[1] - cy) <= half:
                        out.add((i, j))
        return out

    def blocked(self, s0: Point, s1: Point, cells: Iterable[Cell]) -> Optional[Point]:
        """First point where segment ``s0 s1`` meets the drawing other than
        at a shared endpoint, or ``None``."""
        sb = bbox((s0, s1))
        seen = set()
        for cell in sorted(cells):
            for entry in self.buckets.get(cell, ()):
                eb, p, q = entry
                if id(entry) in seen or not _boxes_meet(sb, eb):
                    continue
                seen.add(id(entry))
                res = segment_intersection(s0, s1, p, q)
                if res is None:
                    continue
                if isinstance(res[0], Fraction):
                    if (res == s0 or res == s1) and (res == p or res == q):
                        continue
                    return res
                return res[0]
        return None


# ----------------------------------------------------------------------
# verification


CHECKS = (
    ("a", "filtering channels narrower than 1/m^3 and at least m^6 long"),
    ("b", "filtering funnel inside the core lies in a strip of width 3/m"),
    ("c", "filtering funnel meets exactly one core grid row or column"),
    ("d", "filtering funnel meets exactly one core region"),
    ("e", "VH funnels centred, paired and crossing inside their core region"),
    ("f", "obstacles do not overlap"),
    ("g", "corridors from the core to every channel are free of obstacles"),
    ("membership", "valid core grid points lie inside their filtering funnels"),
    ("ray_order", "rays around a filtering vertex are ordered by column, then row"),
)


@dataclass
class CheckResult:
    name: str
    title: str
    tested: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, where: str, witness=None) -> None:
        if len(self.failures) < 20:
            self.failures.append(where if witness is None else f"{where} at {_witness(witness)}")
        else:
            self.failures.append(None)

    def as_dict(self) -> dict:
        shown = [f for f in self.failures if f is not None]
        return {"check": self.name, "title": self.title, "passed": self.passed, "tested": self.tested,
                "failures": len(self.failures), "witnesses": shown}


def _witness(w) -> str:
    if isinstance(w, tuple) and len(w) == 2 and all(isinstance(c, Fraction) for c in w):
        return f"({format_rational(w[0])}, {format_rational(w[1])})"
    return str(w)


@dataclass
class VerificationReport:
    m: int
    k: int
    checks: dict
    fallback_used: bool
    max_bit_length: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def first_failure(self) -> Optional[str]:
        for name, _ in CHECKS:
            if not self.checks[name].passed:
                return name
        return None

    def as_dict(self) -> dict:
        return {"m": self.m, "k": self.k, "passed": self.passed, "first_failure": self.first_failure(),
                "fallback_used": self.fallback_used, "max_bit_length": self.max_bit_length,
                "checks": [self.checks[n].as_dict() for n, _ in CHECKS]}


def _core_square(rec: CellRecord, dims: Dims) -> list[Point]:
    cx, cy = rec.center
    h = dims.core / 2
    return box(cx - h, cy - h, cx + h, cy + h)


def _strip_width_sq_ok(poly: Sequence[Point], d: Point, limit: Fraction) -> bool:
    """Width of ``poly`` across direction ``d`` is below ``limit``."""
    n = (-d[1], d[0])
    vals = [dot(p, n) for p in poly]
    spread = max(vals) - min(vals)
    return spread * spread < limit * limit * dot(d, d)


def _meets(poly: Sequence[Point], region: Sequence[Point]) -> bool:
    if not _boxes_meet(bbox(poly), bbox(region)):
        return False
    out = list(region)
    for a, b in _edges_of(poly):
        out = clip_halfplane(out, a, b)
        if not out:
            return False
    return True


def _verify_cell(inst: HardnessInstance, cell: Cell, checks: dict) -> None:
    dims, m = inst.dims, inst.m
    rec = inst.cells[cell]
    core = _core_square(rec, dims)
    lo = core[0]
    span = Fraction(m * m)
    width_limit = Fraction(1, m ** 3)
    strip = Fraction(3, m)
    regions = {t: rec.region(t) for t in rec.core_points}

    for side, gad in sorted(rec.filtering.items()):
        axis = 0 if side in "bt" else 1
        where_base = f"cell {cell[0]},{cell[1]} side {side}"
        for t, ch in sorted(gad.channels.items()):
            where = f"{where_base} tile {t}"
            # (a)
            checks["a"].tested += 1
            if not (ch.w * ch.w * ch.unit < width_limit * width_limit and ch.a * ch.a * ch.unit >= dims.m6 ** 2):
                checks["a"].fail(where, f"w^2={format_rational(ch.w * ch.w * ch.unit)}, "
                                        f"a^2={format_rational(ch.a * ch.a * ch.unit)}")
            pieces = ch.funnel_clip(core)
            inside = [p for piece in pieces for p in piece]
            # (b)
            checks["b"].tested += 1
            d = sub(ch.corners[1], ch.corners[0])
            if inside and not _strip_width_sq_ok(inside, d, strip):
                checks["b"].fail(where, inside[0])
            # (c)
            checks["c"].tested += 1
            met = []
            if inside:
                x0 = min(p[axis] for p in inside)
                x1 = max(p[axis] for p in inside)
                for idx in range(1, m + 1):
                    a0 = lo[axis] + (idx - 1) * span
                    if x0 <= a0 + span and a0 <= x1:
                        met.append(idx)
            want = t[axis]
            if met != [want]:
                checks["c"].fail(f"{where} meets lines {met}, expected {want}")
            # (d)
            checks["d"].tested += 1
            hit = sorted(r for r, reg in regions.items() if any(_meets(piece, reg) for piece in pieces))
            if hit != [t]:
                checks["d"].fail(f"{where} meets core regions {hit}")
            # membership
            checks["membership"].tested += 1
            if not ch.in_funnel(rec.core_points[t], strict=True):
                checks["membership"].fail(where, rec.core_points[t])
        # ray order
        checks["ray_order"].tested += 1
        rotate = _turn_key(gad.outward)
        key = cmp_to_key(lambda a, b: compare_directions(rotate(sub(rec.core_points[a], gad.apex)),
                                                         rotate(sub(rec.core_points[b], gad.apex))))
        ccw = sorted(gad.channels, key=key)
        lex = sorted(gad.channels, key=lambda t: (-gad.frame_tiles[t][0], gad.frame_tiles[t][1]))
        if ccw != lex:
            checks["ray_order"].fail(f"{where_base} rays {ccw[:4]}... not in column/row order")

    # (e) VH channels
    cx, cy = rec.center
    hm = dims.half_middle
    middle = box(cx - hm, cy - hm, cx + hm, cy + hm)
    opposite = {"b": "t", "t": "b", "l": "r", "r": "l"}
    for side, chans in sorted(rec.vh_channels.items()):
        axis = 0 if side in "bt" else 1
        for idx, ch in enumerate(chans, start=1):
            where = f"cell {cell[0]},{cell[1]} VH {side}{idx}"
            checks["e"].tested += 1
            centre = _centroid(ch.corners)[axis]
            pieces = ch.funnel_clip(core)
            pts = [p for piece in pieces for p in piece]
            if not pts or not all(centre - strip / 2 <= p[axis] <= centre + strip / 2 for p in pts):
                checks["e"].fail(f"{where} funnel leaves its strip", pts[0] if pts else None)
            hit = sorted({r[axis] for r, reg in regions.items() if any(_meets(pc, reg) for pc in pieces)})
            if hit != [idx]:
                checks["e"].fail(f"{where} meets core lines {hit}")
            across = [n for n, other in enumerate(rec.vh_channels[opposite[side]], start=1)
                      if ch.funnel_clip(list(other.corners))]
            if across != [idx]:
                checks["e"].fail(f"{where} meets opposite channels {across}")
    for vs in ("b", "t"):
        for hs in ("l", "r"):
            for a, vch in enumerate(rec.vh_channels[vs], start=1):
                vpieces = vch.funnel_pieces()
                for b, hch in enumerate(rec.vh_channels[hs], start=1):
                    checks["e"].tested += 1
                    region = regions[(a, b)]
                    for vw in vpieces:
                        base = vw.clip(middle)
                        if not base:
                            continue
                        for hw in hch.funnel_pieces():
                            both = hw.clip(base)
                            if both and not all(region[0][0] <= p[0] <= region[2][0]
                                                and region[0][1] <= p[1] <= region[2][1] for p in both):
                                checks["e"].fail(f"cell {cell[0]},{cell[1]} funnels {vs}{a} x {hs}{b} "
                                                 f"cross outside core region {(a, b)}", both[0])


def _verify_corridors(inst: HardnessInstance, cell: Cell, index: "SegmentIndex", result: CheckResult) -> None:
    rec = inst.cells[cell]
    dims = inst.dims
    cx, cy = rec.center
    hm = dims.half_middle
    middle = box(cx - hm, cy - hm, cx + hm, cy + hm)
    for side, gad in sorted(rec.filtering.items()):
        for t in sorted(gad.channels):
            result.tested += 1
            hit = index.blocked(rec.core_points[t], gad.apex, {cell})
            if hit is not None:
                result.fail(f"cell {cell[0]},{cell[1]} filtering edge {side} from tile {t} is blocked", hit)
    own = [ob for ob in inst.obstacles if ob.cell == cell]
    for side, chans in sorted(rec.vh_channels.items()):
        for idx, ch in enumerate(chans, start=1):
            result.tested += 1
            for w in ch.funnel_pieces():
                piece = w.clip(middle)
                if not piece:
                    continue
                pb = bbox(piece)
                for ob in own:
                    if not _boxes_meet(pb, bbox(ob.points)):
                        continue
                    hit = _pair_overlap(piece, ob.points, False)
                    if hit is not None:
                        result.fail(f"cell {cell[0]},{cell[1]} VH {side}{idx} corridor meets a {ob.kind}", hit[1])
                        break


def verify_instance(inst: HardnessInstance) -> VerificationReport:
    """Exact check of every geometric property the reduction relies on."""
    checks = {name: CheckResult(name, title) for name, title in CHECKS}
    for cell in sorted(inst.cells):
        _verify_cell(inst, cell, checks)
    index = SegmentIndex(inst)
    for cell in sorted(inst.cells):
        _verify_corridors(inst, cell, index, checks["g"])
    checks["f"].tested = len(inst.obstacles)
    for a, b, reason, witness in obstacle_overlaps(inst.obstacles):
        checks["f"].fail(f"{reason}: {a.kind} in cell {a.cell} and {b.kind} in cell {b.cell}", witness)
    for ob in inst.obstacles:
        outer = ob.points
        for depth, chain in enumerate(ob.chains, start=1):
            checks["f"].tested += 1
            if not all(_pip(p, outer) == 1 for p in chain):
                checks["f"].fail(f"nested chain {depth} of a {ob.kind} in cell {ob.cell} leaves it", chain[0])
            outer = chain
    return VerificationReport(inst.m, inst.k, checks, inst.fallback_used(), inst.max_bit_length())


def widen_channel(gt: GridTilingInstance, cell: Cell, side: str, tile: Tile,
                  width: Optional[Fraction] = None) -> HardnessInstance:
    """The instance for ``gt`` with one filtering channel widened (default
    to ``1/m`` on the line ``r``); obstacles are not checked."""
    width = Fraction(1, gt.m) if width is None else Fraction(width)
    return build_instance(gt, check=False, widen={(cell, side, tile): width})


# ----------------------------------------------------------------------
# solving


def solve_hardness(inst: HardnessInstance, *, steps: Optional[int] = None) -> Optional[dict[str, Point]]:
    """Place every ``xi`` on a valid core grid point of its cell so that all
    straight edges of ``H`` avoid the obstacles and each other.

    Candidates whose four filtering edges are blocked are dropped first;
    cells are then assigned in row-major order and each new ``xi``-``xi``
    edge is checked as soon as both ends are placed.
    """
    counter = Counter(budget(2_000_000, steps), "straight-line extension search")
    index = SegmentIndex(inst)
    cells = sorted(inst.cells)
    candidates: dict[Cell, list[tuple[Tile, list]]] = {}
    for cell in cells:
        rec = inst.cells[cell]
        options = []
        valid = set.intersection(*(set(g.channels) for g in rec.filtering.values()))
        for t in sorted(valid):
            counter.tick()
            p = rec.core_points[t]
            segs = [(p, g.apex) for _, g in sorted(rec.filtering.items())]
            if all(index.blocked(a, b, {cell}) is None for a, b in segs):
                options.append((t, segs))
        if not options:
            return None
        candidates[cell] = options

    placed: dict[Cell, Point] = {}
    segments: list[tuple] = []
    link_ok: dict[tuple, bool] = {}

    def clear(a: Point, b: Point, cs: set) -> bool:
        key = (a, b)
        if key not in link_ok:
            link_ok[key] = index.blocked(a, b, cs) is None
        return link_ok[key]

    def free_of_inserted(new: list[tuple]) -> bool:
        for a, b in new:
            nb = bbox((a, b))
            for c, d, cb in segments:
                if not _boxes_meet(nb, cb):
                    continue
                res = segment_intersection(a, b, c, d)
                if res is None:
                    continue
                if isinstance(res[0], Fraction) and res in (a, b) and res in (c, d):
                    continue
                return False
        return True

    def rec_place(n: int) -> bool:
        if n == len(cells):
            return True
        cell = cells[n]
        i, j = cell
        for t, segs in candidates[cell]:
            counter.tick()
            p = inst.cells[cell].core_points[t]
            new = list(segs)
            ok = True
            for other in ((i, j - 1), (i - 1, j)):
                if other in placed:
                    q = placed[other]
                    if not clear(q, p, {cell, other}):
                        ok = False
                        break
                    new.append((q, p))
            if not ok or not free_of_inserted(new):
                continue
            placed[cell] = p
            size = len(segments)
            segments.extend((a, b, bbox((a, b))) for a, b in new)
            if rec_place(n + 1):
                return True
            del segments[size:]
            del placed[cell]
        return False

    if not rec_place(0):
        return None
    return {inst.xi(c): placed[c] for c in cells}


def placement_tiles(inst: HardnessInstance, placement: Mapping[str, Point]) -> dict[Cell, Tile]:
    """The tile under each placed ``xi``."""
    out = {}
    for cell, rec in inst.cells.items():
        p = placement[inst.xi(cell)]
        out[cell] = next(t for t, q in rec.core_points.items() if q == p)
    return out


def check_placement(inst: HardnessInstance, placement: Mapping[str, Point]) -> list[str]:
    """Independent re-check of a placement with the plain drawing validator.

    Gap edges of a thickened instance are left out; their crossings are
    counted by :func:`insertion_crossings`.
    """
    from .drawing import validate_drawing

    d = inst.predrawn
    pos = dict(d.positions)
    pos.update(placement)
    gaps = set(inst.gap_edges)
    lines = {e: pl for e, pl in d.polylines.items() if e not in gaps}
    for u, v in inst.insertion_graph.edges():
        lines[edge_key(u, v)] = [pos[edge_key(u, v)[0]], pos[edge_key(u, v)[1]]]
    full = PolylineDrawing(d.host, pos, lines)
    return [str(v) for v in validate_drawing(full)]


def insertion_crossings(inst: HardnessInstance, placement: Mapping[str, Point]) -> int:
    """Crossings between the placed edges of ``H`` and the connecting gap
    edges added by :func:`thicken` (zero on an unthickened instance)."""
    pos = dict(inst.predrawn.positions)
    pos.update(placement)
    count = 0
    for u, v in inst.insertion_graph.edges():
        for a, b in inst.gap_edges:
            res = segment_intersection(pos[u], pos[v], pos[a], pos[b])
            if res is not None:
                count += 1
    return count


# ----------------------------------------------------------------------
# thickening


def thicken(inst: HardnessInstance, layers: int, *, step: Optional[Fraction] = None) -> HardnessInstance:
    """Replace every obstacle by ``layers + 1`` nested closed chains.

    Chain ``s`` is the obstacle scaled by ``1 - s * step`` about its anchor,
    a point from which the obstacle is star-shaped, so every chain stays
    strictly inside the previous one and no channel changes. Consecutive
    chains are joined by one radial edge, and each vertical/horizontal
    channel mouth on the outer square gets a gap edge, which makes the
    whole drawing connected. ``H`` edges between neighbouring cells cross
    exactly one gap edge each.
    """
    if layers < 1:
        raise ValueError("layers must be at least 1")
    step = Fraction(1, 2 * (layers + 1)) if step is None else Fraction(step)
    if step <= 0 or layers * step >= 1:
        raise OffsetTooLarge(f"{layers} chains at offset {step} collapse onto the anchor")
    d = inst.predrawn
    positions = dict(d.positions)
    names = {p: v for v, p in positions.items()}
    order = list(d.host.vertices)
    lines = dict(d.polylines)

    def vertex(p: Point) -> str:
        if p not in names:
            nm = f"c{len(names)}"
            names[p] = nm
            positions[nm] = p
            order.append(nm)
        return names[p]

    def link(p: Point, q: Point) -> Edge:
        e = edge_key(vertex(p), vertex(q))
        lines[e] = [positions[e[0]], positions[e[1]]]
        return e

    obstacles = []
    for ob in inst.obstacles:
        ax, ay = ob.anchor
        chains = []
        prev = ob.points
        for s in range(1, layers + 1):
            f = 1 - s * step
            chain = tuple((ax + (x - ax) * f, ay + (y - ay) * f) for x, y in ob.points)
            for a, b in _edges_of(chain):
                link(a, b)
            link(prev[0], chain[0])
            chains.append(chain)
            prev = chain
        obstacles.append(Obstacle(ob.points, ob.cell, ob.kind, ob.anchor, ob.fan, chains))

    gaps = set(inst.gap_edges)
    for cell in sorted(inst.cells):
        for side, chans in sorted(inst.cells[cell].vh_channels.items()):
            for ch in chans:
                gaps.add(link(ch.corners[0], ch.corners[1]))

    host = Graph(order, sorted(set(lines) | set(inst.insertion_graph.edges())))
    drawing = PolylineDrawing(host, positions, lines)
    return HardnessInstance(inst.gt, inst.dims, drawing, inst.insertion_graph.copy(), inst.cells,
                            obstacles, sorted(gaps))


# ----------------------------------------------------------------------
# rendering


def render_svg(inst: HardnessInstance, placement: Optional[Mapping[str, Point]] = None, *,
               scale: Optional[float] = None) -> str:
    """Standalone SVG 1.1 picture (y axis flipped, presentation only)."""
    pos = inst.predrawn.positions
    x0, y0, x1, y1 = bbox(pos.values())
    if scale is None:
        scale = 1000.0 / float(max(x1 - x0, y1 - y0))
    pad = 10.0

    def xy(p: Point) -> str:
        return f"{(float(p[0] - x0) * scale + pad):.3f},{(float(y1 - p[1]) * scale + pad):.3f}"

    width = float(x1 - x0) * scale + 2 * pad
    height = float(y1 - y0) * scale + 2 * pad
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.3f}" height="{height:.3f}">',
           f'<rect width="{width:.3f}" height="{height:.3f}" fill="white"/>']
    fills = {"fan": "#9ecae1", "L": "#bdbdbd", "rect": "#d9d9d9"}
    for ob in inst.obstacles:
        for depth, chain in enumerate([ob.points] + list(ob.chains)):
            fill = fills.get(ob.kind, "#cccccc") if depth == 0 else "none"
            out.append(f'<polygon points="{" ".join(xy(p) for p in chain)}" fill="{fill}" '
                       f'stroke="black" stroke-width="0.3"/>')
    for a, b in inst.gap_edges:
        out.append(f'<polyline points="{xy(pos[a])} {xy(pos[b])}" stroke="#888888" stroke-width="0.3" fill="none"/>')
    if placement is not None:
        full = dict(pos)
        full.update(placement)
        for u, v in inst.insertion_graph.edges():
            out.append(f'<polyline points="{xy(full[u])} {xy(full[v])}" stroke="#d62728" '
                       f'stroke-width="0.6" fill="none"/>')
        for cell in sorted(inst.cells):
            p = placement[inst.xi(cell)]
            out.append(f'<circle cx="{xy(p).split(",")[0]}" cy="{xy(p).split(",")[1]}" r="2" fill="#d62728"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
