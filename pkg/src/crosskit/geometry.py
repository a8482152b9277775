"""Exact rational plane geometry.

Points are pairs of :class:`fractions.Fraction`. Nothing in this module
touches floating point, so every predicate is exact.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Sequence, Union

Point = tuple[Fraction, Fraction]
RationalLike = Union[int, str, Fraction]


def rational(value: RationalLike) -> Fraction:
    """Parse an int, Fraction or a ``"p/q"`` / ``"p"`` string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot read {type(value).__name__} as a rational")


def format_rational(q: Fraction) -> str:
    """Serialize as ``"p/q"`` with ``q > 0``, or ``"p"`` for integers."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def point(x: RationalLike, y: RationalLike) -> Point:
    return (rational(x), rational(y))


def format_point(p: Point) -> list[str]:
    return [format_rational(p[0]), format_rational(p[1])]


def sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def cross(u: Point, v: Point) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Point, v: Point) -> Fraction:
    return u[0] * v[0] + u[1] * v[1]


def orient(a: Point, b: Point, c: Point) -> int:
    """Sign of the turn a -> b -> c: 1 left, -1 right, 0 collinear."""
    ax, ay = a
    bx, by = b
    cx, cy = c
    if ax.denominator == ay.denominator == bx.denominator == by.denominator == cx.denominator == cy.denominator == 1:
        # integer fast path; Fraction arithmetic normalizes on every step
        ax, ay, bx, by, cx, cy = ax.numerator, ay.numerator, bx.numerator, by.numerator, cx.numerator, cy.numerator
    value = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (value > 0) - (value < 0)


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """True if p lies on the closed segment ab."""
    if orient(a, b, p) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segment_intersection(a: Point, b: Point, c: Point, d: Point):
    """Intersect closed segments ab and cd.

    Returns ``None`` for disjoint segments, a point for a single common
    point, or a pair of points (the ends of the shared piece) when the
    segments overlap collinearly in more than one point.
    """
    if (max(a[0], b[0]) < min(c[0], d[0]) or max(c[0], d[0]) < min(a[0], b[0])
            or max(a[1], b[1]) < min(c[1], d[1]) or max(c[1], d[1]) < min(a[1], b[1])):
        return None
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 == o2 == 0:
        # collinear: project on the dominant axis
        axis = 0 if a[0] != b[0] else 1
        lo1, hi1 = sorted((a, b), key=lambda p: p[axis])
        lo2, hi2 = sorted((c, d), key=lambda p: p[axis])
        lo = lo1 if lo1[axis] >= lo2[axis] else lo2
        hi = hi1 if hi1[axis] <= hi2[axis] else hi2
        if lo[axis] > hi[axis]:
            return None
        if lo == hi:
            return lo
        return (lo, hi)
    if o1 * o2 > 0 or o3 * o4 > 0:
        return None
    # unique intersection of the supporting lines
    r = sub(b, a)
    s = sub(d, c)
    t = cross(sub(c, a), s) / cross(r, s)
    return (a[0] + t * r[0], a[1] + t * r[1])


def segment_parameter(p: Point, a: Point, b: Point) -> Fraction:
    """Position of p on segment ab as a fraction in [0, 1]."""
    if a[0] != b[0]:
        return (p[0] - a[0]) / (b[0] - a[0])
    return (p[1] - a[1]) / (b[1] - a[1])


def _half(v: Point) -> int:
    return 0 if v[1] > 0 or (v[1] == 0 and v[0] > 0) else 1


def compare_directions(u: Point, v: Point) -> int:
    """Counterclockwise order of nonzero vectors starting at angle 0."""
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return -1 if hu < hv else 1
    c = cross(u, v)
    if c > 0:
        return -1
    if c < 0:
        return 1
    return 0


def sort_ccw(items: Iterable, direction) -> list:
    """Sort items counterclockwise by ``direction(item)`` (a nonzero vector)."""
    return sorted(items, key=cmp_to_key(lambda x, y: compare_directions(direction(x), direction(y))))


def polygon_area2(points: Sequence[Point]) -> Fraction:
    """Twice the signed area of a closed polygon (counterclockwise positive)."""
    total = Fraction(0)
    n = len(points)
    for i in range(n):
        total += cross(points[i], points[(i + 1) % n])
    return total


def point_in_polygon(p: Point, poly: Sequence[Point]) -> int:
    """1 strictly inside, 0 on the boundary, -1 outside (crossing-number rule)."""
    n = len(poly)
    inside = False
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if on_segment(p, a, b):
            return 0
        if (a[1] > p[1]) != (b[1] > p[1]):
            x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1])
            if x > p[0]:
                inside = not inside
    return 1 if inside else -1


def bit_length(q: Fraction) -> int:
    """Bits needed for numerator and denominator together."""
    return abs(q.numerator).bit_length() + q.denominator.bit_length()
