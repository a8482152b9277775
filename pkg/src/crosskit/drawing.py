"""Polyline drawings, planarizations, rotation systems and faces.

A :class:`PolylineDrawing` places vertices at exact rational points and
draws each edge as a polyline. :func:`planarize_geometric` turns a simple
drawing into a :class:`CombinatorialDrawing`: the planarization with one
degree-4 vertex per crossing, its rotation system (counterclockwise
neighbor lists) and its faces.

Face convention: a dart is an ordered pair ``(u, v)``. The face to the
left of ``(u, v)`` continues with ``(v, w)`` where ``w`` precedes ``u`` in
the counterclockwise rotation at ``v``. Bounded faces of a geometric
drawing are therefore traced counterclockwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .geometry import (
    Point,
    compare_directions,
    cross,
    dot,
    format_point,
    on_segment,
    polygon_area2,
    point_in_polygon,
    segment_intersection,
    segment_parameter,
    sort_ccw,
    sub,
)
from .graph import Edge, Graph, edge_key

Dart = tuple[str, str]
REAL = "real"
CROSSING = "crossing"


class NonSimpleDrawing(ValueError):
    """The polyline drawing violates the simplicity conditions."""

    def __init__(self, violations):
        self.violations = list(violations)
        first = self.violations[0] if self.violations else None
        super().__init__(f"non-simple drawing: {first}")


class InconsistentRotation(ValueError):
    """A rotation system misses or duplicates an incidence."""


class LabelMismatch(ValueError):
    """Two drawings are not drawings of the same labeled graph."""


# ----------------------------------------------------------------------
# polyline drawings


@dataclass
class PolylineDrawing:
    """Vertices at rational points, edges as polylines.

    ``polylines`` is keyed by canonical edge; each polyline runs from the
    first endpoint of the key to the second.
    """

    host: Graph
    positions: dict[str, Point]
    polylines: dict[Edge, list[Point]] = field(default_factory=dict)

    def __post_init__(self):
        fixed = {}
        for (u, v), pts in self.polylines.items():
            key = edge_key(u, v)
            pts = list(pts)
            if key != (u, v):
                pts = pts[::-1]
            fixed[key] = pts
        self.polylines = fixed

    @classmethod
    def straight_line(cls, host: Graph, positions: Mapping[str, Point]) -> "PolylineDrawing":
        pos = dict(positions)
        return cls(host, pos, {e: [pos[e[0]], pos[e[1]]] for e in host.edges()})

    def drawn_vertices(self) -> list[str]:
        return [v for v in self.host.vertices if v in self.positions]

    def drawn_graph(self) -> Graph:
        """The subgraph consisting of placed vertices and drawn edges."""
        return Graph(self.drawn_vertices(), list(self.polylines))

    def restrict(self, vertices: Iterable[str], edges: Iterable[Edge]) -> "PolylineDrawing":
        vs = [v for v in self.host.vertices if v in set(vertices)]
        es = [edge_key(*e) for e in edges]
        g = Graph(vs, es)
        return PolylineDrawing(g, {v: self.positions[v] for v in vs}, {e: self.polylines[e] for e in es})

    def all_points(self) -> list[Point]:
        pts = list(self.positions.values())
        for line in self.polylines.values():
            pts.extend(line)
        return pts


@dataclass(frozen=True)
class Violation:
    kind: str
    items: tuple
    point: Optional[Point] = None

    def as_dict(self) -> dict:
        out = {"kind": self.kind, "items": [list(i) if isinstance(i, tuple) else i for i in self.items]}
        if self.point is not None:
            out["point"] = format_point(self.point)
        return out

    def __str__(self) -> str:
        where = f" at {format_point(self.point)}" if self.point is not None else ""
        return f"{self.kind}{list(self.items)}{where}"


def _segments(pts: Sequence[Point]):
    return [(pts[i], pts[i + 1]) for i in range(len(pts) - 1)]


def _local_directions(pts: Sequence[Point], p: Point) -> list[Point]:
    """Directions in which the polyline leaves point p (one or two)."""
    for i, q in enumerate(pts):
        if q == p:
            out = []
            if i > 0:
                out.append(sub(pts[i - 1], p))
            if i < len(pts) - 1:
                out.append(sub(pts[i + 1], p))
            return out
    for a, b in _segments(pts):
        if on_segment(p, a, b):
            return [sub(a, p), sub(b, p)]
    return []


def _angle_from(base: Point, v: Point) -> Point:
    # rotate v into the frame where base points along the positive x-axis
    return (dot(base, v), cross(base, v))


def curves_cross(dirs_a: Sequence[Point], dirs_b: Sequence[Point]) -> bool:
    """True iff two curves through a common point cross there (alternate)."""
    a1, a2 = dirs_a
    ref = _angle_from(a1, a2)
    inside = 0
    for d in dirs_b:
        r = _angle_from(a1, d)
        if compare_directions(r, ref) < 0 and compare_directions((Fraction(1), Fraction(0)), r) < 0:
            inside += 1
    return inside == 1


def _edge_violations(d: PolylineDrawing, e: Edge) -> list[Violation]:
    """Problems of a single edge: endpoints, degenerate pieces, self-touching."""
    out = []
    pts = d.polylines[e]
    if not d.host.has_edge(*e):
        return [Violation("UnknownEdge", (e,))]
    if len(pts) < 2 or e[0] not in d.positions or e[1] not in d.positions:
        return [Violation("EndpointMismatch", (e,))]
    if pts[0] != d.positions[e[0]] or pts[-1] != d.positions[e[1]]:
        out.append(Violation("EndpointMismatch", (e,)))
    for a, b in _segments(pts):
        if a == b:
            out.append(Violation("DegenerateSegment", (e,), a))
    if out:
        return out
    segs = _segments(pts)
    for i, j in combinations(range(len(segs)), 2):
        hit = segment_intersection(*segs[i], *segs[j])
        if hit is None:
            continue
        if j == i + 1 and hit == segs[i][1]:
            continue
        p = hit if not isinstance(hit[0], tuple) else hit[0]
        out.append(Violation("SelfIntersection", (e,), p))
    return out


def _vertex_violations(d: PolylineDrawing, e: Edge) -> list[Violation]:
    out = []
    segs = _segments(d.polylines[e])
    for v in d.drawn_vertices():
        if v in e:
            continue
        p = d.positions[v]
        if any(on_segment(p, a, b) for a, b in segs):
            out.append(Violation("VertexOnEdge", (v, e), p))
    return out


def _pair_violations(d: PolylineDrawing, e: Edge, f: Edge) -> tuple[list[Violation], list[Point]]:
    """Violations between two edges and their common non-vertex points."""
    out = []
    shared_vertex = set(e) & set(f)
    allowed = {d.positions[x] for x in shared_vertex}
    common: set[Point] = set()
    overlap = False
    for a, b in _segments(d.polylines[e]):
        for c, dd in _segments(d.polylines[f]):
            hit = segment_intersection(a, b, c, dd)
            if hit is None:
                continue
            if isinstance(hit[0], tuple):
                overlap = True
                common.add(hit[0])
            else:
                common.add(hit)
    if overlap:
        return [Violation("SharedSegment", (e, f), min(common))], []
    common -= allowed
    for p in sorted(common):
        if shared_vertex:
            out.append(Violation("AdjacentCrossing", (e, f), p))
            continue
        da = _local_directions(d.polylines[e], p)
        db = _local_directions(d.polylines[f], p)
        if len(da) < 2 or len(db) < 2:
            continue  # an endpoint on a foreign edge, reported as VertexOnEdge
        if not curves_cross(da, db):
            out.append(Violation("Tangency", (e, f), p))
    if len(common) > 1:
        out.append(Violation("MultipleCrossings", (e, f), min(common)))
    return out, sorted(common)


def validate_drawing(d: PolylineDrawing) -> list[Violation]:
    """List every violation of the simplicity conditions (empty if simple)."""
    out: list[Violation] = []
    seen: dict[Point, str] = {}
    for v in d.drawn_vertices():
        p = d.positions[v]
        if p in seen:
            out.append(Violation("DuplicateVertexPoint", (seen[p], v), p))
        else:
            seen[p] = v
    for e in d.polylines:
        out.extend(_edge_violations(d, e))
    if out:
        return out
    for e in d.polylines:
        out.extend(_vertex_violations(d, e))
    point_users: dict[Point, set[Edge]] = {}
    for e, f in combinations(list(d.polylines), 2):
        bad, common = _pair_violations(d, e, f)
        out.extend(bad)
        for p in common:
            point_users.setdefault(p, set()).update((e, f))
    vertex_points = set(d.positions.values())
    for p, users in sorted(point_users.items()):
        if len(users) >= 3 and p not in vertex_points:
            out.append(Violation("TriplePoint", tuple(sorted(users)), p))
    return out


def check_new_edge(d: PolylineDrawing, e: Edge, crossing_points: set[Point]) -> Optional[list[Point]]:
    """Incremental check: the drawing minus ``e`` is simple with the given
    crossing points. Returns the new crossing points of ``e`` or ``None``."""
    if _edge_violations(d, e) or _vertex_violations(d, e):
        return None
    new_points: list[Point] = []
    for f in d.polylines:
        if f == e:
            continue
        bad, common = _pair_violations(d, e, f)
        if bad:
            return None
        new_points.extend(common)
    if len(set(new_points)) != len(new_points) or any(p in crossing_points for p in new_points):
        return None
    return new_points


# ----------------------------------------------------------------------
# rotation systems and faces


def trace_faces(rotation: Mapping[str, Sequence[str]]) -> list[list[Dart]]:
    """Faces of a rotation system as lists of darts.

    Raises :class:`InconsistentRotation` when an incidence is listed twice
    or only on one side.
    """
    position: dict[str, dict[str, int]] = {}
    for v, nbrs in rotation.items():
        if len(set(nbrs)) != len(nbrs):
            raise InconsistentRotation(f"duplicate neighbor in rotation at {v!r}")
        if v in nbrs:
            raise InconsistentRotation(f"self-loop in rotation at {v!r}")
        position[v] = {w: i for i, w in enumerate(nbrs)}
    for v, nbrs in rotation.items():
        for w in nbrs:
            if w not in position or v not in position[w]:
                raise InconsistentRotation(f"incidence {v!r}-{w!r} missing at {w!r}")
    faces = []
    used: set[Dart] = set()
    for v in rotation:
        for w in rotation[v]:
            if (v, w) in used:
                continue
            face = []
            dart = (v, w)
            while dart not in used:
                used.add(dart)
                face.append(dart)
                a, b = dart
                nb = rotation[b]
                nxt = nb[(position[b][a] - 1) % len(nb)]
                dart = (b, nxt)
            faces.append(face)
    return faces


def rotation_components(rotation: Mapping[str, Sequence[str]]) -> list[list[str]]:
    g = Graph(list(rotation), [(v, w) for v in rotation for w in rotation[v] if v < w])
    return g.components()


def euler_characteristic_ok(rotation: Mapping[str, Sequence[str]]) -> bool:
    """Genus-zero test: V - E + F = 2 on every nontrivial component."""
    faces = trace_faces(rotation)
    comp_of = {}
    comps = rotation_components(rotation)
    for i, c in enumerate(comps):
        for v in c:
            comp_of[v] = i
    nv = [0] * len(comps)
    ne = [0] * len(comps)
    nf = [0] * len(comps)
    for v in rotation:
        nv[comp_of[v]] += 1
        ne[comp_of[v]] += len(rotation[v])
    for f in faces:
        nf[comp_of[f[0][0]]] += 1
    return all(ne[i] == 0 or nv[i] - ne[i] // 2 + nf[i] == 2 for i in range(len(comps)))


def is_left_of_path(rotation: Mapping[str, Sequence[str]], prev: str, v: str, nxt: str, w: str) -> bool:
    """At vertex v on a path prev -> v -> nxt, is the dart v->w on the left?"""
    nb = list(rotation[v])
    n = len(nb)
    i = nb.index(nxt)
    j = nb.index(prev)
    k = nb.index(w)
    # strictly counterclockwise after nxt and before prev
    return 0 < (k - i) % n < (j - i) % n


@dataclass
class CombinatorialDrawing:
    """A planarization with its rotation system.

    ``kinds`` maps every vertex to ``"real"`` or ``"crossing"``.
    ``edge_backmap`` maps an original edge to the vertex path replacing it.
    ``gamma_vertices``/``gamma_edges`` flag the planarization of the
    predrawn part. ``regions`` optionally records face vertex sets when the
    drawing is disconnected (nesting is not visible in the rotation).
    """

    graph: Graph
    kinds: dict[str, str]
    rotation: dict[str, tuple[str, ...]]
    outer_face: Optional[int] = None
    edge_backmap: dict[Edge, tuple[str, ...]] = field(default_factory=dict)
    gamma_vertices: frozenset = frozenset()
    gamma_edges: frozenset = frozenset()
    regions: Optional[list[frozenset]] = None
    positions: Optional[dict[str, Point]] = None
    edge_geometry: Optional[dict[Dart, list[Point]]] = None
    outer_region: Optional[frozenset] = None
    outer_darts: Optional[frozenset] = None
    faces: list[list[Dart]] = field(init=False)

    def __post_init__(self):
        self.rotation = {v: tuple(self.rotation.get(v, ())) for v in self.graph.vertices}
        for v in self.graph.vertices:
            if sorted(self.rotation[v]) != self.graph.neighbors(v):
                raise InconsistentRotation(f"rotation at {v!r} does not match its neighbors")
        self.faces = trace_faces(self.rotation)

    # ------------------------------------------------------------------
    @classmethod
    def from_rotation(cls, rotation: Mapping[str, Sequence[str]], kinds: Optional[Mapping[str, str]] = None,
                      **kw) -> "CombinatorialDrawing":
        verts = list(rotation)
        g = Graph(verts, [(v, w) for v in verts for w in rotation[v] if v < w])
        colors = kw.pop("colors", None)
        if colors:
            g.colors = dict(colors)
        kinds = dict(kinds or {})
        for v in verts:
            kinds.setdefault(v, REAL)
        return cls(g, kinds, {v: tuple(rotation[v]) for v in verts}, **kw)

    @property
    def crossing_vertices(self) -> list[str]:
        return [v for v in self.graph.vertices if self.kinds[v] == CROSSING]

    @property
    def crossing_count(self) -> int:
        return len(self.crossing_vertices)

    def real_graph(self) -> Graph:
        """The original graph, recovered from the back-map."""
        real = [v for v in self.graph.vertices if self.kinds[v] == REAL]
        return Graph(real, list(self.edge_backmap), {v: c for v, c in self.graph.colors.items() if v in real})

    def face_vertex_sets(self) -> list[frozenset]:
        if self.regions is not None:
            return sorted(self.regions, key=lambda s: sorted(s))
        sets = [frozenset(a for a, _ in f) for f in self.faces]
        isolated = [v for v in self.graph.vertices if not self.rotation[v]]
        comps = [c for c in rotation_components(self.rotation) if len(c) > 1]
        if len(comps) <= 1 and not isolated:
            return sorted(sets, key=lambda s: sorted(s))
        if not comps:
            return [frozenset(isolated)]
        # without nesting data all components share one face
        outer_ids = set()
        for c in comps:
            cs = set(c)
            idx = [i for i, f in enumerate(self.faces) if f[0][0] in cs]
            outer_ids.add(self._outer_of(idx))
        merged = frozenset(isolated).union(*[sets[i] for i in outer_ids])
        rest = [s for i, s in enumerate(sets) if i not in outer_ids]
        return sorted(rest + [merged], key=lambda s: sorted(s))

    def _outer_of(self, face_ids: list[int]) -> int:
        if self.outer_face in face_ids:
            return self.outer_face
        return max(face_ids, key=lambda i: (len(self.faces[i]), -i))

    def outer_face_vertices(self) -> Optional[frozenset]:
        """Vertex set of the unbounded face, or None on the sphere."""
        if self.outer_region is not None:
            return self.outer_region
        if self.outer_face is None:
            return None
        if self.regions is None:
            base = frozenset(a for a, _ in self.faces[self.outer_face])
            for s in self.face_vertex_sets():
                if base <= s:
                    return s
            return base
        return None

    def euler_ok(self) -> bool:
        return euler_characteristic_ok(self.rotation)

    def face_of_dart(self) -> dict[Dart, int]:
        return {d: i for i, f in enumerate(self.faces) for d in f}

    def original_edges_at(self, x: str) -> list[Edge]:
        """Original edges whose back-map path passes through x."""
        return [e for e, path in self.edge_backmap.items() if x in path]

    def check_invariants(self) -> list[str]:
        problems = []
        for x in self.crossing_vertices:
            nb = self.rotation[x]
            if len(nb) != 4:
                problems.append(f"crossing {x} has degree {len(nb)}")
                continue
            if self.edge_backmap:
                owner = {}
                for e, path in self.edge_backmap.items():
                    for i, y in enumerate(path):
                        if y == x:
                            owner[path[i - 1]] = e
                            owner[path[i + 1]] = e
                if len(owner) != 4 or owner[nb[0]] != owner[nb[2]] or owner[nb[1]] != owner[nb[3]] \
                        or owner[nb[0]] == owner[nb[1]]:
                    problems.append(f"rotation at crossing {x} does not alternate")
        if not self.euler_ok():
            problems.append("Euler relation fails")
        for e, path in self.edge_backmap.items():
            if len(set(path)) != len(path):
                problems.append(f"back-map path of {e} is not simple")
            if (path[0], path[-1]) != e:
                problems.append(f"back-map path of {e} has wrong ends")
            for y in path[1:-1]:
                if self.kinds.get(y) != CROSSING:
                    problems.append(f"back-map path of {e} has a non-crossing interior vertex {y}")
            for a, b in zip(path, path[1:]):
                if not self.graph.has_edge(a, b):
                    problems.append(f"back-map path of {e} uses a missing edge {a}-{b}")
        return problems

    def opposite(self, x: str, w: str) -> Optional[str]:
        """The neighbor facing w across a degree-4 vertex x, else None."""
        nb = self.rotation[x]
        if len(nb) != 4:
            return None
        return nb[(nb.index(w) + 2) % 4]

    def component_outer_faces(self) -> dict[int, Optional[int]]:
        """Map each face orbit to the unbounded orbit of its component.

        The component holding ``outer_face`` uses it; other components use
        the orbit of a dart listed in ``outer_darts``, then their
        smallest-area orbit when geometry is known, else None.
        """
        comp_of = {v: i for i, c in enumerate(rotation_components(self.rotation)) for v in c}
        face_of = self.face_of_dart() if self.outer_darts else {}
        by_comp: dict[int, list[int]] = {}
        for i, f in enumerate(self.faces):
            by_comp.setdefault(comp_of[f[0][0]], []).append(i)
        out: dict[int, Optional[int]] = {}
        for ids in by_comp.values():
            outer = None
            named = [face_of[d] for d in self.outer_darts or () if d in face_of and face_of[d] in ids]
            if self.outer_face in ids:
                outer = self.outer_face
            elif named:
                outer = named[0]
            elif self.edge_geometry is not None:
                outer = min(ids, key=lambda i: polygon_area2(face_polygon(self, self.faces[i])))
            for i in ids:
                out[i] = outer
        return out

    def true_face_count(self) -> int:
        comps = rotation_components(self.rotation)
        nontrivial = sum(1 for c in comps if len(c) > 1)
        return len(self.faces) - nontrivial + 1 if nontrivial else 1

    def reflected(self) -> "CombinatorialDrawing":
        out = CombinatorialDrawing(
            self.graph.copy(), dict(self.kinds), {v: tuple(reversed(r)) for v, r in self.rotation.items()},
            None, dict(self.edge_backmap), self.gamma_vertices, self.gamma_edges,
            list(self.regions) if self.regions is not None else None)
        out.outer_face = self._mirror_face_index(out)
        out.outer_region = self.outer_region
        return out

    def _mirror_face_index(self, mirror: "CombinatorialDrawing") -> Optional[int]:
        if self.outer_face is None:
            return None
        darts = {(b, a) for a, b in self.faces[self.outer_face]}
        for i, f in enumerate(mirror.faces):
            if set(f) == darts:
                return i
        return None


def equivalent(a: CombinatorialDrawing, b: CombinatorialDrawing, reflection_sensitive: bool = False,
               sphere: bool = False) -> bool:
    """Topological equivalence: same rotations (up to a global reflection
    unless ``reflection_sensitive``) and the same face vertex sets.

    When both drawings designate an outer face its vertex set must agree
    too, unless ``sphere`` is set.
    """
    if a.graph.vertices and sorted(a.graph.vertices) != sorted(b.graph.vertices):
        raise LabelMismatch("vertex sets differ")
    if a.graph.edges() != b.graph.edges():
        raise LabelMismatch("edge sets differ")
    if not rotations_match(a.rotation, b.rotation, reflection_sensitive):
        return False
    if a.face_vertex_sets() != b.face_vertex_sets():
        return False
    if not sphere:
        oa, ob = a.outer_face_vertices(), b.outer_face_vertices()
        if oa is not None and ob is not None and oa != ob:
            return False
    return True


def _cyclic_equal(x: Sequence[str], y: Sequence[str]) -> bool:
    if len(x) != len(y):
        return False
    if not x:
        return True
    try:
        i = list(y).index(x[0])
    except ValueError:
        return False
    return all(x[k] == y[(i + k) % len(y)] for k in range(len(x)))


def rotations_match(ra: Mapping[str, Sequence[str]], rb: Mapping[str, Sequence[str]],
                    reflection_sensitive: bool = False) -> bool:
    if all(_cyclic_equal(ra[v], rb[v]) for v in ra):
        return True
    if reflection_sensitive:
        return False
    return all(_cyclic_equal(list(reversed(ra[v])), rb[v]) for v in ra)


# ----------------------------------------------------------------------
# planarization of polyline drawings


def _crossing_prefix(names: Iterable[str]) -> str:
    prefix = "x"
    names = list(names)
    while any(n.startswith(prefix) for n in names):
        prefix = "_" + prefix
    return prefix


def planarize_geometric(d: PolylineDrawing, gamma: Optional[Iterable[Edge]] = None,
                        check: bool = True) -> CombinatorialDrawing:
    """Planarize a simple polyline drawing exactly.

    Only the drawn part of ``d`` is planarized. ``gamma`` optionally flags
    the edges of the predrawn subgraph; their vertices and pairwise
    crossings become ``gamma_vertices``.
    """
    if check:
        bad = validate_drawing(d)
        if bad:
            raise NonSimpleDrawing(bad)
    verts = d.drawn_vertices()
    edges = sorted(d.polylines)
    # crossing points on each edge, located by (segment index, parameter)
    marks: dict[Edge, list[tuple[int, Fraction, Point]]] = {e: [] for e in edges}
    crossing_edges: dict[Point, tuple[Edge, Edge]] = {}
    for e, f in combinations(edges, 2):
        if set(e) & set(f):
            continue
        for i, (a, b) in enumerate(_segments(d.polylines[e])):
            for j, (c, dd) in enumerate(_segments(d.polylines[f])):
                hit = segment_intersection(a, b, c, dd)
                if hit is None or hit in crossing_edges:
                    continue
                crossing_edges[hit] = (e, f)
    for p, (e, f) in crossing_edges.items():
        for h in (e, f):
            pts = d.polylines[h]
            for i, (a, b) in enumerate(_segments(pts)):
                if on_segment(p, a, b) and p != b:
                    marks[h].append((i, segment_parameter(p, a, b), p))
                    break
    prefix = _crossing_prefix(verts)
    names = {p: f"{prefix}{i}" for i, p in enumerate(sorted(crossing_edges))}
    positions = {v: d.positions[v] for v in verts}
    positions.update({names[p]: p for p in names})
    kinds = {v: REAL for v in verts}
    kinds.update({names[p]: CROSSING for p in names})
    g = Graph(list(verts) + [names[p] for p in sorted(crossing_edges)])
    g.colors = {v: c for v, c in d.host.colors.items() if v in positions}
    backmap = {}
    geometry: dict[Dart, list[Point]] = {}
    gamma_set = {edge_key(*e) for e in gamma} if gamma is not None else set()
    gamma_edges = set()
    for e in edges:
        pts = d.polylines[e]
        ordered = sorted(marks[e], key=lambda m: (m[0], m[1]))
        path = [e[0]] + [names[m[2]] for m in ordered] + [e[1]]
        backmap[e] = tuple(path)
        # split the polyline into pieces between consecutive path vertices
        stops = [(0, Fraction(0), pts[0])] + ordered + [(len(pts) - 2, Fraction(1), pts[-1])]
        for k in range(len(path) - 1):
            s_i, _, s_p = stops[k]
            t_i, _, t_p = stops[k + 1]
            piece = [s_p] + [pts[i] for i in range(s_i + 1, t_i + 1) if pts[i] != s_p] + [t_p]
            clean = [piece[0]]
            for q in piece[1:]:
                if q != clean[-1]:
                    clean.append(q)
            u, v = path[k], path[k + 1]
            g.add_edge(u, v)
            geometry[(u, v)] = clean
            geometry[(v, u)] = clean[::-1]
            if e in gamma_set:
                gamma_edges.add(edge_key(u, v))
    rotation = {}
    for v in g.vertices:
        p = positions[v]
        rotation[v] = tuple(sort_ccw(g.neighbors(v), lambda w: sub(geometry[(v, w)][1], p)))
    gamma_vertices = set()
    if gamma is not None:
        for e in gamma_set:
            gamma_vertices.update(e)
        for p, (e, f) in crossing_edges.items():
            if e in gamma_set and f in gamma_set:
                gamma_vertices.add(names[p])
    cd = CombinatorialDrawing(g, kinds, rotation, None, backmap, frozenset(gamma_vertices),
                              frozenset(gamma_edges), None, positions, geometry)
    _attach_outer_face(cd)
    return cd


def face_polygon(cd: CombinatorialDrawing, face: Sequence[Dart]) -> list[Point]:
    pts: list[Point] = []
    for dart in face:
        pts.extend(cd.edge_geometry[dart][:-1])
    return pts


def _attach_outer_face(cd: CombinatorialDrawing) -> None:
    """Locate the unbounded face and nesting of components geometrically."""
    if not cd.faces:
        if len(cd.graph) > 1:
            cd.regions = [frozenset(cd.graph.vertices)]
        return
    areas = [polygon_area2(face_polygon(cd, f)) for f in cd.faces]
    lowest = min(cd.positions, key=lambda v: (cd.positions[v][1], cd.positions[v][0]))
    comps = rotation_components(cd.rotation)
    comp_of = {v: i for i, c in enumerate(comps) for v in c}
    outer_of_comp: dict[int, int] = {}
    for i, f in enumerate(cd.faces):
        c = comp_of[f[0][0]]
        if c not in outer_of_comp or areas[i] < areas[outer_of_comp[c]]:
            outer_of_comp[c] = i
    low_comp = comp_of[lowest]
    if low_comp in outer_of_comp:
        cd.outer_face = outer_of_comp[low_comp]
    nontrivial = [c for c in comps if len(c) > 1]
    if len(nontrivial) == 1 and len(comps) == 1:
        return
    # nesting: each component sits in the smallest bounded face of another
    # component that contains one of its points, or in the outer face
    bounded = [(i, face_polygon(cd, f)) for i, f in enumerate(cd.faces) if i not in set(outer_of_comp.values())]
    region_members: dict[Optional[int], set[str]] = {None: set()}
    outer_ids = set(outer_of_comp.values())
    for i, f in enumerate(cd.faces):
        if i not in outer_ids:
            region_members.setdefault(i, set()).update(a for a, _ in f)
    for ci, comp in enumerate(comps):
        probe = cd.positions[comp[0]]
        best = None
        for i, poly in bounded:
            if comp_of[cd.faces[i][0][0]] == ci:
                continue
            if point_in_polygon(probe, poly) == 1:
                if best is None or areas[i] < areas[best]:
                    best = i
        if ci in outer_of_comp:
            region_members.setdefault(best, set()).update(a for a, _ in cd.faces[outer_of_comp[ci]])
        else:
            region_members.setdefault(best, set()).update(comp)
    cd.regions = [frozenset(s) for s in region_members.values() if s]
    cd.outer_region = frozenset(region_members[None])


# ----------------------------------------------------------------------
# partially predrawn graphs


@dataclass
class PartiallyPredrawnGraph:
    """A graph together with a drawing of one of its subgraphs."""

    graph: Graph
    predrawing: Optional[PolylineDrawing] = None

    def __post_init__(self):
        if self.predrawing is None:
            self.predrawing = PolylineDrawing(Graph(), {}, {})
        pd = self.predrawing
        for v in pd.positions:
            if v not in self.graph:
                raise ValueError(f"predrawn vertex {v!r} is not in the graph")
        for e in pd.polylines:
            if not self.graph.has_edge(*e):
                raise ValueError(f"predrawn edge {e} is not in the graph")

    @property
    def gamma_vertices(self) -> list[str]:
        return [v for v in self.graph.vertices if v in self.predrawing.positions]

    @property
    def gamma_edges(self) -> list[Edge]:
        return sorted(self.predrawing.polylines)

    def gamma_drawing(self) -> PolylineDrawing:
        """The predrawing as a drawing of exactly the predrawn subgraph."""
        pd = self.predrawing
        return pd.restrict(self.gamma_vertices, self.gamma_edges)

    def gamma_planarization(self) -> CombinatorialDrawing:
        return planarize_geometric(self.gamma_drawing(), gamma=self.gamma_edges)

    def is_empty(self) -> bool:
        return not self.predrawing.positions


def recover_backmap(cd: CombinatorialDrawing) -> dict[Edge, tuple[str, ...]]:
    """Original edges of a planarization, from its back-map or by walking
    straight through crossings when no back-map is stored."""
    if cd.edge_backmap:
        return dict(cd.edge_backmap)
    out: dict[Edge, tuple[str, ...]] = {}
    for v in cd.graph.vertices:
        if cd.kinds[v] != REAL:
            continue
        for w in cd.rotation[v]:
            path = [v, w]
            while cd.kinds[path[-1]] == CROSSING:
                nxt = cd.opposite(path[-1], path[-2])
                if nxt is None or len(path) > len(cd.graph) + 1:
                    raise InconsistentRotation(f"cannot follow an edge through {path[-1]!r}")
                path.append(nxt)
            key = edge_key(path[0], path[-1])
            if key not in out:
                out[key] = tuple(path) if path[0] == key[0] else tuple(reversed(path))
    return out
