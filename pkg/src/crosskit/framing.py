"""Framings of partially predrawn graphs and the building blocks around them.

A framing turns the predrawing into graph structure: the planarized
predrawing is connected up, every predrawn edge is thickened into three
parallel paths of length three, and every planarization vertex is wrapped
in a cycle through its neighbours. The crossing-flip-aware variant
additionally lists rotation markers and delimiter flags at edges that meet
small vertex cuts. The module also decides separation by an edge set in a
3-connected planar graph and writes the skeleton of the monadic
second-order formula that is evaluated on a framing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, islice, permutations, product
from math import factorial
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import networkx as nx

from .drawing import (
    CombinatorialDrawing,
    PartiallyPredrawnGraph,
    euler_characteristic_ok,
    face_polygon,
    rotation_components,
)
from .geometry import point_in_polygon, polygon_area2
from .graph import Edge, Graph, edge_key, to_networkx

Dart = tuple[str, str]

OUTER = -1


def _fresh_prefix(base: str, names: Iterable[str]) -> str:
    names = list(names)
    prefix = base
    while any(n.startswith(prefix) for n in names):
        prefix = "_" + prefix
    return prefix


# ----------------------------------------------------------------------
# faces of a possibly disconnected planarization


def _true_faces(cd: CombinatorialDrawing) -> tuple[dict[Dart, int], dict[str, int]]:
    """Assign every dart and every isolated vertex to a face of the plane.

    Bounded local faces keep their index. The unbounded local face of a
    component belongs to the face it is nested in: the smallest bounded
    local face of another component around it, or ``OUTER``.
    """
    comps = rotation_components(cd.rotation)
    comp_of = {v: i for i, c in enumerate(comps) for v in c}
    areas = [polygon_area2(face_polygon(cd, f)) for f in cd.faces]
    outer_local: dict[int, int] = {}
    for i, f in enumerate(cd.faces):
        c = comp_of[f[0][0]]
        if c not in outer_local or areas[i] < areas[outer_local[c]]:
            outer_local[c] = i
    outer_ids = set(outer_local.values())
    bounded = [(i, face_polygon(cd, f)) for i, f in enumerate(cd.faces) if i not in outer_ids]

    def container(ci: int) -> int:
        probe = cd.positions[comps[ci][0]]
        best = OUTER
        for i, poly in bounded:
            if comp_of[cd.faces[i][0][0]] == ci:
                continue
            if point_in_polygon(probe, poly) == 1 and (best == OUTER or areas[i] < areas[best]):
                best = i
        return best

    dart_face: dict[Dart, int] = {}
    for i, f in enumerate(cd.faces):
        fid = container(comp_of[f[0][0]]) if i in outer_ids else i
        for d in f:
            dart_face[d] = fid
    isolated = {}
    for ci, c in enumerate(comps):
        if len(c) == 1 and not cd.rotation[c[0]]:
            isolated[c[0]] = container(ci)
    return dart_face, isolated


class _PlaneGraph:
    """A plane graph that grows by edges drawn inside a known face."""

    def __init__(self, cd: CombinatorialDrawing):
        self.rotation = {v: list(cd.rotation[v]) for v in cd.graph.vertices}
        if cd.faces or len(cd.graph) > 1:
            self.dart_face, self.isolated = _true_faces(cd)
        else:
            self.dart_face, self.isolated = {}, {v: OUTER for v in cd.graph.vertices}
        self.parent = {v: v for v in self.rotation}
        for u, w in cd.graph.edges():
            self.union(u, w)

    def find(self, v: str) -> str:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def union(self, u: str, w: str) -> None:
        a, b = self.find(u), self.find(w)
        if a != b:
            self.parent[max(a, b)] = min(a, b)

    def faces_at(self, v: str) -> set[int]:
        if v in self.isolated:
            return {self.isolated[v]}
        return {self.dart_face[(v, w)] for w in self.rotation[v]}

    def vertices_on(self, face: int) -> list[str]:
        return sorted(v for v in self.rotation if face in self.faces_at(v))

    def components_on(self, face: int) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for v in self.vertices_on(face):
            out.setdefault(self.find(v), []).append(v)
        return out

    def component_count(self) -> int:
        return len({self.find(v) for v in self.rotation})

    def _insert_at(self, u: str, w: str, face: int) -> None:
        rot = self.rotation[u]
        if u in self.isolated:
            del self.isolated[u]
            rot.append(w)
            return
        i = next(i for i, x in enumerate(rot) if self.dart_face[(u, x)] == face)
        rot.insert(i + 1, w)

    def add_edge(self, u: str, w: str, face: int) -> None:
        """Draw ``uw`` inside ``face``; both ends must lie on it."""
        self._insert_at(u, w, face)
        self._insert_at(w, u, face)
        self.dart_face[(u, w)] = face
        self.dart_face[(w, u)] = face
        self.union(u, w)


# ----------------------------------------------------------------------
# framing data


@dataclass(frozen=True)
class RotationMarkerLabel:
    """Label ``(groups, order, position)`` of one rotation marker."""

    groups: frozenset
    order: tuple
    position: int

    def __post_init__(self):
        seen: set[int] = set()
        for grp in self.groups:
            if not grp:
                raise ValueError("marker groups must be non-empty")
            if seen & grp:
                raise ValueError("marker groups must be pairwise disjoint")
            seen |= grp
        if sorted(map(sorted, self.order)) != sorted(map(sorted, self.groups)) or len(self.order) != len(self.groups):
            raise ValueError("marker order must list every group once")
        if not 0 <= self.position <= len(self.groups):
            raise ValueError(f"marker position {self.position} outside 0..{len(self.groups)}")

    def as_dict(self) -> dict:
        return {"order": [sorted(g) for g in self.order], "position": self.position}


class LabelBudgetExceeded(RuntimeError):
    """The pruned marker labels would exceed the configured cap."""


@dataclass(frozen=True)
class MarkerSchema:
    """The full marker label space for budget ``k``, enumerated lazily.

    A raw label is a map from ``18k`` group slots into ``[6k]``, an order
    of the ``18k`` slots and a position in ``0..18k``, which gives exactly
    ``(6k)^(18k) * (18k)! * (18k + 1)`` labels.
    """

    k: int

    symbolic = "(6k)^{18k}·(18k)!·(18k+1)"

    @property
    def count(self) -> int:
        k = self.k
        return (6 * k) ** (18 * k) * factorial(18 * k) * (18 * k + 1)

    def __iter__(self) -> Iterator[tuple]:
        k = self.k
        slots = range(1, 6 * k + 1)
        for groups in product(slots, repeat=18 * k):
            for order in permutations(range(18 * k)):
                for pos in range(18 * k + 1):
                    yield groups, order, pos

    def sample(self, n: int) -> list[tuple]:
        return list(islice(iter(self), n))


@dataclass
class Framing:
    frame_graph: Graph
    connector_edges: frozenset
    framing_triplets: dict[Edge, tuple[tuple[str, ...], ...]]
    framing_cycles: dict[str, tuple[str, ...]]
    markers: dict[tuple[Edge, str], list] = field(default_factory=dict)
    flags: dict[tuple[Edge, str], tuple[str, str]] = field(default_factory=dict)
    frame_rotation: dict[str, tuple[str, ...]] = field(default_factory=dict)
    planarization: Optional[CombinatorialDrawing] = None
    cut_vertices: frozenset = frozenset()
    schema: Optional[MarkerSchema] = None

    def frame_edges(self) -> list[Edge]:
        return sorted({edge_key(v, w) for v, nb in self.frame_rotation.items() for w in nb})

    def pruned_label_count(self) -> int:
        return sum(len(v) for v in self.markers.values())

    def annotations(self) -> dict:
        out = {
            "connector_edges": [list(e) for e in sorted(self.connector_edges)],
            "framing_triplets": [{"edge": list(e), "paths": [list(p) for p in ps]}
                                 for e, ps in sorted(self.framing_triplets.items())],
            "framing_cycles": {v: list(c) for v, c in sorted(self.framing_cycles.items())},
            "frame_edge_count": len(self.frame_edges()),
        }
        if self.schema is not None:
            per = {f"{e[0]}-{e[1]}@{v}": len(lbls) for (e, v), lbls in sorted(self.markers.items())}
            out["markers"] = {
                "k": self.schema.k,
                "schema": self.schema.symbolic,
                "schema_count_digits": len(str(self.schema.count)),
                "pruned_total": self.pruned_label_count(),
                "pruned_per_attachment": per,
            }
            out["flags"] = {f"{e[0]}-{e[1]}@{v}": list(p) for (e, v), p in sorted(self.flags.items())}
            out["cut_vertices"] = sorted(self.cut_vertices)
        return out


# ----------------------------------------------------------------------
# building framings


def _connect_components(plane: _PlaneGraph, g: Graph) -> list[Edge]:
    """Connect the plane graph: graph edges first, then a star in a face."""
    added = []
    while plane.component_count() > 1:
        progress = True
        while progress:
            progress = False
            for u, w in g.edges():
                if u not in plane.rotation or w not in plane.rotation or plane.find(u) == plane.find(w):
                    continue
                common = plane.faces_at(u) & plane.faces_at(w)
                if common:
                    plane.add_edge(u, w, min(common))
                    added.append(edge_key(u, w))
                    progress = True
        if plane.component_count() == 1:
            break
        faces = sorted({f for v in plane.rotation for f in plane.faces_at(v)})
        face = next(f for f in faces if len(plane.components_on(f)) > 1)
        on_face = plane.components_on(face)
        hub = min(plane.vertices_on(face))
        for root, members in sorted(on_face.items(), key=lambda kv: min(kv[1])):
            if root == plane.find(hub):
                continue
            plane.add_edge(hub, min(members), face)
            added.append(edge_key(hub, min(members)))
    return added


def _planarization_for(instance: PartiallyPredrawnGraph) -> CombinatorialDrawing:
    cd = instance.gamma_planarization()
    clash = [x for x in cd.crossing_vertices if x in instance.graph]
    if not clash:
        return cd
    prefix = _fresh_prefix("x", list(instance.graph.vertices) + cd.graph.vertices)
    names = {x: f"{prefix}{i}" for i, x in enumerate(cd.crossing_vertices)}
    ren = lambda v: names.get(v, v)
    rotation = {ren(v): tuple(ren(w) for w in nb) for v, nb in cd.rotation.items()}
    kinds = {ren(v): kd for v, kd in cd.kinds.items()}
    positions = {ren(v): p for v, p in cd.positions.items()}
    geometry = {(ren(a), ren(b)): pts for (a, b), pts in cd.edge_geometry.items()}
    backmap = {e: tuple(ren(v) for v in path) for e, path in cd.edge_backmap.items()}
    g = Graph(list(rotation), [(v, w) for v in rotation for w in rotation[v] if v < w])
    return CombinatorialDrawing(g, kinds, rotation, cd.outer_face, backmap,
                                frozenset(ren(v) for v in cd.gamma_vertices),
                                frozenset(edge_key(ren(a), ren(b)) for a, b in cd.gamma_edges),
                                None, positions, geometry)


def build_framing(instance: PartiallyPredrawnGraph) -> Framing:
    """Orientation agnostic framing of ``instance``.

    Connector edges are not thickened. The frame rotation records the
    planar drawing of the frame part; flip-aware annotations stay empty.
    """
    g = instance.graph
    cd = _planarization_for(instance)
    centers = list(cd.graph.vertices)
    plane = _PlaneGraph(cd)
    connectors = frozenset(_connect_components(plane, g))

    prefix = _fresh_prefix("t", list(g.vertices) + centers)
    counter = iter(range(10 ** 9))
    fresh = lambda: f"{prefix}{next(counter)}"

    # thicken every non-connector edge into three parallel paths
    rotation: dict[str, list[str]] = {v: list(nb) for v, nb in plane.rotation.items()}
    triplets: dict[Edge, tuple[tuple[str, ...], ...]] = {}
    for u, w in cd.graph.edges():
        paths = []
        for _ in range(3):
            a, b = fresh(), fresh()
            paths.append((u, a, b, w))
            rotation[a] = [u, b]
            rotation[b] = [a, w]
        triplets[(u, w)] = tuple(paths)
        at_u = rotation[u].index(w)
        rotation[u][at_u:at_u + 1] = [p[1] for p in paths]
        at_w = rotation[w].index(u)
        rotation[w][at_w:at_w + 1] = [p[2] for p in reversed(paths)]

    # wrap every planarization vertex in a cycle through its neighbours
    center_set = set(centers)
    cycles: dict[str, tuple[str, ...]] = {}
    inserts: list[tuple[str, str, str, str]] = []
    for c in centers:
        nbrs = tuple(rotation[c])
        d = len(nbrs)
        if d < 2:
            continue
        cycles[c] = nbrs
        for i, x in enumerate(nbrs):
            nxt, prv = nbrs[(i + 1) % d], nbrs[(i - 1) % d]
            if d > 2 or i == 1:
                inserts.append((x, c, "prev", prv))
            if d > 2 or i == 0:
                inserts.append((x, c, "next", nxt))
    for x, c, side, y in inserts:
        rot = rotation[x]
        at = rot.index(c)
        if x in center_set or side == "next":
            # neighbours of a centre on the far end of a connector keep both
            # cycle edges on one side; path vertices straddle the centre
            rot.insert(at, y)
        else:
            rot.insert(at + 1, y)

    frame_rotation = {v: tuple(nb) for v, nb in rotation.items()}
    f = Graph(sorted(set(g.vertices) | set(frame_rotation)))
    for v, nb in frame_rotation.items():
        for w in nb:
            f.add_edge(v, w)
    for u, w in g.edges():
        f.add_edge(u, w)
    return Framing(f, connectors, triplets, cycles, frame_rotation=frame_rotation, planarization=cd)


def check_framing(fr: Framing) -> list[str]:
    """Structural problems of a framing; empty when every invariant holds."""
    problems = []
    cd = fr.planarization
    rot = fr.frame_rotation
    frame_edges = set(fr.frame_edges())
    for e in cd.graph.edges():
        if e in fr.connector_edges:
            continue
        paths = fr.framing_triplets.get(e)
        if paths is None or len(paths) != 3:
            problems.append(f"edge {e} lacks a framing triplet")
            continue
        inner = [v for p in paths for v in p[1:-1]]
        if len(set(inner)) != 6 or set(inner) & set(e):
            problems.append(f"triplet of {e} is not internally disjoint")
        for p in paths:
            if len(p) != 4 or {p[0], p[-1]} != set(e):
                problems.append(f"triplet path {p} of {e} is not a length-3 path between its ends")
            elif not all(edge_key(p[i], p[i + 1]) in frame_edges for i in range(3)):
                problems.append(f"triplet path {p} of {e} is missing from the frame")
    for e in fr.framing_triplets:
        if e in fr.connector_edges:
            problems.append(f"connector edge {e} was thickened")
    for c, cyc in fr.framing_cycles.items():
        # the neighbour each cycle vertex stands for, in cycle order
        seen: list[str] = []
        for x in cyc:
            path_end = next((p[-1] if p[1] == x else p[0] for ps in fr.framing_triplets.values()
                             for p in ps if x in (p[1], p[2]) and c in (p[0], p[-1])), x)
            if not seen or seen[-1] != path_end:
                seen.append(path_end)
        if len(seen) > 1 and seen[0] == seen[-1]:
            seen.pop()
        drawn = [w for w in seen if w in cd.rotation[c]]
        if not _same_cycle(drawn, list(cd.rotation[c])):
            problems.append(f"framing cycle of {c} does not follow the predrawn rotation")
        for i in range(len(cyc)):
            if len(cyc) > 1 and edge_key(cyc[i], cyc[(i + 1) % len(cyc)]) not in frame_edges:
                problems.append(f"framing cycle of {c} is missing edge {cyc[i]}-{cyc[(i + 1) % len(cyc)]}")
    if not euler_characteristic_ok(rot):
        problems.append("frame part is not planar (Euler check failed)")
    return problems


def _same_cycle(a: Sequence[str], b: Sequence[str]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    if a[0] not in b:
        return False
    i = list(b).index(a[0])
    return list(a) == list(b[i:]) + list(b[:i])


# ----------------------------------------------------------------------
# small vertex cuts and flip-aware framings


def small_cut_vertices(g: Graph) -> frozenset:
    """Vertices that belong to a vertex cut of size one or two."""
    nxg = to_networkx(g)
    single = set(nx.articulation_points(nxg))
    out = set(single)
    # a pair counts only when neither vertex separates on its own
    for v in g.vertices:
        if v in single:
            continue
        h = nxg.copy()
        h.remove_node(v)
        for u in nx.articulation_points(h):
            if u not in single:
                out.update((u, v))
    return frozenset(out)


def _separating_set(g: Graph) -> Optional[tuple[str, ...]]:
    nxg = to_networkx(g)
    base = nx.number_connected_components(nxg)
    for v in g.vertices:
        h = nxg.copy()
        h.remove_node(v)
        if nx.number_connected_components(h) > base:
            return (v,)
    for u, v in combinations(g.vertices, 2):
        h = nxg.copy()
        h.remove_nodes_from((u, v))
        if nx.number_connected_components(h) > base:
            return (u, v)
    return None


def split_pieces(g: Graph) -> list[frozenset]:
    """Vertex sets of the pieces left by recursively splitting at vertex
    cuts of size at most two; a 2-cut gets a virtual edge in each piece."""
    out: set[frozenset] = set()
    stack = [g.subgraph(c) for c in g.components()]
    while stack:
        h = stack.pop()
        cut = _separating_set(h) if len(h) > 3 else None
        if cut is None:
            out.add(frozenset(h.vertices))
            continue
        rest = h.copy()
        for v in cut:
            rest.remove_vertex(v)
        for comp in rest.components():
            piece = h.subgraph(list(comp) + list(cut))
            if len(cut) == 2:
                piece.add_edge(*cut)
            stack.append(piece)
        if len(cut) == 2 and h.has_edge(*cut):
            out.add(frozenset(cut))
    return sorted(out, key=lambda s: sorted(s))


def _stirling2(n: int, r: int) -> int:
    return _stirling_table(n)[r] if 0 <= r <= n else 0


@lru_cache(maxsize=None)
def _stirling_table(n: int) -> tuple[int, ...]:
    row = [1]
    for i in range(1, n + 1):
        prev = row + [0]
        row = [0] * (i + 1)
        for r in range(1, i + 1):
            row[r] = r * prev[r] + prev[r - 1]
    return tuple(row)


def pruned_label_count(slots: int, max_groups: int) -> int:
    """Labels whose group entry is a family of at most ``max_groups``
    pairwise disjoint non-empty subsets of ``slots`` special-vertex slots."""
    total = 0
    for r in range(0, min(max_groups, slots) + 1):
        families = _stirling2(slots + 1, r + 1)
        total += families * max(1, factorial(r - 1) if r else 1) * (r + 1)
    return total


def _disjoint_families(slots: int, max_groups: int) -> Iterator[tuple[frozenset, ...]]:
    """Families of disjoint non-empty subsets of ``1..slots``, each once,
    groups sorted by their smallest element."""

    def rec(i: int, groups: list[list[int]]):
        if i > slots:
            yield tuple(frozenset(gr) for gr in groups)
            return
        yield from rec(i + 1, groups)
        for gr in groups:
            gr.append(i)
            yield from rec(i + 1, groups)
            gr.pop()
        if len(groups) < max_groups:
            groups.append([i])
            yield from rec(i + 1, groups)
            groups.pop()

    yield from rec(1, [])


@lru_cache(maxsize=64)
def _pruned_labels(slots: int, max_groups: int) -> tuple[RotationMarkerLabel, ...]:
    out = []
    for fam in _disjoint_families(slots, max_groups):
        groups = frozenset(fam)
        if not fam:
            out.append(RotationMarkerLabel(groups, (), 0))
            continue
        first, rest = fam[0], fam[1:]
        for perm in permutations(rest):
            order = (first,) + perm
            for pos in range(len(fam) + 1):
                out.append(RotationMarkerLabel(groups, order, pos))
    return tuple(out)


DEFAULT_LABEL_CAP = 1_000_000


def build_flip_aware(instance: PartiallyPredrawnGraph, k: int, *, cap: int = DEFAULT_LABEL_CAP) -> Framing:
    """Framing with rotation markers and delimiter flags at small cuts.

    Markers are listed per attachment point (edge and cut endpoint) rather
    than added as vertices; only labels whose group entry fits the groups
    the endpoint can actually see are kept. Flags are added to the frame
    graph as two vertices adjacent to both ends of the edge.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    fr = build_framing(instance)
    fr.schema = MarkerSchema(k)
    if k == 0:
        return fr
    g = instance.graph
    cuts = small_cut_vertices(g)
    fr.cut_vertices = cuts
    if not cuts:
        return fr
    pieces = split_pieces(g)
    slots = 6 * k
    attach = []
    for u, w in g.edges():
        for x in (u, w):
            if x in cuts:
                visible = sum(1 for p in pieces if x in p) + len(cuts) - 1
                attach.append(((edge_key(u, w), x), min(visible, slots)))
    total = sum(pruned_label_count(slots, m) for _, m in attach)
    if total > cap:
        raise LabelBudgetExceeded(f"{total} pruned marker labels exceed the cap of {cap}")
    prefix = _fresh_prefix("f", list(fr.frame_graph.vertices))
    for i, (key, m) in enumerate(attach):
        fr.markers[key] = list(_pruned_labels(slots, m))
        first, last = f"{prefix}{i}first", f"{prefix}{i}last"
        fr.flags[key] = (first, last)
        for flag in (first, last):
            fr.frame_graph.add_vertex(flag)
            fr.frame_graph.add_edge(flag, key[0][0])
            fr.frame_graph.add_edge(flag, key[0][1])
    return fr


# ----------------------------------------------------------------------
# separation by an edge set in a 3-connected planar graph


class Not3Connected(ValueError):
    """The graph is not 3-connected (or not planar)."""


class InadmissibleS(ValueError):
    """The separating edge set is neither a cycle nor closable paths."""


@lru_cache(maxsize=256)
def _faces_of(edges: frozenset) -> tuple[tuple[str, ...], ...]:
    """Faces of a 3-connected planar graph as its induced non-separating cycles."""
    nxg = nx.Graph(list(edges))
    out = []
    for cyc in nx.simple_cycles(nxg):
        if len(cyc) < 3:
            continue
        cs = set(cyc)
        chords = nxg.subgraph(cyc).number_of_edges()
        if chords != len(cyc):
            continue
        rest = nxg.subgraph(set(nxg) - cs)
        if len(rest) and not nx.is_connected(rest):
            continue
        i = cyc.index(min(cyc))
        cyc = cyc[i:] + cyc[:i]
        if cyc[1] > cyc[-1]:
            cyc = [cyc[0]] + cyc[1:][::-1]
        out.append(tuple(cyc))
    return tuple(sorted(out))


def _check_3connected(g3: Graph) -> None:
    if not _is_3connected_planar(frozenset(g3.vertices), frozenset(g3.edges())):
        raise Not3Connected("graph is not 3-connected and planar")


@lru_cache(maxsize=256)
def _is_3connected_planar(vertices: frozenset, edges: frozenset) -> bool:
    nxg = nx.Graph(list(edges))
    nxg.add_nodes_from(vertices)
    if len(nxg) < 4 or not nx.is_connected(nxg) or nx.node_connectivity(nxg) < 3:
        return False
    return nx.check_planarity(nxg)[0]


def faces_of(g3: Graph) -> list[tuple[str, ...]]:
    """Faces of the unique embedding of a 3-connected planar graph."""
    _check_3connected(g3)
    return list(_faces_of(frozenset(g3.edges())))


def _shape_of(g3: Graph, s: frozenset) -> tuple[str, list[list[str]]]:
    """``("cycle", [cycle])`` or ``("paths", [path, ...])`` for edge set ``s``."""
    if not s:
        raise InadmissibleS("empty edge set")
    for e in s:
        if not g3.has_edge(*e):
            raise InadmissibleS(f"{e} is not an edge of the graph")
    h = Graph(sorted({v for e in s for v in e}), sorted(s))
    degs = {v: h.degree(v) for v in h.vertices}
    if max(degs.values()) > 2:
        raise InadmissibleS("edge set has a vertex of degree above two")
    comps = h.components()
    paths = []
    for comp in comps:
        ends = [v for v in comp if degs[v] == 1]
        if not ends:
            if len(comps) != 1:
                raise InadmissibleS("a cycle must be the whole edge set")
            start = min(comp)
            cyc = [start]
            prev, cur = None, start
            while True:
                nxt = min(w for w in h.neighbors(cur) if w != prev) if prev is None else \
                    next(w for w in h.neighbors(cur) if w != prev)
                if nxt == start:
                    break
                cyc.append(nxt)
                prev, cur = cur, nxt
            return "cycle", [cyc]
        path = [min(ends)]
        prev = None
        while True:
            nxt = [w for w in h.neighbors(path[-1]) if w != prev]
            if not nxt:
                break
            prev = path[-1]
            path.append(nxt[0])
        paths.append(path)
    return "paths", sorted(paths)


def closing_faces(g3: Graph, s: Iterable[Edge]) -> list[tuple[str, ...]]:
    """Faces on which all path ends of ``s`` lie (empty for a cycle)."""
    s = frozenset(edge_key(*e) for e in s)
    kind, parts = _shape_of(g3, s)
    if kind == "cycle":
        return []
    return _closing_options(faces_of(g3), parts)


def _closing_options(faces: Iterable[tuple[str, ...]], parts: list[list[str]]) -> list[tuple[str, ...]]:
    ends = {p[0] for p in parts} | {p[-1] for p in parts}
    return [f for f in faces if ends <= set(f) and _chords_nest(f, parts)]


def _chords_nest(face: Sequence[str], paths: list[list[str]]) -> bool:
    pos = {v: i for i, v in enumerate(face)}
    spans = [tuple(sorted((pos[p[0]], pos[p[-1]]))) for p in paths]
    for (a, b), (c, d) in combinations(spans, 2):
        if a < c < b < d or c < a < d < b:
            return False
    return True


def _split_face(face: Sequence[str], paths: list[list[str]]) -> list[frozenset]:
    """Boundary edge sets of the parts of ``face`` cut by closing chords."""
    n = len(face)
    pos = {v: i for i, v in enumerate(face)}
    spans = sorted((tuple(sorted((pos[p[0]], pos[p[-1]]))) for p in paths), key=lambda s: s[1] - s[0])
    parts: dict[Optional[tuple[int, int]], set] = {}
    for t in range(n):
        inner = next((sp for sp in spans if sp[0] <= t < sp[1]), None)
        parts.setdefault(inner, set()).add(edge_key(face[t], face[(t + 1) % n]))
    return [frozenset(v) for v in parts.values()]


def _closing_face(faces: Iterable[tuple[str, ...]], parts: list[list[str]],
                  face: Optional[Sequence[str]]) -> tuple[str, ...]:
    options = _closing_options(faces, parts)
    if face is not None:
        closing = next((f for f in options if set(f) == set(face)), None)
        if closing is None:
            raise InadmissibleS("the given face cannot close the paths")
        return closing
    if len(options) != 1:
        raise InadmissibleS(f"{len(options)} faces can close the paths; pass one explicitly")
    return options[0]


def separation_classes(g3: Graph, s: Iterable[Edge], *,
                       face: Optional[Sequence[str]] = None) -> list[frozenset]:
    """Vertices off ``s`` grouped by the side of ``s`` they lie on.

    Two vertices share a group exactly when some sequence of edges outside
    ``s``, consecutive ones sharing a face, runs from an edge on a face at
    one vertex to an edge on a face at the other. A path-shaped ``s`` is
    closed by curves drawn inside one face through the path ends; ``face``
    picks that face when more than one qualifies.
    """
    edges = frozenset(g3.edges())
    if not _is_3connected_planar(frozenset(g3.vertices), edges):
        raise Not3Connected("graph is not 3-connected and planar")
    faces = _faces_of(edges)
    s = frozenset(edge_key(*e) for e in s)
    kind, parts = _shape_of(g3, s)
    closing = _closing_face(faces, parts, face) if kind == "paths" else None
    face_edges = []
    for f in faces:
        if f == closing:
            face_edges.extend(_split_face(f, parts))
        else:
            face_edges.append(frozenset(edge_key(f[i], f[(i + 1) % len(f)]) for i in range(len(f))))

    # faces linked by an edge outside s belong to one chain
    parent = list(range(len(face_edges)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    first_face: dict[Edge, int] = {}
    for i, fe in enumerate(face_edges):
        for e in fe - s:
            if e in first_face:
                parent[find(i)] = find(first_face[e])
            else:
                first_face[e] = i
    s_vertices = {v for e in s for v in e}
    groups: dict[int, set] = {}
    for i, fe in enumerate(face_edges):
        for e in fe:
            for v in e:
                if v not in s_vertices:
                    groups.setdefault(find(i), set()).add(v)
    return sorted((frozenset(gr) for gr in groups.values()), key=lambda gr: min(gr))


def three_con_sep(g3: Graph, s: Iterable[Edge], a: str, b: str, *,
                  face: Optional[Sequence[str]] = None) -> bool:
    """Whether ``s`` separates ``a`` from ``b`` in the embedding of ``g3``.

    ``a`` and ``b`` are separated when they lie in different components of
    ``g3 - V(s)`` and no face-sharing edge sequence outside ``s`` joins
    them (see :func:`separation_classes`).
    """
    s = frozenset(edge_key(*e) for e in s)
    _check_3connected(g3)
    s_vertices = {v for e in s for v in e}
    if a in s_vertices or b in s_vertices or a not in g3 or b not in g3:
        raise InadmissibleS("a and b must be graph vertices off the edge set")
    classes = separation_classes(g3, s, face=face)
    rest = g3.copy()
    for v in s_vertices:
        rest.remove_vertex(v)
    comp = {v: i for i, c in enumerate(rest.components()) for v in c}
    if comp[a] == comp[b]:
        return False
    return not any(a in gr and b in gr for gr in classes)


def admissible_edge_sets(g3: Graph) -> Iterator[tuple[frozenset, Optional[tuple[str, ...]]]]:
    """Every admissible separating edge set of ``g3`` with its closing face.

    Yields each cycle once with face ``None``, and each family of
    vertex-disjoint paths once per face that can close it.
    """
    faces = faces_of(g3)
    nxg = to_networkx(g3)
    for cyc in nx.simple_cycles(nxg):
        if len(cyc) >= 3:
            yield frozenset(edge_key(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))), None
    on_face = {f: set(f) for f in faces}
    paths = []
    for u, v in combinations(sorted(nxg), 2):
        if any(u in fs and v in fs for fs in on_face.values()):
            paths.extend(tuple(p) for p in nx.all_simple_paths(nxg, u, v))

    def families(start: int, used: set, chosen: list):
        for i in range(start, len(paths)):
            p = paths[i]
            if used & set(p):
                continue
            fam = chosen + [p]
            ends = {q[0] for q in fam} | {q[-1] for q in fam}
            shared = [f for f in faces if ends <= on_face[f]]
            if not shared:
                continue
            parts = [list(q) for q in fam]
            for f in shared:
                if _chords_nest(f, parts):
                    yield frozenset(edge_key(q[j], q[j + 1]) for q in fam for j in range(len(q) - 1)), f
            yield from families(i + 1, used | set(p), fam)

    yield from families(0, set(), [])


# ----------------------------------------------------------------------
# formula skeleton
#
# Grammar of the emitted text (one item per line, indentation free):
#
#   document   := comment* "phi :=" quantifier* "(" conjunct ("&" conjunct)* ")" definition*
#   quantifier := "exists" NAME ":" SORT "."
#   conjunct   := atom | "~" "(" "exists" NAME ("," NAME)* ":" SORT "." "(" atom "&" atom ")" ")"
#   atom       := PREDICATE ["[" NAME "]"] "(" [NAME ("," NAME)*] [";" NAME ("," NAME)*] ")"
#   definition := atom ":=" body
#   SORT       := "V" | "E" | "Set(V)" | "Set(E)"
#
# Predicates with a bracketed pattern name stand for per-pattern building
# blocks that are referenced, not expanded.


def emit_mso(k: int, pats: Iterable) -> str:
    """The skeleton of the formula for budget ``k`` and patterns ``pats``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    pats = list(pats)
    xs = [f"{c}{i}" for i in range(1, k + 1) for c in ("x", "y")]
    ident = ", ".join(xs)
    lines = [f"# crossing budget k={k}, {len(pats)} forbidden pattern(s)", "phi :="]
    for v in xs:
        lines.append(f"  exists {v} : V.")
    if k > 0:
        lines.append("  exists M : Set(V).")
    conj = [f"PartiallyPredrawnPlanarAfterIdentifying({ident})"]
    if k > 0:
        conj.append(f"ValidMarkerFlagChoice(M; {ident})")
    names = []
    for i, p in enumerate(pats, 1):
        name = f"P{i}"
        names.append((name, p))
        zs = ", ".join(f"z{j}" for j in range(1, len(p.vertices) + 1))
        args = ", ".join(a for a in (zs, ident) if a)
        margs = ", ".join(a for a in (zs, "M" if k > 0 else "", ident) if a)
        conj.append(f"~(exists {zs} : V. (FormAbstractPInPlanarization[{name}]({args})"
                    f" & LikePiInEmbeddedPlanarization[{name}]({margs})))")
    lines.append("  (")
    lines.append("    " + conj[0])
    for c in conj[1:]:
        lines.append("    & " + c)
    lines.append("  )")
    if k > 0:
        lines.append(f"ValidMarkerFlagChoice(M; {ident}) := LocallyValidMarkerFlagChoice(M; {ident})"
                     f" & LabelComparison[k{k}](M)")
    for name, p in names:
        zs = ", ".join(f"z{j}" for j in range(1, len(p.vertices) + 1))
        margs = ", ".join(a for a in (zs, "M" if k > 0 else "", ident) if a)
        blocks = []
        if p.pi is not None:
            blocks.append(f"PiCycles[{name}]({zs})")
            blocks.append(f"ThreeConSep[{name}]({margs})")
        else:
            blocks.append("true")
        label = p.name or name
        lines.append(f"# {name}: {label}, |V|={len(p.vertices)}, |E|={p.graph.edge_count()}, "
                     f"|V_C|={len(p.vc)}, predrawn part {'present' if p.pi is not None else 'empty'}")
        lines.append(f"LikePiInEmbeddedPlanarization[{name}]({margs}) := " + " & ".join(blocks))
    return "\n".join(lines) + "\n"


__all__ = [
    "Framing",
    "InadmissibleS",
    "LabelBudgetExceeded",
    "MarkerSchema",
    "Not3Connected",
    "RotationMarkerLabel",
    "build_flip_aware",
    "build_framing",
    "check_framing",
    "closing_faces",
    "emit_mso",
    "faces_of",
    "admissible_edge_sets",
    "pruned_label_count",
    "separation_classes",
    "small_cut_vertices",
    "split_pieces",
    "three_con_sep",
]
