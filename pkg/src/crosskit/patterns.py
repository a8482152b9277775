"""Topological crossing patterns: the data type, validity checks, JSON
round-tripping and isomorphism.

A pattern is a small planar graph whose vertices and edges carry four
partitions: crossing versus real vertices, instance-predrawn versus
abstract elements, and contracted versus real edges. ``pi`` is a drawing of
a subgraph that fixes how parts of an occurrence separate each other.
``embedding`` optionally fixes the rotation at every pattern vertex (and,
if it records an outer face, which side of the pattern is unbounded).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Optional

import networkx as nx

from .drawing import CROSSING, REAL, CombinatorialDrawing, equivalent, trace_faces
from .graph import Edge, Graph, edge_key

# ----------------------------------------------------------------------
# the pattern type


@dataclass
class TopologicalCrossingPattern:
    graph: Graph
    vc: frozenset
    vphi: frozenset = frozenset()
    ep: frozenset = frozenset()
    ephi: frozenset = frozenset()
    vertex_colors: dict = field(default_factory=dict)
    edge_colors: dict = field(default_factory=dict)
    pi: Optional[CombinatorialDrawing] = None
    embedding: Optional[CombinatorialDrawing] = None
    name: str = ""

    def __post_init__(self):
        self.vc = frozenset(self.vc)
        self.vphi = frozenset(self.vphi)
        self.ep = frozenset(edge_key(*e) for e in self.ep)
        self.ephi = frozenset(edge_key(*e) for e in self.ephi)
        self.edge_colors = {edge_key(*e): c for e, c in self.edge_colors.items()}

    @property
    def vertices(self) -> list[str]:
        return self.graph.vertices

    @property
    def vr(self) -> frozenset:
        return frozenset(self.graph.vertices) - self.vc

    @property
    def va(self) -> frozenset:
        return frozenset(self.graph.vertices) - self.vphi

    @property
    def er(self) -> frozenset:
        return frozenset(self.graph.edges()) - self.ep

    @property
    def ea(self) -> frozenset:
        return frozenset(self.graph.edges()) - self.ephi

    def kind(self, v: str) -> str:
        return CROSSING if v in self.vc else REAL

    def crossing_budget(self) -> int:
        """Number of abstract crossing vertices, the quantity bounded by k."""
        return len(self.vc - self.vphi)

    def pi_vertices(self) -> frozenset:
        return frozenset(self.pi.graph.vertices) if self.pi is not None else frozenset()

    def pi_edges(self) -> frozenset:
        return frozenset(self.pi.graph.edges()) if self.pi is not None else frozenset()

    def __repr__(self) -> str:
        return (f"Pattern({self.name or '?'}: |V|={len(self.graph)}, |E|={self.graph.edge_count()}, "
                f"|V_C|={len(self.vc)}, |E_P|={len(self.ep)})")


@dataclass
class PatternSet:
    patterns: list
    declared_safety_level: Optional[int] = None

    def __iter__(self) -> Iterator[TopologicalCrossingPattern]:
        return iter(self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)


# ----------------------------------------------------------------------
# building drawings for patterns


def pattern_drawing(rotation: Mapping[str, Iterable[str]], kinds: Optional[Mapping[str, str]] = None, *,
                    outer_dart: Optional[tuple[str, str]] = None, regions: Optional[Iterable[Iterable[str]]] = None,
                    outer_region: Optional[Iterable[str]] = None) -> CombinatorialDrawing:
    """A drawing given by rotations; ``outer_dart`` names a dart whose left
    face is the unbounded face."""
    rot = {v: tuple(r) for v, r in rotation.items()}
    outer = None
    if outer_dart is not None:
        for i, f in enumerate(trace_faces(rot)):
            if tuple(outer_dart) in f:
                outer = i
                break
        if outer is None:
            raise ValueError(f"outer dart {outer_dart} is not a dart of the drawing")
    return CombinatorialDrawing.from_rotation(
        rot, kinds, outer_face=outer,
        regions=[frozenset(r) for r in regions] if regions is not None else None,
        outer_region=frozenset(outer_region) if outer_region is not None else None)


def relabel_drawing(cd: CombinatorialDrawing, mapping: Mapping[str, str]) -> CombinatorialDrawing:
    rot = {mapping[v]: tuple(mapping[w] for w in cd.rotation[v]) for v in cd.graph.vertices}
    outer_dart = None
    if cd.outer_face is not None and cd.faces[cd.outer_face]:
        a, b = cd.faces[cd.outer_face][0]
        outer_dart = (mapping[a], mapping[b])
    return pattern_drawing(
        rot, {mapping[v]: k for v, k in cd.kinds.items()}, outer_dart=outer_dart,
        regions=[[mapping[v] for v in r] for r in cd.regions] if cd.regions is not None else None,
        outer_region=[mapping[v] for v in cd.outer_region] if cd.outer_region is not None else None)


def restrict_drawing(cd: CombinatorialDrawing, vertices: Iterable[str], edges: Iterable[Edge]) -> CombinatorialDrawing:
    """Sub-drawing on the given vertices and edges, with face vertex sets and
    the unbounded face carried over from ``cd``."""
    keep = [v for v in cd.graph.vertices if v in set(vertices)]
    ks = set(keep)
    es = {edge_key(*e) for e in edges}
    rot = {v: tuple(w for w in cd.rotation[v] if w in ks and edge_key(v, w) in es) for v in keep}
    sub = CombinatorialDrawing.from_rotation(rot, {v: cd.kinds[v] for v in keep})
    # regions: union of faces of cd merged across dropped edges
    parent = list(range(len(cd.faces)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    face_of = cd.face_of_dart()
    for u, v in cd.graph.edges():
        if (u, v) not in es or u not in ks or v not in ks:
            a, b = find(face_of[(u, v)]), find(face_of[(v, u)])
            parent[max(a, b)] = min(a, b)
    members: dict[int, set[str]] = {}
    for v in keep:
        if not cd.rotation[v]:
            continue
        for w in cd.rotation[v]:
            members.setdefault(find(face_of[(v, w)]), set()).add(v)
    if not members:
        sub.regions = [frozenset(keep)] if keep else []
        return sub
    sub.regions = [frozenset(s) for _, s in sorted(members.items())]
    if cd.outer_face is not None:
        sub.outer_region = frozenset(members.get(find(cd.outer_face), set()))
    return sub


# ----------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class PatternViolation:
    name: str
    detail: str = ""

    def __str__(self) -> str:
        return f"{self.name}: {self.detail}" if self.detail else self.name


def validate_pattern(p: TopologicalCrossingPattern) -> list[PatternViolation]:
    """Every structural rule a pattern breaks, by name (empty when valid)."""
    out: list[PatternViolation] = []
    verts = set(p.graph.vertices)
    edges = set(p.graph.edges())
    for name, part, universe in (("VertexPartitionViolation", p.vc | p.vphi, verts),
                                 ("EdgePartitionViolation", p.ep | p.ephi, edges)):
        stray = sorted(part - universe)
        if stray:
            out.append(PatternViolation(name, f"unknown elements {stray}"))
    is_planar, _ = nx.check_planarity(_nx_graph(p.graph))
    if not is_planar:
        out.append(PatternViolation("NonPlanarPattern"))
    for u, v in sorted(p.ephi):
        if u not in p.vphi or v not in p.vphi:
            out.append(PatternViolation("EphiEndpointsViolation", f"{u}-{v}"))
    for comp in p.graph.components():
        if not set(comp) & p.vc:
            out.append(PatternViolation("ComponentWithoutCrossing", ",".join(sorted(comp))))
    for u, v in sorted(p.ep):
        if not {u, v} <= (p.vc & p.va):
            out.append(PatternViolation("CrossingLocalityViolation", f"{u}-{v}"))
    for v in sorted(p.vertex_colors):
        if v not in p.vr:
            out.append(PatternViolation("ColorDomainViolation", f"vertex {v} is not real"))
    for e in sorted(p.edge_colors):
        if e not in p.ep:
            out.append(PatternViolation("ColorDomainViolation", f"edge {e[0]}-{e[1]} is not contracted"))
    if p.pi is not None:
        out.extend(_pi_violations(p))
    if p.embedding is not None:
        emb = p.embedding
        if set(emb.graph.vertices) != verts or set(emb.graph.edges()) != edges:
            out.append(PatternViolation("EmbeddingMismatch", "embedding is not a drawing of the pattern graph"))
        elif not emb.euler_ok():
            out.append(PatternViolation("EmbeddingMismatch", "embedding is not planar"))
        elif p.pi is not None and p.pi.graph.edges():
            restricted = restrict_drawing(emb, p.pi.graph.vertices, p.pi.graph.edges())
            if not equivalent(restricted, p.pi, sphere=p.pi.outer_face_vertices() is None):
                out.append(PatternViolation("EmbeddingMismatch", "pattern predrawing disagrees with the embedding"))
    return out


def _pi_violations(p: TopologicalCrossingPattern) -> list[PatternViolation]:
    out = []
    pi = p.pi
    pv = set(pi.graph.vertices)
    if not pv <= set(p.graph.vertices) or not all(p.graph.has_edge(*e) for e in pi.graph.edges()):
        return [PatternViolation("PiNotSubgraph")]
    closed = set(p.vc)
    for v in p.vc:
        closed.update(p.graph.neighbors(v))
    for comp in pi.graph.components():
        if not set(comp) & closed:
            out.append(PatternViolation("PiComponentWithoutCrossingNeighborhood", ",".join(sorted(comp))))
    ends_of_abstract = {x for e in p.ea for x in e}
    for v in sorted(pv & ends_of_abstract):
        deg = sum(1 for w in pi.graph.neighbors(v) if w in ends_of_abstract)
        if deg > 2:
            out.append(PatternViolation("SideSpecificationViolation", f"{v} has degree {deg}"))
    if pi.graph.edges() and not pi.euler_ok():
        out.append(PatternViolation("PiNotPlanar"))
    return out


# ----------------------------------------------------------------------
# isomorphism


def _nx_graph(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.edges())
    return h


def _labelled(p: TopologicalCrossingPattern) -> nx.Graph:
    h = nx.Graph()
    piv, pie = p.pi_vertices(), p.pi_edges()
    for v in p.graph.vertices:
        h.add_node(v, label=f"{p.kind(v)}|{v in p.vphi}|{p.vertex_colors.get(v, '')}|{v in piv}")
    for e in p.graph.edges():
        h.add_edge(*e, label=f"{e in p.ep}|{e in p.ephi}|{p.edge_colors.get(e, '')}|{e in pie}")
    return h


def pattern_signature(p: TopologicalCrossingPattern) -> str:
    """An isomorphism invariant used to bucket candidates."""
    h = _labelled(p)
    return nx.weisfeiler_lehman_graph_hash(h, node_attr="label", edge_attr="label", iterations=3)


def _drawings_agree(a: Optional[CombinatorialDrawing], b: Optional[CombinatorialDrawing],
                    mapping: Mapping[str, str]) -> bool:
    if a is None or b is None:
        return a is None and b is None
    moved = relabel_drawing(a, mapping)
    try:
        return equivalent(moved, b)
    except Exception:
        return False


def isomorphic(p: TopologicalCrossingPattern, q: TopologicalCrossingPattern) -> bool:
    """Isomorphism respecting all partitions, colors, the pattern predrawing
    and the embedding, each up to a global reflection."""
    if len(p.graph) != len(q.graph) or p.graph.edge_count() != q.graph.edge_count():
        return False
    gp, gq = _labelled(p), _labelled(q)
    matcher = nx.algorithms.isomorphism.GraphMatcher(
        gp, gq, node_match=lambda x, y: x["label"] == y["label"], edge_match=lambda x, y: x["label"] == y["label"])
    for mapping in matcher.isomorphisms_iter():
        if _drawings_agree(p.pi, q.pi, mapping) and _drawings_agree(p.embedding, q.embedding, mapping):
            return True
    return False


def canonical_code(p: TopologicalCrossingPattern) -> Optional[tuple]:
    """Canonical form of a pattern with a connected embedding, else None.

    Every dart and both orientations are tried as the root of a breadth
    first numbering that follows the rotations; the smallest resulting code
    is invariant under relabeling and reflection.
    """
    emb = p.embedding
    if emb is None or not p.graph.vertices or not p.graph.is_connected():
        return None
    rot = emb.rotation
    piv, pie = p.pi_vertices(), p.pi_edges()
    vlabel = {v: (p.kind(v), v in p.vphi, p.vertex_colors.get(v, ""), v in piv) for v in p.graph.vertices}
    elabel = {e: (e in p.ep, e in p.ephi, p.edge_colors.get(e, ""), e in pie) for e in p.graph.edges()}
    outer = set(emb.faces[emb.outer_face]) if emb.outer_face is not None else None
    regions = p.pi.face_vertex_sets() if p.pi is not None else []
    pi_outer = p.pi.outer_face_vertices() if p.pi is not None else None
    best = None
    if len(p.graph) == 1:
        v = p.graph.vertices[0]
        return ((vlabel[v], ()),)
    for v0 in p.graph.vertices:
        for w0 in rot[v0]:
            for o in (1, -1):
                index = {v0: 0}
                ref = {v0: w0}
                order = [v0]
                code = []
                i = 0
                while i < len(order):
                    x = order[i]
                    i += 1
                    nb = list(rot[x]) if o == 1 else list(reversed(rot[x]))
                    if nb:
                        k = nb.index(ref[x])
                        nb = nb[k:] + nb[:k]
                    row = []
                    for y in nb:
                        if y not in index:
                            index[y] = len(order)
                            ref[y] = x
                            order.append(y)
                        row.append((index[y], elabel[edge_key(x, y)]))
                    code.append((vlabel[x], tuple(row)))
                extra = []
                if outer is not None:
                    darts = outer if o == 1 else {(b, a) for a, b in outer}
                    extra.append(tuple(sorted((index[a], index[b]) for a, b in darts)))
                extra.append(tuple(sorted(tuple(sorted(index[v] for v in r)) for r in regions)))
                if pi_outer is not None:
                    extra.append(tuple(sorted(index[v] for v in pi_outer)))
                full = (tuple(code), tuple(extra))
                if best is None or full < best:
                    best = full
    return best


class PatternIndex:
    """Deduplicating collection of patterns.

    Patterns with a connected embedding are keyed by their canonical code;
    others are bucketed by signature and compared pairwise.
    """

    def __init__(self):
        self.codes: dict = {}
        self.buckets: dict[str, list[TopologicalCrossingPattern]] = {}
        self.order: list[TopologicalCrossingPattern] = []

    def find(self, p: TopologicalCrossingPattern) -> Optional[TopologicalCrossingPattern]:
        code = canonical_code(p)
        if code is not None:
            return self.codes.get(code)
        for q in self.buckets.get(pattern_signature(p), []):
            if isomorphic(p, q):
                return q
        return None

    def add(self, p: TopologicalCrossingPattern) -> bool:
        code = canonical_code(p)
        if code is not None:
            if code in self.codes:
                return False
            self.codes[code] = p
            self.order.append(p)
            return True
        sig = pattern_signature(p)
        for q in self.buckets.get(sig, []):
            if isomorphic(p, q):
                return False
        self.buckets.setdefault(sig, []).append(p)
        self.order.append(p)
        return True

    def __len__(self) -> int:
        return len(self.order)


# ----------------------------------------------------------------------
# .pat.json


def _drawing_to_dict(cd: CombinatorialDrawing) -> dict:
    out: dict[str, Any] = {"rotation": {v: list(cd.rotation[v]) for v in sorted(cd.graph.vertices)}}
    if cd.outer_face is not None:
        out["outer_face"] = [a for a, _ in cd.faces[cd.outer_face]]
        out["outer_dart"] = list(cd.faces[cd.outer_face][0])
    if cd.regions is not None:
        out["faces"] = sorted(sorted(r) for r in cd.regions)
    if cd.outer_region is not None:
        out["outer_region"] = sorted(cd.outer_region)
    return out


def _drawing_from_dict(data: dict, kinds: Mapping[str, str]) -> CombinatorialDrawing:
    rot = {str(v): [str(w) for w in r] for v, r in data["rotation"].items()}
    outer_dart = tuple(data["outer_dart"]) if "outer_dart" in data else None
    if outer_dart is None and data.get("outer_face"):
        walk = data["outer_face"]
        outer_dart = (walk[0], walk[1 % len(walk)])
    return pattern_drawing(rot, {v: kinds.get(v, REAL) for v in rot}, outer_dart=outer_dart,
                           regions=data.get("faces"), outer_region=data.get("outer_region"))


def pattern_to_dict(p: TopologicalCrossingPattern) -> dict:
    piv, pie = p.pi_vertices(), p.pi_edges()
    verts = []
    for v in p.graph.vertices:
        item: dict[str, Any] = {"id": v, "kind": p.kind(v), "instance_predrawn": v in p.vphi}
        if v in p.vertex_colors:
            item["color"] = p.vertex_colors[v]
        if v in piv:
            item["pattern_predrawn"] = True
        verts.append(item)
    edges = []
    for e in p.graph.edges():
        item = {"ends": list(e), "kind": "contracted" if e in p.ep else "real",
                "instance_predrawn": e in p.ephi, "pattern_predrawn": e in pie}
        if e in p.edge_colors:
            item["color"] = p.edge_colors[e]
        edges.append(item)
    out: dict[str, Any] = {"vertices": verts, "edges": edges}
    if p.name:
        out["name"] = p.name
    out["pi"] = _drawing_to_dict(p.pi) if p.pi is not None else {"rotation": {}}
    if p.embedding is not None:
        out["embedding"] = _drawing_to_dict(p.embedding)
    return out


def pattern_from_dict(data: dict) -> TopologicalCrossingPattern:
    verts = [str(v["id"]) for v in data["vertices"]]
    kinds = {str(v["id"]): v.get("kind", REAL) for v in data["vertices"]}
    for v, k in kinds.items():
        if k not in (REAL, CROSSING):
            raise ValueError(f"vertex {v} has unknown kind {k!r}")
    edges = [edge_key(*(str(x) for x in e["ends"])) for e in data["edges"]]
    g = Graph(verts, edges)
    pi = None
    pi_data = data.get("pi") or {}
    if pi_data.get("rotation"):
        pi = _drawing_from_dict(pi_data, kinds)
    elif pi_data.get("faces"):
        pi = _drawing_from_dict(pi_data, kinds)
    emb = _drawing_from_dict(data["embedding"], kinds) if "embedding" in data else None
    return TopologicalCrossingPattern(
        g,
        vc={v for v, k in kinds.items() if k == CROSSING},
        vphi={str(v["id"]) for v in data["vertices"] if v.get("instance_predrawn")},
        ep={edge_key(*map(str, e["ends"])) for e in data["edges"] if e.get("kind") == "contracted"},
        ephi={edge_key(*map(str, e["ends"])) for e in data["edges"] if e.get("instance_predrawn")},
        vertex_colors={str(v["id"]): v["color"] for v in data["vertices"] if "color" in v},
        edge_colors={edge_key(*map(str, e["ends"])): e["color"] for e in data["edges"] if "color" in e},
        pi=pi, embedding=emb, name=data.get("name", ""))


def pattern_set_to_list(s: Iterable[TopologicalCrossingPattern]) -> list:
    return [pattern_to_dict(p) for p in s]


def pattern_set_from_list(items: list) -> PatternSet:
    if not isinstance(items, list):
        raise ValueError("a pattern set file holds a JSON array")
    return PatternSet([pattern_from_dict(d) for d in items])
