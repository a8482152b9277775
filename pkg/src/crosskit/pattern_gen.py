"""Generators for the fan-planar and pseudolinear pattern families, and the
contraction-safety check.

Patterns are built from an embedding of the whole pattern graph plus the
sets of vertices and edges drawn in the pattern predrawing; the predrawing
itself is always derived from the embedding so the two cannot disagree.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, combinations_with_replacement, product
from typing import Iterable, Iterator, Optional

from .drawing import CROSSING, REAL, euler_characteristic_ok, is_left_of_path
from .graph import Edge, Graph, edge_key
from .limits import SizeLimitExceeded, budget as resolve_budget
from .patterns import (PatternIndex, PatternSet, TopologicalCrossingPattern, pattern_drawing, restrict_drawing,
                       validate_pattern)

BLUE = "blue"


# ----------------------------------------------------------------------
# assembling patterns


class _Draft:
    """Mutable pattern under construction."""

    def __init__(self, rotation: dict, crossings: Iterable[str], *, ep: Iterable[Edge] = (),
                 edge_colors: Optional[dict] = None, pi_vertices: Iterable[str] = (), pi_edges: Iterable[Edge] = (),
                 outer_dart: Optional[tuple] = None, name: str = ""):
        self.rotation = {v: list(r) for v, r in rotation.items()}
        self.vc = set(crossings)
        self.ep = {edge_key(*e) for e in ep}
        self.edge_colors = {edge_key(*e): c for e, c in (edge_colors or {}).items()}
        self.pi_vertices = set(pi_vertices)
        self.pi_edges = {edge_key(*e) for e in pi_edges}
        self.outer_dart = outer_dart
        self.name = name
        self.fresh = 0

    def copy(self) -> "_Draft":
        d = _Draft(self.rotation, self.vc, ep=self.ep, edge_colors=self.edge_colors, pi_vertices=self.pi_vertices,
                   pi_edges=self.pi_edges, outer_dart=self.outer_dart, name=self.name)
        d.fresh = self.fresh
        return d

    def new_name(self) -> str:
        while True:
            self.fresh += 1
            name = f"s{self.fresh}"
            if name not in self.rotation:
                return name

    def subdivide(self, a: str, b: str) -> str:
        """Insert a new crossing vertex on edge a-b; returns its name."""
        s = self.new_name()
        e = edge_key(a, b)
        was_pi = e in self.pi_edges
        ra, rb = self.rotation[a], self.rotation[b]
        ra[ra.index(b)] = s
        rb[rb.index(a)] = s
        self.rotation[s] = [a, b]
        self.vc.add(s)
        for part in (self.ep, self.pi_edges):
            if e in part:
                part.discard(e)
                part.update({edge_key(a, s), edge_key(s, b)})
        if e in self.edge_colors:
            c = self.edge_colors.pop(e)
            self.edge_colors[edge_key(a, s)] = c
            self.edge_colors[edge_key(s, b)] = c
        if was_pi:
            self.pi_vertices.add(s)
        if self.outer_dart == (a, b):
            self.outer_dart = (a, s)
        elif self.outer_dart == (b, a):
            self.outer_dart = (b, s)
        return s

    def identify(self, y1: str, y2: str, flip: bool) -> Optional[str]:
        """Merge two degree-2 vertices into one crossing of their paths."""
        a1, a2 = self.rotation[y1]
        b1, b2 = self.rotation[y2]
        if len({a1, a2, b1, b2, y1, y2}) < 6:
            return None
        y = self.new_name()
        self.rotation[y] = [a1, b2, a2, b1] if flip else [a1, b1, a2, b2]
        for old, nbrs in ((y1, (a1, a2)), (y2, (b1, b2))):
            for w in nbrs:
                r = self.rotation[w]
                r[r.index(old)] = y
                ek, nk = edge_key(old, w), edge_key(y, w)
                for part in (self.ep, self.pi_edges):
                    if ek in part:
                        part.discard(ek)
                        part.add(nk)
                if ek in self.edge_colors:
                    self.edge_colors[nk] = self.edge_colors.pop(ek)
            del self.rotation[old]
            self.vc.discard(old)
            self.pi_vertices.discard(old)
            if self.outer_dart is not None:
                u, w = self.outer_dart
                self.outer_dart = (y if u == old else u, y if w == old else w)
        self.vc.add(y)
        return y

    def planar(self) -> bool:
        return euler_characteristic_ok(self.rotation)

    def edges(self) -> list[Edge]:
        return sorted({edge_key(v, w) for v, r in self.rotation.items() for w in r})

    def build(self, plane: bool) -> TopologicalCrossingPattern:
        verts = sorted(self.rotation)
        g = Graph(verts, self.edges())
        kinds = {v: CROSSING if v in self.vc else REAL for v in verts}
        emb = pattern_drawing(self.rotation, kinds, outer_dart=self.outer_dart if plane else None)
        pi = None
        if self.pi_vertices:
            pi = restrict_drawing(emb, self.pi_vertices, self.pi_edges)
            if not plane:
                pi.outer_region = None
        return TopologicalCrossingPattern(g, vc=self.vc, ep=self.ep, edge_colors=self.edge_colors, pi=pi,
                                          embedding=emb, name=self.name)


def _curve_embeddings(curves: list[list[str]]) -> Iterator[dict]:
    """All planar rotation systems in which every interior point shared by
    two curves is a proper crossing (the curves alternate around it)."""
    passes: dict[str, list[tuple[str, str]]] = {}
    ends: dict[str, list[str]] = {}
    for c in curves:
        for i, v in enumerate(c):
            if 0 < i < len(c) - 1:
                passes.setdefault(v, []).append((c[i - 1], c[i + 1]))
            else:
                ends.setdefault(v, []).append(c[1] if i == 0 else c[-2])
    crossings = sorted(v for v, ps in passes.items() if len(ps) == 2)
    for choice in product((False, True), repeat=len(crossings)):
        rot: dict[str, list[str]] = {}
        for v, nb in ends.items():
            rot[v] = sorted(nb)
        for v, ps in passes.items():
            if len(ps) == 1 and v not in crossings:
                rot[v] = sorted(set(rot.get(v, [])) | set(ps[0]))
        for v, flip in zip(crossings, choice):
            (p1, n1), (p2, n2) = passes[v]
            rot[v] = [p1, n2, n1, p2] if flip else [p1, p2, n1, n2]
        if euler_characteristic_ok(rot):
            yield rot


def _dedup(drafts: Iterable[_Draft], plane: bool) -> list[TopologicalCrossingPattern]:
    index = PatternIndex()
    for d in drafts:
        index.add(d.build(plane))
    return list(index.order)


# ----------------------------------------------------------------------
# fan-planar


def fanplanar_bases() -> list[_Draft]:
    """Configuration I, configuration II, and configuration I with the two
    crossing edges also crossing each other (every embedding type)."""
    out = []
    curves_i = [["u", "x1", "x2", "w"], ["a1", "x1", "a2"], ["b1", "x2", "b2"]]
    rot = next(_curve_embeddings(curves_i))
    out.append(_Draft(rot, {"x1", "x2"}, name="fan-I"))
    curves_ii = [["u", "x1", "x2", "w"], ["v", "x1", "a"], ["v", "x2", "b"]]
    for rot in _curve_embeddings(curves_ii):
        # ends of the crossed edge on different sides of v -> x1 -> x2 -> v
        left_u = is_left_of_path(rot, "v", "x1", "x2", "u")
        left_w = is_left_of_path(rot, "x1", "x2", "v", "w")
        if left_u != left_w:
            out.append(_Draft(rot, {"x1", "x2"}, pi_vertices={"v", "x1", "x2", "u", "w"},
                              pi_edges={("v", "x1"), ("x1", "x2"), ("v", "x2")}, name="fan-II"))
            break
    curves_t = [["u", "x1", "x2", "w"], ["a1", "x1", "y", "a2"], ["b1", "x2", "y", "b2"]]
    for i, rot in enumerate(_curve_embeddings(curves_t)):
        out.append(_Draft(rot, {"x1", "x2", "y"}, name=f"fan-I-triangle-{i}"))
    return out


def _subdivide_many(d: _Draft, chosen: Iterable[Edge]) -> list[str]:
    """Subdivide the listed edges (repeats stack along the same edge)."""
    last: dict[Edge, str] = {}
    fresh = []
    for a, b in chosen:
        cur = last.get((a, b), a)
        s = d.subdivide(cur, b)
        last[(a, b)] = s
        fresh.append(s)
    return fresh


def _subdivisions(base: _Draft, count: int, edges: Optional[list[Edge]] = None) -> Iterator[_Draft]:
    edges = base.edges() if edges is None else edges
    for chosen in combinations_with_replacement(edges, count):
        d = base.copy()
        _subdivide_many(d, chosen)
        if chosen:
            d.name = base.name + "+" + ",".join(f"{a}-{b}" for a, b in chosen)
        yield d


def gen_fanplanar_patterns(k: int) -> PatternSet:
    """The four base patterns plus every subdivision of their edges by at
    most ``k`` further crossing vertices, up to isomorphism."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return PatternSet(list(_fanplanar_cached(k)))


@lru_cache(maxsize=None)
def _fanplanar_cached(k: int) -> tuple:
    drafts = []
    for base in fanplanar_bases():
        for s in range(k + 1):
            drafts.extend(_subdivisions(base, s))
    return tuple(_dedup(drafts, plane=False))


# ----------------------------------------------------------------------
# pseudolinear


def _obstruction_draft(real_corners: int, pendant_kinds: tuple) -> _Draft:
    """A closed curve through three corners (the first ``real_corners`` of
    them real vertices) with both continuations at every crossing corner
    starting into the bounded side."""
    corners = [f"c{i}" for i in range(3)]
    rot: dict[str, list[str]] = {}
    crossings = set(corners[real_corners:])
    pendants = []
    kinds_iter = iter(pendant_kinds)
    for i, c in enumerate(corners):
        prev, nxt = corners[i - 1], corners[(i + 1) % 3]
        if c not in crossings:
            rot[c] = [nxt, prev]
            continue
        pa, pb = f"p{i}a", f"p{i}b"
        rot[c] = [nxt, pa, pb, prev]
        for pv in (pa, pb):
            rot[pv] = [c]
            pendants.append(pv)
            if next(kinds_iter) == CROSSING:
                crossings.add(pv)
    cycle = [(corners[i], corners[(i + 1) % 3]) for i in range(3)]
    return _Draft(rot, crossings, pi_vertices=set(rot), pi_edges=cycle, outer_dart=(corners[1], corners[0]),
                  name=f"pl-O{real_corners}-" + "".join("C" if k == CROSSING else "R" for k in pendant_kinds))


def pseudolinear_bases(k: int) -> list[_Draft]:
    out = []
    for real in (0, 1, 2):
        n_pend = 2 * (3 - real)
        for kinds in product((REAL, CROSSING), repeat=n_pend):
            d = _obstruction_draft(real, kinds)
            if len(d.vc) <= k:
                out.append(d)
    return out


def _cycle_edges(d: _Draft) -> list[Edge]:
    # the cycle is the part of the pattern predrawing at the start
    return sorted(d.pi_edges)


def _blue_variants(d: _Draft) -> Iterator[_Draft]:
    cyc = [e for e in _cycle_edges(d) if e[0] in d.vc and e[1] in d.vc]
    for r in range(1, len(cyc) + 1):
        for blue in combinations(cyc, r):
            v = d.copy()
            ends = {x for e in blue for x in e}
            v.ep = set(blue)
            v.edge_colors = {e: BLUE for e in blue}
            v.pi_edges = {e for e in d.pi_edges if e not in blue and not set(e) & ends}
            v.pi_vertices = set(d.pi_vertices) - ends
            v.name = d.name + "|blue:" + ",".join(f"{a}-{b}" for a, b in blue)
            yield v


def _matchings(items: list) -> Iterator[list[tuple]]:
    """All sets of disjoint pairs (including the empty set)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for m in _matchings(rest):
        yield m
    for i, other in enumerate(rest):
        for m in _matchings(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + m


def _contracted_closure(d: _Draft, k: int, limit: int) -> Iterator[_Draft]:
    """Subdivisions of the contracted edges by new crossing vertices with
    pairs of them identified, keeping at most k abstract crossings."""
    room = k - len(d.vc)
    produced = 0
    if room <= 0:
        return
    ep = sorted(d.ep)
    for t in range(1, 2 * room + 1):
        for chosen in combinations_with_replacement(ep, t):
            base = d.copy()
            fresh = _subdivide_many(base, chosen)
            for pairs in _matchings(fresh):
                if t - len(pairs) > room:
                    continue
                for flips in product((False, True), repeat=len(pairs)):
                    v = base.copy()
                    ok = True
                    for (y1, y2), flip in zip(pairs, flips):
                        if v.identify(y1, y2, flip) is None:
                            ok = False
                            break
                    if not ok or not v.planar():
                        continue
                    produced += 1
                    if produced > limit:
                        raise SizeLimitExceeded(f"contraction closure passed {limit} patterns")
                    v.name = d.name + f"|sub{t}" + (f"|id{len(pairs)}" if pairs else "")
                    yield v


def gen_pseudolinear_patterns(k: int, with_predrawing: bool, *, limit: Optional[int] = None) -> PatternSet:
    """Pseudolinear obstruction patterns with at most ``k`` abstract crossing
    vertices.

    Each member is one obstruction: a closed curve through three corners
    with all continuations pointing into the bounded side, the curve and
    every vertex drawn in the pattern predrawing, and the unbounded face
    recorded. With ``with_predrawing`` the blue contracted variants and
    their contraction closure are added.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    cap = resolve_budget(200_000, limit)
    return PatternSet(list(_pseudolinear_cached(k, with_predrawing, cap)),
                      declared_safety_level=k if with_predrawing else None)


@lru_cache(maxsize=None)
def _pseudolinear_cached(k: int, with_predrawing: bool, cap: int) -> tuple:
    drafts: list[_Draft] = []
    for base in pseudolinear_bases(k):
        room = k - len(base.vc)
        cycle = _cycle_edges(base)
        for s in range(room + 1):
            drafts.extend(_subdivisions(base, s, cycle))
    primed = _dedup(drafts, plane=True)
    if not with_predrawing:
        return tuple(primed)
    index = PatternIndex()
    for p in primed:
        index.add(p)
    # blue variants start from every subdivided member
    for d in drafts:
        for v in _blue_variants(d):
            index.add(v.build(plane=True))
            for w in _contracted_closure(v, k, cap):
                index.add(w.build(plane=True))
    return tuple(index.order)


# ----------------------------------------------------------------------
# contraction safety


def _draft_from_pattern(p: TopologicalCrossingPattern) -> _Draft:
    emb = p.embedding
    if emb is None:
        raise ValueError(f"pattern {p.name!r} has no embedding to subdivide")
    outer = emb.faces[emb.outer_face][0] if emb.outer_face is not None and emb.faces else None
    d = _Draft(emb.rotation, p.vc, ep=p.ep, edge_colors=p.edge_colors,
               pi_vertices=p.pi_vertices(), pi_edges=p.pi_edges(), outer_dart=outer, name=p.name)
    return d


def _elementary_steps(d: _Draft) -> Iterator[_Draft]:
    """One new vertex on one contracted edge, or two new vertices on two
    contracted edges identified into a crossing."""
    for a, b in sorted(d.ep):
        v = d.copy()
        v.subdivide(a, b)
        yield v
    for (a, b), (c, e) in combinations(sorted(d.ep), 2):
        for flip in (False, True):
            v = d.copy()
            y1 = v.subdivide(a, b)
            y2 = v.subdivide(c, e)
            if v.identify(y1, y2, flip) is not None and v.planar():
                yield v


def is_k_contraction_safe(s: Iterable[TopologicalCrossingPattern], k: int, *, limit: Optional[int] = None) -> bool:
    """Whether subdividing contracted edges by new crossing vertices (with
    optional pairwise identification) never leaves the set while at most k
    abstract crossing vertices are used.

    Checked through single steps: any longer sequence passes through members.
    """
    members = list(s)
    cap = resolve_budget(200_000, limit)
    for p in members:
        bad = [str(x) for x in validate_pattern(p)]
        if bad:
            raise ValueError(f"pattern {p.name!r} is invalid: {bad}")
        if len(p.graph) > 40:
            raise SizeLimitExceeded(f"pattern {p.name!r} has more than 40 vertices")
    index = PatternIndex()
    for p in members:
        index.add(p)
    checked = 0
    for p in members:
        if not p.ep:
            continue
        plane = p.embedding is not None and p.embedding.outer_face is not None
        for step in _elementary_steps(_draft_from_pattern(p)):
            if len(step.vc) > k:
                continue
            checked += 1
            if checked > cap:
                raise SizeLimitExceeded(f"closure check passed {cap} candidates")
            if index.find(step.build(plane)) is None:
                return False
    return True
