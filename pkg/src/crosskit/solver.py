"""Desk-scale decision procedures: partially predrawn planarity and the
pattern-constrained crossing number of a partially predrawn graph.

Both work by exhaustive search. Embeddings are built by inserting edges
one at a time into faces that hold both endpoints, which reaches every
planar rotation system of a connected graph exactly once for a fixed
insertion order. Rotations at predrawn vertices are pruned against the
predrawing as soon as they are partially known.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement, permutations, product
from typing import Iterable, Iterator, Optional

import planarity

from .drawing import (
    CROSSING,
    REAL,
    CombinatorialDrawing,
    PartiallyPredrawnGraph,
    rotation_components,
    trace_faces,
)
from .graph import Edge, Graph, edge_key
from .limits import BudgetExceeded, Counter, budget as resolve_budget
from .occurrence import occurs
from .patterns import PatternSet, restrict_drawing

BLUE = "blue"


class UnsafePatternSet(ValueError):
    """A pattern set declares a contraction-safety level it does not meet."""


# ----------------------------------------------------------------------
# crossing configurations


@dataclass
class CrossingConfiguration:
    """Pairs of crossing possibilities that become crossings.

    A possibility is ``(original edge, index)``. On an edge that is not
    predrawn the index is the position of the crossing along the edge,
    counted from its first endpoint. On a predrawn edge with ``s`` segments
    between predrawn crossings, index ``i`` lies on segment ``i // k``.
    """

    identified_pairs: list = field(default_factory=list)

    def problems(self, k: int) -> list[str]:
        out = []
        seen = set()
        for a, b in self.identified_pairs:
            for x in (a, b):
                if x in seen:
                    out.append(f"possibility {x} is used twice")
                seen.add(x)
            if a[0] == b[0]:
                out.append(f"pair {a}, {b} lies on one edge")
        if len(self.identified_pairs) > k:
            out.append(f"{len(self.identified_pairs)} pairs exceed k={k}")
        return out

    def as_dict(self) -> dict:
        return {"identified_pairs": [[[list(a[0]), a[1]], [list(b[0]), b[1]]] for a, b in self.identified_pairs]}


# ----------------------------------------------------------------------
# embedding enumeration


class _GammaGuide:
    """Predrawn rotations expressed on the planarized graph under search."""

    def __init__(self, gamma: Optional[CombinatorialDrawing], directions: dict):
        self.gamma = gamma
        # directions[v][w] = neighbour of v in the predrawing reached via w
        self.directions = directions
        self.rot = {v: gamma.rotation[v] for v in directions} if gamma is not None else {}

    def consistent(self, v: str, order: list, orient: int) -> bool:
        dirs = self.directions.get(v)
        if not dirs:
            return True
        seq = [dirs[w] for w in order if w in dirs]
        if len(seq) < 3:
            return True
        target = self.rot[v] if orient == 1 else tuple(reversed(self.rot[v]))
        pos = [target.index(d) for d in seq]
        descents = sum(1 for i in range(len(pos)) if pos[i] > pos[(i + 1) % len(pos)])
        return descents == 1


def _insertion_order(adj: dict, start: str, gamma_edges: set) -> list[Edge]:
    placed = {start}
    remaining = {edge_key(u, w) for u in adj for w in adj[u]}
    order = []
    while remaining:
        best = None
        for e in sorted(remaining):
            a, b = e
            if a not in placed and b not in placed:
                continue
            key = (0 if a in placed and b in placed else 1, 0 if e in gamma_edges else 1, e)
            if best is None or key < best[0]:
                best = (key, e)
        if best is None:
            raise ValueError("insertion order needs a connected graph")
        e = best[1]
        remaining.discard(e)
        placed.update(e)
        order.append(e)
    return order


def _embeddings(adj: dict, guide: _GammaGuide, orient: int, counter: Counter,
                gamma_edges: set = frozenset()) -> Iterator[dict]:
    """Every planar rotation system of the connected graph ``adj`` whose
    predrawn rotations agree with ``guide`` in orientation ``orient``."""
    verts = sorted(adj)
    if not verts:
        yield {}
        return
    start = max(verts, key=lambda v: (v in guide.directions, len(adj[v]), v))
    if not adj[start]:
        yield {start: ()}
        return
    order = _insertion_order(adj, start, gamma_edges)
    rot: dict[str, list] = {start: []}

    def ok(x):
        return guide.consistent(x, rot[x], orient)

    def step(i):
        counter.tick()
        if i == len(order):
            yield {v: tuple(r) for v, r in rot.items()}
            return
        a, b = order[i]
        if b not in rot or a not in rot:
            u, v = (a, b) if a in rot else (b, a)
            slots = range(max(1, len(rot[u])))
            rot[v] = [u]
            for s in slots:
                pos = s + 1 if rot[u] else 0
                rot[u].insert(pos, v)
                if ok(u):
                    yield from step(i + 1)
                rot[u].pop(pos)
            del rot[v]
            return
        face_of = {}
        for fi, f in enumerate(trace_faces(rot)):
            for d in f:
                face_of[d] = fi
        for sa in range(len(rot[a])):
            fa = face_of[(a, rot[a][sa])]
            for sb in range(len(rot[b])):
                if face_of[(b, rot[b][sb])] != fa:
                    continue
                rot[a].insert(sa + 1, b)
                rot[b].insert(sb + 1, a)
                if ok(a) and ok(b):
                    yield from step(i + 1)
                rot[a].pop(sa + 1)
                rot[b].pop(sb + 1)

    yield from step(0)


# ----------------------------------------------------------------------
# the planarized graph of a configuration


@dataclass
class _Layout:
    """A candidate planarization before it is embedded."""

    adj: dict
    kinds: dict
    colors: dict
    backmap: dict
    gamma_vertices: frozenset
    gamma_edges: frozenset
    directions: dict


def _fresh_prefix(names: Iterable[str], base: str) -> str:
    names = list(names)
    prefix = base
    while any(n.startswith(prefix) for n in names):
        prefix += "_"
    return prefix


class _Instance:
    """Original edges, predrawn segments and crossing carriers of an instance."""

    def __init__(self, inst: PartiallyPredrawnGraph, gamma_color: Optional[str]):
        self.inst = inst
        self.graph = inst.graph
        self.gamma = inst.gamma_planarization() if not inst.is_empty() else None
        self.gamma_set = set(inst.gamma_edges)
        self.gamma_color = gamma_color
        g = self.gamma
        self.gamma_paths: dict[Edge, tuple] = dict(g.edge_backmap) if g is not None else {}
        # carriers: (original edge, segment index)
        self.carriers: list[tuple[Edge, int]] = []
        for e in self.graph.edges():
            if e in self.gamma_paths:
                for s in range(len(self.gamma_paths[e]) - 1):
                    self.carriers.append((e, s))
            else:
                self.carriers.append((e, 0))
        names = list(self.graph.vertices) + (list(g.graph.vertices) if g is not None else [])
        self.prefix = _fresh_prefix(names, "y")

    def pairs(self, simple: bool) -> list[tuple]:
        out = []
        for c1, c2 in combinations(self.carriers, 2):
            e, f = c1[0], c2[0]
            if e == f or (e in self.gamma_set and f in self.gamma_set):
                continue
            if simple and set(e) & set(f):
                continue
            out.append((c1, c2))
        return out

    def layout(self, pairs: tuple, orders: dict) -> Optional[_Layout]:
        """Planarized graph for the chosen pairs; ``orders[carrier]`` lists
        crossing ids in order along the carrier. None when the result would
        have parallel edges."""
        g = self.gamma
        kinds = {v: REAL for v in self.graph.vertices}
        colors = dict(self.graph.colors)
        if g is not None:
            for v in g.graph.vertices:
                kinds.setdefault(v, g.kinds[v])
                if g.kinds[v] == CROSSING and self.gamma_color:
                    colors[v] = self.gamma_color
        names = {i: f"{self.prefix}{i}" for i in range(len(pairs))}
        for n in names.values():
            kinds[n] = CROSSING
        backmap = {}
        adj: dict[str, set] = {v: set() for v in kinds}
        gamma_edges = set()
        count = 0
        directions: dict[str, dict] = {}
        for e in self.graph.edges():
            if e in self.gamma_paths:
                base = self.gamma_paths[e]
                path = [base[0]]
                for s in range(len(base) - 1):
                    path.extend(names[i] for i in orders.get((e, s), ()))
                    path.append(base[s + 1])
            else:
                path = [e[0]] + [names[i] for i in orders.get((e, 0), ())] + [e[1]]
            backmap[e] = tuple(path)
            for a, b in zip(path, path[1:]):
                adj[a].add(b)
                adj[b].add(a)
                count += 1
                if e in self.gamma_paths:
                    gamma_edges.add(edge_key(a, b))
            if e in self.gamma_paths:
                base = self.gamma_paths[e]
                anchors = [i for i, x in enumerate(path) if x in base]
                for i, j in zip(anchors, anchors[1:]):
                    directions.setdefault(path[i], {})[path[i + 1]] = path[j]
                    directions.setdefault(path[j], {})[path[j - 1]] = path[i]
        if count != sum(len(s) for s in adj.values()) // 2:
            return None
        gv = set(g.graph.vertices) if g is not None else set()
        return _Layout({v: sorted(s) for v, s in adj.items()}, kinds, colors, backmap, frozenset(gv),
                       frozenset(gamma_edges), directions)


def _orderings(pairs: tuple) -> Iterator[dict]:
    """Every order of the crossings along each carrier."""
    on: dict[tuple, list[int]] = {}
    for i, (c1, c2) in enumerate(pairs):
        on.setdefault(c1, []).append(i)
        on.setdefault(c2, []).append(i)
    carriers = sorted(on)
    seen = set()
    for choice in product(*(list(permutations(on[c])) for c in carriers)):
        orders = dict(zip(carriers, choice))
        # repeated identical pairs are interchangeable
        key = tuple(tuple(pairs[i] for i in orders[c]) for c in carriers)
        if key in seen:
            continue
        seen.add(key)
        yield orders


def _configuration(pairs: tuple, orders: dict, inst: _Instance, k: int) -> CrossingConfiguration:
    position: dict[tuple, dict[int, int]] = {}
    for c, ids in orders.items():
        for j, i in enumerate(ids):
            position.setdefault(c, {})[i] = j
    out = []
    for i, (c1, c2) in enumerate(pairs):
        ends = []
        for c in (c1, c2):
            e, s = c
            idx = s * k + position[c][i] if e in inst.gamma_paths else position[c][i]
            ends.append((e, idx))
        out.append(tuple(ends))
    return CrossingConfiguration(out)


def _euler_possible(layout: _Layout) -> bool:
    v = len(layout.adj)
    e = sum(len(s) for s in layout.adj.values()) // 2
    return v < 3 or e <= 3 * v - 6


def _planar_possible(layout: _Layout) -> bool:
    """Cheap necessary condition: the abstract planarization is planar."""
    if not _euler_possible(layout):
        return False
    edges = [(a, b) for a in layout.adj for b in layout.adj[a] if a < b]
    return not edges or planarity.is_planar(edges)


# ----------------------------------------------------------------------
# embedded drawings of a layout


def _components(adj: dict) -> list[list[str]]:
    seen: set = set()
    out = []
    for v in sorted(adj):
        if v in seen:
            continue
        comp, stack = [], [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        out.append(sorted(comp))
    return out


def drawings_of_layout(layout: _Layout, gamma: Optional[CombinatorialDrawing], counter: Counter,
                       *, all_outer: bool = True) -> Iterator[CombinatorialDrawing]:
    """Plane drawings of a layout that extend the predrawing; with
    ``all_outer`` every admissible unbounded face is tried."""
    guide = _GammaGuide(gamma, layout.directions)
    comps = _components(layout.adj)
    per_comp = []
    orients = (1, -1) if gamma is not None and gamma.graph.edge_count() else (1,)
    for comp in comps:
        cset = set(comp)
        sub_adj = {v: layout.adj[v] for v in comp}
        ge = {e for e in layout.gamma_edges if e[0] in cset}
        per_comp.append((sub_adj, ge))
    # components are embedded independently; all use one orientation
    for orient in orients:
        first = _embeddings(per_comp[0][0], guide, orient, counter, per_comp[0][1])
        rest = [list(_embeddings(a, guide, orient, counter, ge)) for a, ge in per_comp[1:]]
        for part in first:
            for parts in product(*rest):
                rot = dict(part)
                for q in parts:
                    rot.update(q)
                yield from _finish(rot, layout, gamma, orient, all_outer)


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> None:
        a, b = self.find(a), self.find(b)
        if a != b:
            self.parent[max(a, b, key=repr)] = min(a, b, key=repr)


_TOP = ("top",)


def _containers(j: int, n: int, inner_of: dict, chosen: dict) -> Iterator[dict]:
    """Assign every component after j a container: the top level or an
    inner orbit of another component, without nesting cycles."""
    if j == n:
        yield dict(chosen)
        return
    options = [_TOP] + [("orbit", f) for i in range(n) if i != j for f in inner_of[i]]
    for opt in options:
        chosen[j] = opt
        if not _nesting_cycle(chosen, j, inner_of):
            yield from _containers(j + 1, n, inner_of, chosen)
        del chosen[j]


def _nesting_cycle(chosen: dict, j: int, inner_of: dict) -> bool:
    owner = {f: i for i, fs in inner_of.items() for f in fs}
    seen = {j}
    cur = chosen.get(j)
    while cur is not None and cur != _TOP:
        i = owner[cur[1]]
        if i in seen:
            return True
        seen.add(i)
        cur = chosen.get(i)
    return False


def _finish(rot, layout, gamma, orient, all_outer):
    """Plane drawings for one rotation system: each component gets an
    unbounded orbit and a containing face, and the result must restrict to
    the predrawing region by region."""
    if orient == -1:
        rot = {v: tuple(reversed(r)) for v, r in rot.items()}
    g = Graph(sorted(layout.adj), sorted({edge_key(v, w) for v in layout.adj for w in layout.adj[v]}))
    g.colors = {v: c for v, c in layout.colors.items() if v in layout.adj}
    kinds = {v: layout.kinds[v] for v in g.vertices}
    faces = trace_faces(rot)
    face_of = {d: i for i, f in enumerate(faces) for d in f}
    comps = _components(layout.adj)
    n = len(comps)
    comp_of = {v: j for j, c in enumerate(comps) for v in c}
    orbits_of: dict[int, list[int]] = {j: [] for j in range(n)}
    for i, f in enumerate(faces):
        orbits_of[comp_of[f[0][0]]].append(i)
    gv = layout.gamma_vertices
    check = gamma is not None and bool(gamma.graph.vertices)
    want = sorted(sorted(r) for r in gamma.face_vertex_sets()) if check else None
    want_outer = gamma.outer_face_vertices() if check else None
    outer_dart = None
    if check and gamma.outer_face is not None and gamma.faces:
        a, b = gamma.faces[gamma.outer_face][0]
        outer_dart = (a, next(w for w, d in layout.directions[a].items() if d == b))
    seen_outs = set()
    for outs in product(*[orbits_of[j] or [None] for j in range(n)]):
        inner_of = {j: [f for f in orbits_of[j] if f != outs[j]] for j in range(n)}
        for cont in _containers(0, n, inner_of, {}):
            region = {}
            for j in range(n):
                for f in orbits_of[j]:
                    region[f] = cont[j] if f == outs[j] else ("orbit", f)
            members: dict = {}
            for v in g.vertices:
                if rot[v]:
                    for w in rot[v]:
                        members.setdefault(region[face_of[(v, w)]], set()).add(v)
                else:
                    members.setdefault(cont[comp_of[v]], set()).add(v)
            members.setdefault(_TOP, set())
            if check:
                uf = _UnionFind()
                for r in members:
                    uf.find(r)
                for u, v in g.edges():
                    if edge_key(u, v) not in layout.gamma_edges:
                        uf.union(region[face_of[(u, v)]], region[face_of[(v, u)]])
                groups: dict = {}
                for r, vs in members.items():
                    groups.setdefault(uf.find(r), set()).update(vs & gv)
                got = sorted(sorted(s) for s in groups.values() if s)
                if got != want:
                    continue
                top = uf.find(_TOP)
                if outer_dart is not None:
                    if uf.find(region[face_of[outer_dart]]) != top:
                        continue
                elif want_outer is not None and frozenset(groups.get(top, set())) != want_outer:
                    continue
            key = tuple(outs)
            if key in seen_outs:
                break
            seen_outs.add(key)
            tops = [j for j in range(n) if cont[j] == _TOP and outs[j] is not None]
            outer_face = outs[tops[0]] if tops else None
            out = CombinatorialDrawing(g, kinds, rot, outer_face, dict(layout.backmap), layout.gamma_vertices,
                                       layout.gamma_edges)
            out.outer_darts = frozenset(faces[outs[j]][0] for j in range(n) if outs[j] is not None)
            if n > 1:
                out.regions = [frozenset(vs) for r, vs in sorted(members.items(), key=lambda kv: repr(kv[0]))]
                out.outer_region = frozenset(members[_TOP])
            yield out
            if not all_outer:
                return
            break


# ----------------------------------------------------------------------
# public operations


def ppd_planar(instance: PartiallyPredrawnGraph, *, budget: Optional[int] = None) -> Optional[CombinatorialDrawing]:
    """A crossing-free drawing of the whole graph extending the predrawing
    (up to reflection), or None if there is none."""
    counter = Counter(resolve_budget(5_000_000, budget), "partially predrawn planarity")
    inst = _Instance(instance, None)
    if inst.gamma is not None and inst.gamma.crossing_count:
        return None
    layout = inst.layout((), {})
    if layout is None or not _planar_possible(layout):
        return None
    for cd in drawings_of_layout(layout, inst.gamma, counter, all_outer=False):
        return cd
    return None


def _declared_safety(pats: PatternSet, k: int) -> None:
    level = getattr(pats, "declared_safety_level", None)
    if level is None:
        return
    from .pattern_gen import is_k_contraction_safe
    if not is_k_contraction_safe(pats, min(k, level)):
        raise UnsafePatternSet(f"pattern set is not {min(k, level)}-crossing contraction safe")


def _pattern_free(cd: CombinatorialDrawing, pats, budget: Optional[int]) -> bool:
    for p in pats:
        if occurs(p, cd, budget=budget) is not None:
            return False
    return True


def configurations(instance: PartiallyPredrawnGraph, k: int, *, simple: bool = False,
                   gamma_color: Optional[str] = None) -> Iterator[tuple[CrossingConfiguration, _Layout]]:
    """Canonical configurations with at most k new crossings, fewest first."""
    inst = _Instance(instance, gamma_color)
    pairs = inst.pairs(simple)
    for c in range(k + 1):
        for chosen in combinations_with_replacement(pairs, c):
            if simple and len(set((p[0][0], p[1][0]) for p in chosen)) < c:
                continue
            if _carrier_overuse(chosen, k):
                continue
            for orders in _orderings(chosen):
                layout = inst.layout(chosen, orders)
                if layout is None:
                    continue
                yield _configuration(chosen, orders, inst, k), layout


def _carrier_overuse(chosen: tuple, k: int) -> bool:
    load: dict = {}
    for c1, c2 in chosen:
        for c in (c1, c2):
            load[c] = load.get(c, 0) + 1
    return any(n > k for n in load.values())


def ftpcr_decide(instance: PartiallyPredrawnGraph, k: int, pats: Optional[Iterable] = None, *,
                 simple: Optional[bool] = None, gamma_color: Optional[str] = "auto",
                 budget: Optional[int] = None, check_safety: bool = True):
    """A pattern-free drawing extension with at most k crossings involving
    edges outside the predrawing, with its configuration; None if none exists.

    ``simple`` restricts to crossings between independent edges, each pair
    crossing at most once (sound for the plain crossing number; off by
    default). ``gamma_color="auto"`` colors predrawn crossings blue when a
    pattern uses that color.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if check_safety and isinstance(pats, PatternSet):
        _declared_safety(pats, k)
    pats = list(pats or [])
    if gamma_color == "auto":
        gamma_color = BLUE if any(BLUE in p.edge_colors.values() or BLUE in p.vertex_colors.values()
                                  for p in pats) else None
    if simple is None:
        simple = False
    counter = Counter(resolve_budget(20_000_000, budget), "crossing configuration search")
    inst = _Instance(instance, gamma_color)
    for config, layout in configurations(instance, k, simple=simple, gamma_color=gamma_color):
        counter.tick()
        if not _planar_possible(layout):
            continue
        for cd in drawings_of_layout(layout, inst.gamma, counter, all_outer=bool(pats)):
            if not pats or _pattern_free(cd, pats, budget):
                return cd, config
    return None


def ftpcr_decide_set(instance: PartiallyPredrawnGraph, k: int, pats: PatternSet, **kw):
    """ftpcr_decide that also honours the set's declared safety level."""
    _declared_safety(pats, k)
    return ftpcr_decide(instance, k, pats.patterns, **kw)


def crossing_number(graph: Graph, max_k: int = 6, pats: Optional[Iterable] = None, *,
                    predrawing=None, simple: Optional[bool] = None, budget: Optional[int] = None) -> Optional[int]:
    """Smallest k at which ftpcr_decide succeeds, or None above ``max_k``."""
    inst = PartiallyPredrawnGraph(graph, predrawing)
    pats = list(pats or [])
    if simple is None:
        simple = not pats and inst.is_empty()
    for k in range(max_k + 1):
        if ftpcr_decide(inst, k, pats, simple=simple, budget=budget) is not None:
            return k
    return None


__all__ = [
    "BudgetExceeded",
    "CrossingConfiguration",
    "UnsafePatternSet",
    "configurations",
    "crossing_number",
    "drawings_of_layout",
    "ftpcr_decide",
    "ftpcr_decide_set",
    "ppd_planar",
]
