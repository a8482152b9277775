"""Occurrence of topological crossing patterns in planarizations.

The search maps pattern vertices one at a time (breadth-first from a
crossing vertex) onto the planarization, realizing every contracted edge
as a path that runs straight through crossings. Embedding conditions are
checked as soon as a vertex has all its edges placed; separation
conditions (faces and the unbounded side) are checked on complete maps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .drawing import CROSSING, REAL, CombinatorialDrawing, PartiallyPredrawnGraph
from .graph import Edge, edge_key
from .limits import Counter, budget as resolve_budget
from .patterns import TopologicalCrossingPattern


class InvalidHost(ValueError):
    """The host's predrawn flags do not agree with the instance."""


@dataclass
class OccurrenceWitness:
    vertex_map: dict
    ep_paths: dict = field(default_factory=dict)
    realization_rotations: dict = field(default_factory=dict)
    orientation: int = 1

    def as_dict(self) -> dict:
        return {
            "vertex_map": dict(sorted(self.vertex_map.items())),
            "ep_paths": [{"edge": list(e), "path": list(p)} for e, p in sorted(self.ep_paths.items())],
            "realization_rotations": {v: list(r) for v, r in sorted(self.realization_rotations.items())},
            "orientation": self.orientation,
        }


def check_host_flags(host: CombinatorialDrawing, context: Optional[PartiallyPredrawnGraph]) -> None:
    if context is None:
        return
    gamma_v = set(context.gamma_vertices)
    gamma_e = set(context.gamma_edges)
    flagged_real = {v for v in host.gamma_vertices if host.kinds.get(v) == REAL}
    if not flagged_real <= gamma_v:
        raise InvalidHost(f"vertices {sorted(flagged_real - gamma_v)} are flagged but not predrawn")
    expected_edges = set()
    for e in gamma_e:
        path = host.edge_backmap.get(e)
        if path is None:
            if host.edge_backmap:
                raise InvalidHost(f"predrawn edge {e} is missing from the host")
            continue
        expected_edges.update(edge_key(a, b) for a, b in zip(path, path[1:]))
    if host.edge_backmap and set(host.gamma_edges) != expected_edges:
        raise InvalidHost("flagged edges differ from the planarized predrawing")


# ----------------------------------------------------------------------
# shared condition checks


def _cyclic_equal(x, y) -> bool:
    if len(x) != len(y):
        return False
    if not x:
        return True
    if x[0] not in y:
        return False
    i = y.index(x[0])
    return all(x[k] == y[(i + k) % len(y)] for k in range(len(x)))


class _Conditions:
    """Checks shared by the search and by witness re-verification."""

    def __init__(self, p: TopologicalCrossingPattern, host: CombinatorialDrawing):
        self.p = p
        self.host = host
        self.colors = host.graph.colors
        self.pi_rot = p.pi.rotation if p.pi is not None else {}
        self.emb_rot = p.embedding.rotation if p.embedding is not None else {}
        self.pdeg = {v: p.graph.degree(v) for v in p.graph.vertices}

    def vertex_ok(self, v: str, h: str) -> bool:
        p, host = self.p, self.host
        if host.kinds[h] != p.kind(v):
            return False
        if v in p.vphi and h not in host.gamma_vertices:
            return False
        c = p.vertex_colors.get(v)
        if c is not None and self.colors.get(h) != c:
            return False
        return len(host.rotation[h]) >= self.pdeg[v]

    def real_edge_ok(self, e: Edge, a: str, b: str) -> bool:
        if not self.host.graph.has_edge(a, b):
            return False
        return e not in self.p.ephi or edge_key(a, b) in self.host.gamma_edges

    def interior_ok(self, e: Edge, x: str) -> bool:
        if self.host.kinds[x] != CROSSING or len(self.host.rotation[x]) != 4:
            return False
        c = self.p.edge_colors.get(e)
        return c is None or self.colors.get(x) == c

    def path_edges_ok(self, e: Edge, path) -> bool:
        if e not in self.p.ephi:
            return True
        return all(edge_key(a, b) in self.host.gamma_edges for a, b in zip(path, path[1:]))

    def image_dart(self, phi, paths, v: str, w: str) -> tuple[str, str]:
        e = edge_key(v, w)
        if e in self.p.ep:
            path = paths[e]
            if path[0] != phi[v]:
                path = path[::-1]
            return (path[0], path[1])
        return (phi[v], phi[w])

    def local(self, phi, paths, v: str, orients: frozenset) -> tuple[frozenset, tuple]:
        """Embedding conditions at v; returns surviving orientations and the
        realized cyclic order of v's pattern neighbors."""
        p, host = self.p, self.host
        h = phi[v]
        darts = {self.image_dart(phi, paths, v, w)[1]: w for w in p.graph.neighbors(v)}
        order = tuple(darts[x] for x in host.rotation[h] if x in darts)
        if v in p.vc and self.pdeg[v] == 2:
            rot = host.rotation[h]
            a, b = (rot.index(x) for x in darts)
            if len(rot) != 4 or (a - b) % 4 != 2:
                return frozenset(), order
        for given in (self.emb_rot.get(v), self._pi_order(v)):
            if given is None or len(given) < 3:
                continue
            sub = tuple(w for w in order if w in given)
            ok = set()
            if 1 in orients and _cyclic_equal(sub, tuple(given)):
                ok.add(1)
            if -1 in orients and _cyclic_equal(sub, tuple(reversed(given))):
                ok.add(-1)
            orients = frozenset(ok)
        return orients, order

    def _pi_order(self, v: str):
        r = self.pi_rot.get(v)
        return r if r else None

    # separation conditions -------------------------------------------

    def regions(self, phi, paths, orient: int) -> bool:
        p = self.p
        if p.embedding is not None and not self._embedding_regions(phi, paths, orient):
            return False
        if p.pi is not None and p.pi.graph.vertices and not self._pi_regions(phi, paths):
            return False
        return True

    def _union(self, image_edges: set):
        host = self.host
        face_of = _face_index(host)
        parent = list(range(len(host.faces)))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for u, v in host.graph.edges():
            if edge_key(u, v) not in image_edges:
                a, b = find(face_of[(u, v)]), find(face_of[(v, u)])
                if a != b:
                    parent[max(a, b)] = min(a, b)
        return find, face_of

    def _host_edges(self, phi, paths, edges) -> set:
        out = set()
        for e in edges:
            if e in self.p.ep:
                path = paths[e]
                out.update(edge_key(a, b) for a, b in zip(path, path[1:]))
            else:
                out.add(edge_key(phi[e[0]], phi[e[1]]))
        return out

    def _embedding_regions(self, phi, paths, orient: int) -> bool:
        emb = self.p.embedding
        find, face_of = self._union(self._host_edges(phi, paths, self.p.graph.edges()))
        face_region = []
        for f in emb.faces:
            regs = set()
            for a, b in f:
                d = self.image_dart(phi, paths, a, b) if orient == 1 else self.image_dart(phi, paths, b, a)
                regs.add(find(face_of[d]))
            if len(regs) != 1:
                return False
            face_region.append(regs.pop())
        if len(set(face_region)) != len(face_region):
            return False
        if emb.outer_face is not None and emb.faces:
            a, b = emb.faces[emb.outer_face][0]
            d = self.image_dart(phi, paths, a, b) if orient == 1 else self.image_dart(phi, paths, b, a)
            host_outer = _component_outer(self.host).get(face_of[d])
            if host_outer is not None and find(host_outer) != face_region[emb.outer_face]:
                return False
        return True

    def _pi_regions(self, phi, paths) -> bool:
        pi = self.p.pi
        find, face_of = self._union(self._host_edges(phi, paths, pi.graph.edges()))
        members: dict = {}
        anchor = None
        for x in pi.graph.vertices:
            h = phi[x]
            if not self.host.rotation[h]:
                members.setdefault(("isolated", h), set()).add(x)
                continue
            for y in self.host.rotation[h]:
                r = find(face_of[(h, y)])
                members.setdefault(r, set()).add(x)
                anchor = face_of[(h, y)]
        got = sorted((sorted(s) for s in members.values()))
        want = sorted(sorted(s) for s in pi.face_vertex_sets())
        if got != want:
            return False
        outer_set = pi.outer_face_vertices()
        if outer_set is not None and anchor is not None:
            host_outer = _component_outer(self.host).get(anchor)
            if host_outer is not None:
                if frozenset(members.get(find(host_outer), set())) != frozenset(outer_set):
                    return False
        return True


_FACE_CACHE: dict = {}


def _face_index(host: CombinatorialDrawing) -> dict:
    key = id(host)
    hit = _FACE_CACHE.get(key)
    if hit is None or hit[0] is not host:
        hit = (host, host.face_of_dart(), host.component_outer_faces())
        _FACE_CACHE.clear()
        _FACE_CACHE[key] = hit
    return hit[1]


def _component_outer(host: CombinatorialDrawing) -> dict:
    _face_index(host)
    return _FACE_CACHE[id(host)][2]


# ----------------------------------------------------------------------
# search


_PLAN_CACHE: dict = {}


class _Search:
    def __init__(self, p: TopologicalCrossingPattern, host: CombinatorialDrawing, limit: int):
        self.p = p
        self.host = host
        self.cond = _Conditions(p, host)
        self.counter = Counter(limit, "occurrence search")
        cached = _PLAN_CACHE.get(id(p))
        if cached is None or cached[0] is not p:
            cached = (p, self._plan())
            if len(_PLAN_CACHE) > 50_000:
                _PLAN_CACHE.clear()
            _PLAN_CACHE[id(p)] = cached
        self.order, self.parent = cached[1]
        self.position = {v: i for i, v in enumerate(self.order)}
        self.phi: dict[str, str] = {}
        self.used: set[str] = set()
        self.paths: dict[Edge, tuple] = {}
        self.rotations: dict[str, tuple] = {}

    def _plan(self):
        p = self.p
        order, parent = [], {}
        seen = set()
        comps = sorted(p.graph.components(), key=lambda c: (-len(c), sorted(c)))
        for comp in comps:
            crossing = [v for v in comp if v in p.vc] or comp
            root = max(sorted(crossing), key=lambda v: p.graph.degree(v))
            queue = [root]
            seen.add(root)
            parent[root] = None
            while queue:
                v = queue.pop(0)
                order.append(v)
                # prefer real edges so contracted paths are placed between fixed ends
                nbrs = sorted(p.graph.neighbors(v), key=lambda w: (edge_key(v, w) in p.ep, -p.graph.degree(w), w))
                for w in nbrs:
                    if w not in seen:
                        seen.add(w)
                        parent[w] = v
                        queue.append(w)
        return order, parent

    # contracted-edge walks -------------------------------------------

    def walks(self, e: Edge, start: str, target: Optional[str]) -> Iterator[tuple]:
        host = self.host
        for first in host.rotation[start]:
            path = [start]
            prev, cur = start, first
            while True:
                if target is not None:
                    if cur == target:
                        yield tuple(path + [cur])
                        break
                    if cur in self.used:
                        break
                else:
                    if cur in self.used:
                        break
                    yield tuple(path + [cur])
                if not self.cond.interior_ok(e, cur) or cur == start:
                    break
                nxt = host.opposite(cur, prev)
                path.append(cur)
                prev, cur = cur, nxt
                if cur in path:
                    break

    # main recursion --------------------------------------------------

    def run(self) -> Optional[OccurrenceWitness]:
        return self._extend(0, frozenset((1, -1)))

    def _forced_hops(self, u: str, v: str, orients: frozenset) -> Optional[set]:
        """First hops from phi[u] that the dart u->v may take, when the
        rotation at u and an already placed neighbor pin them down."""
        p, host = self.p, self.host
        h = self.phi[u]
        hrot = host.rotation[h]
        if u in p.vc and self.cond.pdeg[u] == 2:
            (w,) = [x for x in p.graph.neighbors(u) if x != v]
            if w not in self.phi or (edge_key(u, w) in p.ep and edge_key(u, w) not in self.paths):
                return None
            opp = host.opposite(h, self.cond.image_dart(self.phi, self.paths, u, w)[1])
            return {opp} if opp is not None else set()
        if len(hrot) != self.cond.pdeg[u]:
            return None
        given = self.cond.emb_rot.get(u)
        if not given or len(given) < 3:
            return None
        for w in given:
            if w == v or w not in self.phi:
                continue
            if edge_key(u, w) in p.ep and edge_key(u, w) not in self.paths:
                continue
            known = self.cond.image_dart(self.phi, self.paths, u, w)[1]
            step = (list(given).index(v) - list(given).index(w)) % len(given)
            base = hrot.index(known)
            return {hrot[(base + o * step) % len(hrot)] for o in orients}
        return None

    def _candidates(self, v: str, orients: frozenset):
        u = self.parent[v]
        if u is None:
            kind = self.p.kind(v)
            for h in self.host.graph.vertices:
                if h not in self.used and self.host.kinds[h] == kind:
                    yield h, None
            return
        hops = self._forced_hops(u, v, orients)
        e = edge_key(u, v)
        if e in self.p.ep:
            for path in self.walks(e, self.phi[u], None):
                if hops is None or path[1] in hops:
                    yield path[-1], path
        else:
            for h in self.host.rotation[self.phi[u]]:
                if h not in self.used and (hops is None or h in hops):
                    yield h, None

    def _extend(self, i: int, orients: frozenset) -> Optional[OccurrenceWitness]:
        if i == len(self.order):
            for o in sorted(orients, reverse=True):
                if self.cond.regions(self.phi, self.paths, o):
                    return OccurrenceWitness(dict(self.phi), dict(self.paths), dict(self.rotations), o)
            return None
        v = self.order[i]
        u = self.parent[v]
        for h, path in list(self._candidates(v, orients)):
            self.counter.tick()
            if h in self.used or not self.cond.vertex_ok(v, h):
                continue
            if path is not None:
                if set(path[1:-1]) & self.used or not self.cond.path_edges_ok(edge_key(u, v), path):
                    continue
            elif u is not None and not self.cond.real_edge_ok(edge_key(u, v), self.phi[u], h):
                continue
            self.phi[v] = h
            self.used.add(h)
            added = []
            if path is not None:
                e = edge_key(u, v)
                self.paths[e] = path if e[0] == u else path[::-1]
                self.used.update(path[1:-1])
                added.append(e)
            others = [w for w in self.p.graph.neighbors(v)
                      if w in self.phi and w != u]
            found = self._close(v, others, 0, i, orients)
            for e in added:
                self.used.difference_update(self.paths[e][1:-1])
                del self.paths[e]
            self.used.discard(h)
            del self.phi[v]
            if found is not None:
                return found
        return None

    def _close(self, v: str, others: list, j: int, i: int, orients: frozenset):
        """Realize the edges from v back to earlier vertices, then check."""
        if j == len(others):
            return self._after_vertex(v, i, orients)
        w = others[j]
        e = edge_key(v, w)
        if e not in self.p.ep:
            if not self.cond.real_edge_ok(e, self.phi[v], self.phi[w]):
                return None
            return self._close(v, others, j + 1, i, orients)
        for path in list(self.walks(e, self.phi[v], self.phi[w])):
            self.counter.tick()
            if not self.cond.path_edges_ok(e, path):
                continue
            self.paths[e] = path if e[0] == v else path[::-1]
            self.used.update(path[1:-1])
            found = self._close(v, others, j + 1, i, orients)
            self.used.difference_update(path[1:-1])
            del self.paths[e]
            if found is not None:
                return found
        return None

    def _after_vertex(self, v: str, i: int, orients: frozenset):
        done = [v] + [w for w in self.p.graph.neighbors(v) if w in self.phi]
        saved = {}
        for x in done:
            if all(y in self.phi for y in self.p.graph.neighbors(x)):
                orients, order = self.cond.local(self.phi, self.paths, x, orients)
                saved[x] = self.rotations.get(x)
                self.rotations[x] = order
                if not orients:
                    break
        found = self._extend(i + 1, orients) if orients else None
        for x, old in saved.items():
            if old is None:
                self.rotations.pop(x, None)
            else:
                self.rotations[x] = old
        return found


def occurs(p: TopologicalCrossingPattern, host: CombinatorialDrawing,
           context: Optional[PartiallyPredrawnGraph] = None, *,
           budget: Optional[int] = None) -> Optional[OccurrenceWitness]:
    """A witness that ``p`` occurs in ``host``, or None.

    Raises :class:`InvalidHost` when the host's predrawn flags disagree with
    ``context`` and BudgetExceeded when the search runs out of steps.
    """
    check_host_flags(host, context)
    if not p.graph.vertices:
        return None
    if p.vc and not host.crossing_vertices:
        return None
    if len(p.graph) > len(host.graph):
        return None
    if len(p.vc) > len(host.crossing_vertices) or len(p.graph) - len(p.vc) > len(host.graph) - len(host.crossing_vertices):
        return None
    return _Search(p, host, resolve_budget(2_000_000, budget)).run()


def occurs_any(patterns, host: CombinatorialDrawing, context: Optional[PartiallyPredrawnGraph] = None, *,
               budget: Optional[int] = None):
    """First pattern (in list order) that occurs, with its witness."""
    for p in patterns:
        w = occurs(p, host, context, budget=budget)
        if w is not None:
            return p, w
    return None


# ----------------------------------------------------------------------
# witness re-verification


def verify_witness(p: TopologicalCrossingPattern, host: CombinatorialDrawing, w: OccurrenceWitness) -> list[str]:
    """Re-check every occurrence condition from the witness alone; returns
    the list of failures (empty when the witness certifies an occurrence)."""
    cond = _Conditions(p, host)
    phi = w.vertex_map
    problems = []
    if set(phi) != set(p.graph.vertices):
        return ["vertex map does not cover the pattern"]
    if len(set(phi.values())) != len(phi):
        problems.append("vertex map is not injective")
    for v, h in phi.items():
        if h not in host.graph or not cond.vertex_ok(v, h):
            problems.append(f"vertex {v} -> {h} violates kind, color, predrawn flag or degree")
    for e in p.er:
        if not cond.real_edge_ok(e, phi[e[0]], phi[e[1]]):
            problems.append(f"edge {e} has no image edge")
    images = set(phi.values())
    interior_seen: set = set()
    for e in p.ep:
        path = w.ep_paths.get(e)
        if path is None or len(path) < 2 or path[0] != phi[e[0]] or path[-1] != phi[e[1]]:
            problems.append(f"contracted edge {e} has no valid path")
            continue
        for a, b in zip(path, path[1:]):
            if not host.graph.has_edge(a, b):
                problems.append(f"path of {e} uses a missing edge {a}-{b}")
        inner = list(path[1:-1])
        if set(inner) & images or set(inner) & interior_seen or len(set(inner)) != len(inner):
            problems.append(f"path of {e} is not internally disjoint")
        interior_seen.update(inner)
        for k, x in enumerate(inner, start=1):
            if not cond.interior_ok(e, x) or host.opposite(x, path[k - 1]) != path[k + 1]:
                problems.append(f"path of {e} does not run straight through {x}")
        if not cond.path_edges_ok(e, path):
            problems.append(f"path of {e} leaves the predrawing")
    if problems:
        return problems
    orients = frozenset((w.orientation,))
    for v in p.graph.vertices:
        orients, _ = cond.local(phi, w.ep_paths, v, orients)
        if not orients:
            return [f"rotation condition fails at {v}"]
    if not cond.regions(phi, w.ep_paths, w.orientation):
        problems.append("separation condition fails")
    return problems
