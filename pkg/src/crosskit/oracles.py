"""Brute-force oracles kept apart from the main algorithms.

Nothing here calls the solver or the pattern machinery, so agreement with
them is a genuine cross-check.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Optional

import networkx as nx

from .drawing import trace_faces
from .graph import Graph


def _rotation_from_networkx(emb: nx.PlanarEmbedding) -> dict:
    # networkx lists neighbours clockwise; reverse to counterclockwise
    return {v: tuple(reversed(list(emb.neighbors_cw_order(v)))) for v in emb.nodes}


def _euler_sphere(rotation: dict) -> bool:
    # every component with an edge satisfies V - E + F = 2 on its own
    g = nx.Graph([(a, b) for a in rotation for b in rotation[a]])
    if not g.number_of_edges():
        return True
    comps = nx.number_connected_components(g)
    return g.number_of_nodes() - g.number_of_edges() + len(trace_faces(rotation)) == 2 * comps


def planarization_is_planar(graph: Graph, crossings: list[tuple], orders: dict) -> bool:
    """Planarity of the graph with the listed edge pairs crossing, in the
    given order along each edge; the certificate is checked by face tracing."""
    g = nx.Graph()
    g.add_nodes_from(graph.vertices)
    names = {i: ("crossing", i) for i in range(len(crossings))}
    for e in graph.edges():
        path = [e[0]] + [names[i] for i in orders.get(e, ())] + [e[1]]
        for a, b in zip(path, path[1:]):
            if g.has_edge(a, b):
                return False
            g.add_edge(a, b)
    ok, emb = nx.check_planarity(g)
    if not ok:
        return False
    return _euler_sphere(_rotation_from_networkx(emb))


def crossing_number_bruteforce(graph: Graph, max_k: int) -> Optional[int]:
    """Crossing number by trying every set of crossing pairs of independent
    edges (each pair at most once) and every order along every edge."""
    edges = graph.edges()
    pairs = [(e, f) for e, f in combinations(edges, 2) if not set(e) & set(f)]
    for k in range(max_k + 1):
        for chosen in combinations(pairs, k):
            along: dict = {}
            for i, (e, f) in enumerate(chosen):
                along.setdefault(e, []).append(i)
                along.setdefault(f, []).append(i)
            keys = sorted(along)
            for perm in product(*(permutations(along[x]) for x in keys)):
                if planarization_is_planar(graph, list(chosen), dict(zip(keys, perm))):
                    return k
    return None


def planar_embedding_count_bruteforce(graph: Graph) -> int:
    """Number of planar rotation systems of a small connected graph, by
    enumerating every rotation system and checking Euler's formula."""
    verts = graph.vertices
    choices = []
    for v in verts:
        nb = graph.neighbors(v)
        if len(nb) <= 2:
            choices.append([tuple(nb)])
            continue
        first, rest = nb[0], nb[1:]
        choices.append([(first,) + p for p in permutations(rest)])
    count = 0
    e = graph.edge_count()
    for combo in product(*choices):
        rot = dict(zip(verts, combo))
        if len(verts) - e + len(trace_faces(rot)) == 2:
            count += 1
    return count


def treewidth_exact(graph: Graph) -> int:
    """Treewidth of a small graph: the best width over every elimination order."""
    verts = graph.vertices
    if not graph.edge_count():
        return 0
    adj0 = {v: set(graph.neighbors(v)) for v in verts}
    best = len(verts) - 1
    for order in permutations(verts):
        adj = {v: set(nb) for v, nb in adj0.items()}
        width = 0
        for v in order:
            nb = adj.pop(v)
            width = max(width, len(nb))
            if width >= best:
                break
            for a in nb:
                adj[a].discard(v)
                adj[a].update(nb - {a})
        best = min(best, width)
    return best


# ----------------------------------------------------------------------
# separation in an embedding


@lru_cache(maxsize=64)
def _embedding_of(edges: frozenset) -> dict:
    ok, emb = nx.check_planarity(nx.Graph(list(edges)))
    if not ok:
        raise ValueError("graph is not planar")
    return _rotation_from_networkx(emb)


@lru_cache(maxsize=64)
def _faces_of_embedding(edges: frozenset) -> list:
    return trace_faces(_embedding_of(edges))


def sides_in_embedding(graph: Graph, s, face=None) -> dict:
    """Map every vertex off edge set ``s`` to the regions of the plane
    minus ``s`` that it touches.

    The embedding comes from networkx. Path ends are joined by subdivided
    chords drawn inside the face with vertex set ``face``; faces are then
    merged across every edge that is neither in ``s`` nor a chord.
    """
    key = frozenset(graph.edges())
    rot = {v: list(nb) for v, nb in _embedding_of(key).items()}
    s = {frozenset(e) for e in s}
    adj: dict = {}
    for e in s:
        a, b = tuple(e)
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    chords = set()
    if any(len(nb) == 1 for nb in adj.values()):
        ends = []
        seen = set()
        for start in sorted(v for v, nb in adj.items() if len(nb) == 1):
            if start in seen:
                continue
            prev, cur = None, start
            while True:
                seen.add(cur)
                nxt = [w for w in adj[cur] if w != prev]
                if not nxt:
                    break
                prev, cur = cur, nxt[0]
            ends.append((start, cur))
        target = frozenset(face)
        faces = _faces_of_embedding(key)
        host = next(f for f in faces if frozenset(x for x, _ in f) == target and len(f) == len(target))
        allowed = set(host)
        for j, (p, q) in enumerate(ends):
            z = ("chord", j)
            # the part of the closing face that has corners at both ends
            part = next(f for f in faces if set(f) & allowed
                        and any(x == p for x, _ in f) and any(x == q for x, _ in f))
            for end in (p, q):
                nb = rot[end]
                i = next(i for i, w in enumerate(nb) if (end, w) in part)
                nb.insert(i + 1, z)
            rot[z] = [q, p]
            faces = trace_faces(rot)
            allowed = {d for f in faces if set(f) & allowed for d in f}
            chords.update({frozenset((p, z)), frozenset((q, z))})
    else:
        faces = _faces_of_embedding(key)
    face_of = {d: i for i, f in enumerate(faces) for d in f}
    parent = list(range(len(faces)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for v, nb in rot.items():
        for w in nb:
            e = frozenset((v, w))
            if e in s or e in chords:
                continue
            parent[find(face_of[(v, w)])] = find(face_of[(w, v)])
    on_s = {v for e in s for v in e}
    return {v: frozenset(find(face_of[(v, w)]) for w in rot[v])
            for v in graph.vertices if v not in on_s}


def separated_in_embedding(graph: Graph, s, a: str, b: str, face=None) -> bool:
    sides = sides_in_embedding(graph, s, face)
    return not (sides[a] & sides[b])
