"""Random instance generators used by tests, demos and the acceptance suite."""

from __future__ import annotations

import random
from typing import Optional

import networkx as nx

from .drawing import CombinatorialDrawing, PolylineDrawing, check_new_edge, planarize_geometric, validate_drawing
from .geometry import Point, point
from .graph import Graph, edge_key


def random_points(rng: random.Random, n: int, size: int) -> list[Point]:
    cells = rng.sample(range((size + 1) ** 2), n)
    return [point(c % (size + 1), c // (size + 1)) for c in cells]


def random_polyline_drawing(rng: random.Random, n: int, m: int, *, size: int = 12, max_bends: int = 2,
                            max_crossings: Optional[int] = None, connected: bool = True,
                            straight: bool = False, tries: int = 30) -> PolylineDrawing:
    """A simple polyline drawing of a random graph.

    Edges are inserted one at a time; an edge whose polyline breaks
    simplicity or the crossing budget is redrawn, then dropped. With
    ``connected`` a random spanning tree is inserted first.
    """
    names = [f"v{i}" for i in range(n)]
    pts = dict(zip(names, random_points(rng, n, size)))
    g = Graph(names)
    d = PolylineDrawing(g, pts, {})
    candidates = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(candidates)
    order = []
    if connected:
        perm = names[:]
        rng.shuffle(perm)
        for i in range(1, n):
            order.append(edge_key(perm[i], perm[rng.randrange(i)]))
    for e in candidates:
        if e not in order:
            order.append(e)
    added = 0
    crossings: set[Point] = set()
    tree = set(order[: n - 1]) if connected else set()
    for e in order:
        if added >= m and e not in tree:
            continue
        placed = False
        for _ in range(tries):
            bends = 0 if straight else rng.randint(0, max_bends)
            line = [pts[e[0]]] + [point(rng.randint(0, size), rng.randint(0, size)) for _ in range(bends)] + [pts[e[1]]]
            g.add_edge(*e)
            d.polylines[e] = line
            new = check_new_edge(d, e, crossings)
            if new is not None and (max_crossings is None or len(crossings) + len(new) <= max_crossings):
                crossings.update(new)
                placed = True
                break
            del d.polylines[e]
            g.remove_edge(*e)
        if placed:
            added += 1
        elif e in tree:
            return random_polyline_drawing(rng, n, m, size=size, max_bends=max_bends, max_crossings=max_crossings,
                                           connected=connected, straight=straight, tries=tries)
    return d


def random_combinatorial_drawing(rng: random.Random, n: int, m: int, **kw) -> CombinatorialDrawing:
    return planarize_geometric(random_polyline_drawing(rng, n, m, **kw))


def random_straight_line_drawing(rng: random.Random, n: int, m: int, size: int = 40) -> PolylineDrawing:
    """Straight-line drawing with generic rational coordinates."""
    for _ in range(100):
        names = [f"v{i}" for i in range(n)]
        pts = dict(zip(names, random_points(rng, n, size)))
        edges = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n)]
        rng.shuffle(edges)
        g = Graph(names, edges[:m])
        d = PolylineDrawing.straight_line(g, pts)
        if not validate_drawing(d):
            return d
    raise RuntimeError("could not place a generic straight-line drawing")


def random_predrawn_drawing(rng: random.Random, n: int, m: int, *, max_predrawn_crossings: int = 8,
                            max_new_crossings: int = 3, size: int = 12, max_bends: int = 2,
                            tries: int = 200) -> tuple[PolylineDrawing, CombinatorialDrawing]:
    """A drawing split into a predrawn part and the rest, planarized with the
    predrawn part flagged and its crossings colored blue.

    Crossings between two predrawn edges count against
    ``max_predrawn_crossings``; every other crossing is new.
    """
    for _ in range(tries):
        d = random_polyline_drawing(rng, n, m, size=size, max_bends=max_bends,
                                    max_crossings=max_predrawn_crossings + max_new_crossings)
        edges = sorted(d.polylines)
        gamma = set(edges)
        cd = planarize_geometric(d)
        crossing_pairs = {x: [e for e, path in cd.edge_backmap.items() if x in path[1:-1]]
                          for x in cd.crossing_vertices}
        order = edges[:]
        rng.shuffle(order)
        for e in order:
            new = sum(1 for pair in crossing_pairs.values() if not set(pair) <= gamma)
            old = len(crossing_pairs) - new
            if old <= max_predrawn_crossings and new <= max_new_crossings and rng.random() < 0.5:
                break
            candidate = gamma - {e}
            new_c = sum(1 for pair in crossing_pairs.values() if not set(pair) <= candidate)
            if new_c <= max_new_crossings:
                gamma = candidate
        new = sum(1 for pair in crossing_pairs.values() if not set(pair) <= gamma)
        if len(crossing_pairs) - new > max_predrawn_crossings or new > max_new_crossings:
            continue
        host = planarize_geometric(d, gamma=sorted(gamma))
        for x in host.crossing_vertices:
            if x in host.gamma_vertices:
                host.graph.colors[x] = "blue"
        return d, host
    raise RuntimeError("could not split a drawing into predrawn and new crossings")


# ----------------------------------------------------------------------
# 3-connected planar graphs


def _iso_key(g):
    return nx.weisfeiler_lehman_graph_hash(g, iterations=3), g.number_of_edges()


def _dedupe_into(buckets: dict, g) -> bool:
    key = _iso_key(g)
    bucket = buckets.setdefault(key, [])
    if any(nx.is_isomorphic(g, h) for h in bucket):
        return False
    bucket.append(g)
    return True


def _triangulations(n: int) -> list:
    """Every maximal planar graph on ``n >= 4`` vertices up to isomorphism,
    reached by edge flips from a stacked triangulation."""
    seed = nx.complete_graph(4)
    for i in range(4, n):
        seed.add_edges_from((i, i - j) for j in (1, 2, 3))
    buckets: dict = {}
    _dedupe_into(buckets, seed)
    todo = [seed]
    while todo:
        g = todo.pop()
        _, emb = nx.check_planarity(g)
        for u, v in list(g.edges()):
            x = emb[u][v]["cw"]
            y = emb[u][v]["ccw"]
            if x == y or g.has_edge(x, y):
                continue
            h = g.copy()
            h.remove_edge(u, v)
            h.add_edge(x, y)
            if _dedupe_into(buckets, h):
                todo.append(h)
    return [g for b in buckets.values() for g in b]


def polyhedral_graphs(n: int) -> list[Graph]:
    """All 3-connected planar graphs on ``n`` vertices, one per
    isomorphism class, with vertices named ``p0 .. p{n-1}``."""
    if n < 4:
        return []
    level = _triangulations(n)
    buckets: dict = {}
    for g in level:
        _dedupe_into(buckets, g)
    while level:
        nxt = []
        for g in level:
            for e in list(g.edges()):
                h = g.copy()
                h.remove_edge(*e)
                if min(d for _, d in h.degree()) < 3 or nx.node_connectivity(h) < 3:
                    continue
                if _dedupe_into(buckets, h):
                    nxt.append(h)
        level = nxt
    out = []
    for b in sorted(buckets.values(), key=lambda b: (b[0].number_of_edges(), _iso_key(b[0])[0])):
        for g in b:
            out.append(Graph([f"p{v}" for v in g.nodes], [(f"p{u}", f"p{v}") for u, v in g.edges()]))
    return out
