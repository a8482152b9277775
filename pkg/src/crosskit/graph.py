"""Simple undirected graphs with string vertex identifiers."""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator, Optional

Edge = tuple[str, str]


class GraphError(ValueError):
    """Raised for malformed graphs (self-loops, dangling endpoints)."""


def edge_key(u: str, v: str) -> Edge:
    """Canonical (sorted) form of an undirected edge."""
    return (u, v) if u <= v else (v, u)


class Graph:
    """Undirected simple graph.

    Vertex colors are optional string tags. Insertion order of vertices is
    kept so that every traversal is deterministic.
    """

    def __init__(self, vertices: Iterable[str] = (), edges: Iterable[tuple[str, str]] = (),
                 colors: Optional[dict[str, str]] = None):
        self._adj: dict[str, set[str]] = {}
        self.colors: dict[str, str] = {}
        for v in vertices:
            self.add_vertex(v)
        for u, v in edges:
            self.add_edge(u, v)
        for v, c in (colors or {}).items():
            if v not in self._adj:
                raise GraphError(f"color given for unknown vertex {v!r}")
            self.colors[v] = c

    # ------------------------------------------------------------------
    # construction

    def add_vertex(self, v: str) -> None:
        if not isinstance(v, str):
            raise GraphError(f"vertex ids must be strings, got {v!r}")
        self._adj.setdefault(v, set())

    def add_edge(self, u: str, v: str) -> None:
        if u == v:
            raise GraphError(f"self-loop at {u!r}")
        if u not in self._adj or v not in self._adj:
            raise GraphError(f"edge {u!r}-{v!r} has an undeclared endpoint")
        self._adj[u].add(v)
        self._adj[v].add(u)

    def remove_edge(self, u: str, v: str) -> None:
        self._adj[u].discard(v)
        self._adj[v].discard(u)

    def remove_vertex(self, v: str) -> None:
        for w in self._adj.pop(v):
            self._adj[w].discard(v)
        self.colors.pop(v, None)

    def copy(self) -> "Graph":
        g = Graph()
        for v in self._adj:
            g.add_vertex(v)
        for u, v in self.edges():
            g.add_edge(u, v)
        g.colors = dict(self.colors)
        return g

    # ------------------------------------------------------------------
    # queries

    @property
    def vertices(self) -> list[str]:
        return list(self._adj)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def neighbors(self, v: str) -> list[str]:
        return sorted(self._adj[v])

    def degree(self, v: str) -> int:
        return len(self._adj[v])

    def has_edge(self, u: str, v: str) -> bool:
        return u in self._adj and v in self._adj[u]

    def edges(self) -> list[Edge]:
        return sorted({edge_key(u, v) for u in self._adj for v in self._adj[u]})

    def edge_count(self) -> int:
        return sum(len(a) for a in self._adj.values()) // 2

    def subgraph(self, keep: Iterable[str]) -> "Graph":
        keep = [v for v in self._adj if v in set(keep)]
        ks = set(keep)
        g = Graph(keep, [(u, v) for u, v in self.edges() if u in ks and v in ks])
        g.colors = {v: c for v, c in self.colors.items() if v in ks}
        return g

    def edge_subgraph(self, edges: Iterable[tuple[str, str]]) -> "Graph":
        edges = [edge_key(u, v) for u, v in edges]
        vs = sorted({x for e in edges for x in e})
        return Graph(vs, edges)

    def is_subgraph_of(self, other: "Graph") -> bool:
        return all(v in other for v in self._adj) and all(other.has_edge(u, v) for u, v in self.edges())

    def components(self) -> list[list[str]]:
        seen: set[str] = set()
        out = []
        for s in self._adj:
            if s in seen:
                continue
            comp = []
            queue = deque([s])
            seen.add(s)
            while queue:
                v = queue.popleft()
                comp.append(v)
                for w in sorted(self._adj[v]):
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            out.append(comp)
        return out

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return set(self._adj) == set(other._adj) and self.edges() == other.edges() and self.colors == other.colors

    def __iter__(self) -> Iterator[str]:
        return iter(self._adj)

    def __repr__(self) -> str:
        return f"Graph(|V|={len(self)}, |E|={self.edge_count()})"


def complete_graph(n: int, prefix: str = "v") -> Graph:
    names = [f"{prefix}{i}" for i in range(n)]
    return Graph(names, [(names[i], names[j]) for i in range(n) for j in range(i + 1, n)])


def complete_bipartite(a: int, b: int) -> Graph:
    left = [f"a{i}" for i in range(a)]
    right = [f"b{j}" for j in range(b)]
    return Graph(left + right, [(u, v) for u in left for v in right])


def cycle_graph(n: int, prefix: str = "v") -> Graph:
    names = [f"{prefix}{i}" for i in range(n)]
    return Graph(names, [(names[i], names[(i + 1) % n]) for i in range(n)])


def to_networkx(g: Graph):
    import networkx as nx

    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from(g.edges())
    return h
