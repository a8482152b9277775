"""Direct searches for the forbidden configurations of two drawing styles.

These work on the original edges recovered from a planarization and never
touch the pattern machinery, so they serve as independent oracles.

Fan-planar: an edge crossed by two independent edges, or by two edges
sharing an endpoint v whose crossings put the two ends of the crossed edge
on different sides of the closed curve through v and both crossings.

Pseudolinear: three edges meeting pairwise in three distinct points (a
crossing or a shared endpoint) bound a closed curve; when every continuation
of an edge beyond a crossing corner starts into the bounded side, the edges
cannot be extended to pseudolines.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .drawing import CROSSING, CombinatorialDrawing, is_left_of_path, recover_backmap
from .graph import Edge, edge_key

FANPLANAR = "fanplanar"
PSEUDOLINEAR = "pseudolinear"
STYLES = (FANPLANAR, PSEUDOLINEAR)


@dataclass(frozen=True)
class Obstruction:
    style: str
    kind: str
    edges: tuple
    corners: tuple = ()

    def as_dict(self) -> dict:
        return {"style": self.style, "kind": self.kind, "edges": [list(e) for e in self.edges],
                "corners": list(self.corners)}


def _crossings_on(backmap: dict) -> dict[str, list[Edge]]:
    out: dict[str, list[Edge]] = {}
    for e, path in backmap.items():
        for x in path[1:-1]:
            out.setdefault(x, []).append(e)
    return out


def _step(path: tuple, x: str, toward: str) -> str:
    """Neighbor of x on ``path`` in the direction of vertex ``toward``."""
    i, j = path.index(x), path.index(toward)
    return path[i + 1] if j > i else path[i - 1]


def _away(path: tuple, x: str, frm: str) -> str:
    i, j = path.index(x), path.index(frm)
    return path[i - 1] if j > i else path[i + 1]


def fanplanar_obstructions(host: CombinatorialDrawing, first_only: bool = False) -> list[Obstruction]:
    backmap = recover_backmap(host)
    crossed_by: dict[Edge, dict[Edge, str]] = {e: {} for e in backmap}
    for x, es in _crossings_on(backmap).items():
        if len(es) == 2:
            a, b = es
            crossed_by[a][b] = x
            crossed_by[b][a] = x
    found = []
    rot = host.rotation
    for e in sorted(backmap):
        path_e = backmap[e]
        for f, g in combinations(sorted(crossed_by[e]), 2):
            shared = set(f) & set(g)
            if not shared:
                found.append(Obstruction(FANPLANAR, "I", (e, f, g), (crossed_by[e][f], crossed_by[e][g])))
            else:
                v = shared.pop()
                xf, xg = crossed_by[e][f], crossed_by[e][g]
                pf, pg = backmap[f], backmap[g]
                # closed curve v -> xf (along f) -> xg (along e) -> v (along g)
                side_f = is_left_of_path(rot, _step(pf, xf, v), xf, _step(path_e, xf, xg), _away(path_e, xf, xg))
                side_g = is_left_of_path(rot, _step(path_e, xg, xf), xg, _step(pg, xg, v), _away(path_e, xg, xf))
                if side_f != side_g:
                    found.append(Obstruction(FANPLANAR, "II", (e, f, g), (v, xf, xg)))
            if first_only and found:
                return found
    return found


def _meet(a: Edge, b: Edge, pa: tuple, pb: tuple) -> Optional[str]:
    common = set(pa) & set(pb)
    if len(common) != 1:
        return None
    return common.pop()


def _segment(path: tuple, s: str, t: str) -> list[str]:
    i, j = path.index(s), path.index(t)
    return list(path[i:j + 1]) if i <= j else list(reversed(path[j:i + 1]))


def _side_regions(host: CombinatorialDrawing, cycle: list[str], face_of: dict):
    """Union faces not separated by the closed walk; returns (find, left region of the first dart)."""
    on_cycle = {edge_key(a, b) for a, b in zip(cycle, cycle[1:] + cycle[:1])}
    parent = list(range(len(host.faces)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for u, v in host.graph.edges():
        if edge_key(u, v) not in on_cycle:
            a, b = find(face_of[(u, v)]), find(face_of[(v, u)])
            if a != b:
                parent[max(a, b)] = min(a, b)
    return find


def pseudolinear_obstructions(host: CombinatorialDrawing, first_only: bool = False) -> list[Obstruction]:
    backmap = recover_backmap(host)
    edges = sorted(backmap)
    face_of = host.face_of_dart()
    outer_of = host.component_outer_faces()
    rot = host.rotation
    found = []
    touching: dict[str, set[Edge]] = {}
    for e, path in backmap.items():
        for x in path:
            touching.setdefault(x, set()).add(e)
    partners = {e: set() for e in edges}
    for x, es in touching.items():
        for a, b in combinations(es, 2):
            partners[a].add(b)
            partners[b].add(a)
    for a in edges:
        for b in sorted(partners[a]):
            if b <= a:
                continue
            for c in sorted(partners[a] & partners[b]):
                if c <= b:
                    continue
                pa, pb, pc = backmap[a], backmap[b], backmap[c]
                mab, mbc, mca = _meet(a, b, pa, pb), _meet(b, c, pb, pc), _meet(c, a, pc, pa)
                if None in (mab, mbc, mca) or len({mab, mbc, mca}) < 3:
                    continue
                corners = (mab, mbc, mca)
                if all(host.kinds[m] != CROSSING for m in corners):
                    continue
                # walk mab -> mbc along b, mbc -> mca along c, mca -> mab along a
                cyc = _segment(pb, mab, mbc)[:-1] + _segment(pc, mbc, mca)[:-1] + _segment(pa, mca, mab)[:-1]
                if len(set(cyc)) != len(cyc):
                    continue
                find = _side_regions(host, cyc, face_of)
                first = (cyc[0], cyc[1])
                outer = outer_of.get(face_of[first])
                if outer is None:
                    continue
                left_is_outer = find(face_of[first]) == find(outer)
                n = len(cyc)
                ok = True
                for corner in corners:
                    if host.kinds[corner] != CROSSING:
                        continue
                    k = cyc.index(corner)
                    prev, nxt = cyc[k - 1], cyc[(k + 1) % n]
                    for tail in rot[corner]:
                        if tail in (prev, nxt):
                            continue
                        if is_left_of_path(rot, prev, corner, nxt, tail) == left_is_outer:
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    kind = f"O{sum(1 for m in corners if host.kinds[m] != CROSSING)}"
                    found.append(Obstruction(PSEUDOLINEAR, kind, (a, b, c), corners))
                    if first_only:
                        return found
    return found


def check_style_direct(host: CombinatorialDrawing, style: str) -> bool:
    """True when the drawing has none of the style's forbidden configurations."""
    if style == FANPLANAR:
        return not fanplanar_obstructions(host, first_only=True)
    if style == PSEUDOLINEAR:
        return not pseudolinear_obstructions(host, first_only=True)
    raise ValueError(f"unknown style {style!r}; expected one of {STYLES}")
