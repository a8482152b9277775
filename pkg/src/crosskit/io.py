"""Readers and writers for the JSON file formats.

All writers produce sorted keys and a fixed indentation so that equal
objects serialize to equal bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .drawing import PartiallyPredrawnGraph, PolylineDrawing
from .geometry import format_point, point
from .graph import Graph, edge_key

PathLike = Union[str, Path]


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path: PathLike, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def read_json(path: PathLike) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


# ----------------------------------------------------------------------
# .ppg.json


def ppg_to_dict(inst: PartiallyPredrawnGraph) -> dict:
    g = inst.graph
    out: dict[str, Any] = {
        "vertices": list(g.vertices),
        "edges": [list(e) for e in g.edges()],
    }
    if g.colors:
        out["colors"] = dict(sorted(g.colors.items()))
    pd = inst.predrawing
    if pd is not None and (pd.positions or pd.polylines):
        out["predrawn"] = {
            "vertices": {v: format_point(pd.positions[v]) for v in g.vertices if v in pd.positions},
            "edges": [
                {"ends": list(e), "bends": [format_point(p) for p in pd.polylines[e][1:-1]]}
                for e in sorted(pd.polylines)
            ],
        }
    return out


def ppg_from_dict(data: dict) -> PartiallyPredrawnGraph:
    if not isinstance(data, dict) or "vertices" not in data or "edges" not in data:
        raise ValueError("a .ppg.json object needs 'vertices' and 'edges'")
    g = Graph([str(v) for v in data["vertices"]], [(str(u), str(v)) for u, v in data["edges"]],
              {str(k): str(c) for k, c in data.get("colors", {}).items()})
    pre = data.get("predrawn")
    if not pre:
        return PartiallyPredrawnGraph(g, None)
    positions = {str(v): point(*xy) for v, xy in pre.get("vertices", {}).items()}
    polylines = {}
    for item in pre.get("edges", []):
        u, v = (str(x) for x in item["ends"])
        if u not in positions or v not in positions:
            raise ValueError(f"predrawn edge {u}-{v} has an unplaced endpoint")
        bends = [point(*xy) for xy in item.get("bends", [])]
        polylines[edge_key(u, v)] = ([positions[u]] + bends + [positions[v]]) if (u, v) == edge_key(u, v) \
            else ([positions[v]] + bends[::-1] + [positions[u]])
    drawing = PolylineDrawing(g.subgraph(positions), positions, polylines)
    return PartiallyPredrawnGraph(g, drawing)


def load_ppg(path: PathLike) -> PartiallyPredrawnGraph:
    return ppg_from_dict(read_json(path))


def save_ppg(path: PathLike, inst: PartiallyPredrawnGraph) -> None:
    write_json(path, ppg_to_dict(inst))


def drawing_to_ppg(d: PolylineDrawing) -> PartiallyPredrawnGraph:
    """Wrap a full drawing as a fully predrawn instance."""
    return PartiallyPredrawnGraph(d.host, d)


# ----------------------------------------------------------------------
# combinatorial drawings (planarization dumps)


def combinatorial_to_dict(cd) -> dict:
    out = {
        "vertices": [{"id": v, "kind": cd.kinds[v]} for v in cd.graph.vertices],
        "rotation": {v: list(cd.rotation[v]) for v in cd.graph.vertices},
        "faces": [[a for a, _ in f] for f in cd.faces],
        "crossings": cd.crossing_count,
    }
    if cd.outer_face is not None:
        out["outer_face"] = cd.outer_face
    if cd.edge_backmap:
        out["edge_backmap"] = [{"edge": list(e), "path": list(p)} for e, p in sorted(cd.edge_backmap.items())]
    if cd.positions:
        out["positions"] = {v: format_point(p) for v, p in cd.positions.items()}
    if cd.gamma_vertices:
        out["gamma_vertices"] = sorted(cd.gamma_vertices)
    if cd.gamma_edges:
        out["gamma_edges"] = [list(e) for e in sorted(cd.gamma_edges)]
    if cd.graph.colors:
        out["colors"] = dict(sorted(cd.graph.colors.items()))
    if cd.regions is not None:
        out["regions"] = sorted(sorted(r) for r in cd.regions)
    if cd.outer_region is not None:
        out["outer_region"] = sorted(cd.outer_region)
    return out


def combinatorial_from_dict(data: dict):
    from .drawing import CombinatorialDrawing

    kinds = {v["id"]: v["kind"] for v in data["vertices"]}
    cd = CombinatorialDrawing.from_rotation(
        {v: data["rotation"][v] for v in kinds}, kinds,
        outer_face=data.get("outer_face"),
        edge_backmap={tuple(item["edge"]): tuple(item["path"]) for item in data.get("edge_backmap", [])},
        gamma_vertices=frozenset(data.get("gamma_vertices", [])),
        gamma_edges=frozenset(tuple(e) for e in data.get("gamma_edges", [])),
        positions={v: point(*xy) for v, xy in data["positions"].items()} if "positions" in data else None,
        colors=data.get("colors"),
        regions=[frozenset(r) for r in data["regions"]] if "regions" in data else None,
        outer_region=frozenset(data["outer_region"]) if "outer_region" in data else None,
    )
    return cd
