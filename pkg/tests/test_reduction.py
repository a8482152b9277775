import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crosskit.drawing import PartiallyPredrawnGraph, PolylineDrawing
from crosskit.graph import Graph, complete_graph, cycle_graph
from crosskit.hexgrid import cell_corners, cell_distance, cells_of, concentric_cycle, corner_position, hex_grid, subgrid_centers
from crosskit.limits import BudgetExceeded
from crosskit.oracles import treewidth_exact
from crosskit.pattern_gen import gen_fanplanar_patterns
from crosskit.reduction import (
    HexGridEmbedding,
    ReduceOutcome,
    ReductionRadii,
    choose_deletable_edge,
    delete_edge,
    find_flat_subgrid,
    find_hex_grid,
    identity_embedding,
    proper_components,
    reduction_radii,
    treewidth_upper_bound,
)
from crosskit.solver import ftpcr_decide, ppd_planar

# ---------------------------------------------------------------------------
# instance builders


def glue_k5(g: Graph, anchors, tag: str) -> None:
    """Add three vertices forming a K5 with two adjacent anchor vertices."""
    extra = [f"{tag}{i}" for i in range(3)]
    for v in extra:
        g.add_vertex(v)
    vs = list(anchors) + extra
    for i in range(5):
        for j in range(i + 1, 5):
            if not g.has_edge(vs[i], vs[j]):
                g.add_edge(vs[i], vs[j])


def glue_k33(g: Graph, anchors, tag: str) -> None:
    """K3,3 on two anchors plus four new vertices (anchors on opposite sides)."""
    a, b = anchors
    extra = [f"{tag}{i}" for i in range(4)]
    for v in extra:
        g.add_vertex(v)
    left, right = [a, extra[0], extra[1]], [b, extra[2], extra[3]]
    for x in left:
        for y in right:
            if not g.has_edge(x, y):
                g.add_edge(x, y)


def subdivided(g: Graph) -> Graph:
    out = Graph(g.vertices)
    for u, v in g.edges():
        m = f"{u}|{v}"
        out.add_vertex(m)
        out.add_edge(u, m)
        out.add_edge(m, v)
    return out


def straight_predrawing(g: Graph, edges) -> PolylineDrawing:
    verts = {x for e in edges for x in e}
    pos = {v: corner_position(v) for v in verts}
    return PolylineDrawing(g, pos, {e: [pos[e[0]], pos[e[1]]] for e in edges})


# ---------------------------------------------------------------------------
# radius bookkeeping


@pytest.mark.parametrize("k,m,expected", [
    (0, 0, ReductionRadii(flat=3, grid=3, kept=3, colour=2)),
    (1, 0, ReductionRadii(flat=3, grid=6, kept=3, colour=2)),
    (0, 4, ReductionRadii(flat=15, grid=15, kept=11, colour=10)),
    (2, 5, ReductionRadii(flat=28, grid=84, kept=13, colour=12)),
])
def test_reduction_radii(k, m, expected):
    assert reduction_radii(k, m) == expected


@given(st.integers(0, 6), st.integers(0, 12))
def test_radii_nest(k, m):
    r = reduction_radii(k, m)
    assert r.grid == (k + 1) * r.flat
    assert r.flat - r.kept == (k + 1) * m
    assert r.kept - r.colour == 1
    # the k + 1 candidate subgrids fit
    assert len(subgrid_centers(r.grid, r.flat, k + 1)) == k + 1


def test_bad_radii_rejected():
    with pytest.raises(ValueError):
        ReductionRadii(flat=2, grid=1, kept=1, colour=1)


# ---------------------------------------------------------------------------
# hexagonal grids


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_hex_grid_counts(r):
    g = hex_grid(r)
    assert len(g) == 6 * r * r
    assert g.edge_count() == 9 * r * r - 3 * r
    assert nx.check_planarity(nx.Graph(g.edges()))[0]
    for i in range(1, r + 1):
        cyc = nx.Graph(concentric_cycle(r, i))
        assert cyc.number_of_nodes() == cyc.number_of_edges() == 12 * i - 6
        assert nx.is_connected(cyc) and all(d == 2 for _, d in cyc.degree)


@given(st.integers(1, 3), st.integers(0, 3))
def test_subgrid_centers_are_disjoint(r, k):
    s = (k + 1) * r
    centers = subgrid_centers(s, r, k + 1)
    outer = set(cells_of(s))
    verts = []
    for c in centers:
        cells = cells_of(r, c)
        assert set(cells) <= outer
        verts.append({v for cell in cells for v in cell_corners(cell)})
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            assert not verts[i] & verts[j]
    for a in centers:
        for b in centers:
            assert a == b or cell_distance(a, b) >= 2 * r


def test_find_hex_grid_identity():
    g = hex_grid(2)
    h = find_hex_grid(g, 2)
    assert h is not None and h.problems(g) == []
    assert all(len(p) == 2 for p in h.edge_image.values())


def test_find_hex_grid_tree_has_none():
    tree = Graph([f"t{i}" for i in range(40)], [(f"t{i}", f"t{i // 2}") for i in range(1, 40)])
    assert find_hex_grid(tree, 1) is None


def test_find_hex_grid_subdivided():
    g = subdivided(hex_grid(3))
    h = find_hex_grid(g, 3)
    assert h is not None and h.problems(g) == []
    assert {len(p) - 1 for p in h.edge_image.values()} == {2}


def test_find_hex_grid_too_small():
    assert find_hex_grid(hex_grid(2), 3) is None


def test_find_hex_grid_budget():
    g = Graph()
    rg = nx.random_regular_graph(3, 30, seed=1)
    for v in rg:
        g.add_vertex(f"v{v}")
    for a, b in rg.edges:
        g.add_edge(f"v{a}", f"v{b}")
    with pytest.raises(BudgetExceeded):
        find_hex_grid(g, 2, budget=20_000)


def test_embedding_problems_are_reported():
    h = identity_embedding(1)
    g = hex_grid(1)
    e = next(iter(h.edge_image))
    broken = HexGridEmbedding(1, dict(h.vertex_image), {**h.edge_image, e: (e[0], "nowhere", e[1])})
    assert broken.problems(g)


# ---------------------------------------------------------------------------
# proper components


def test_components_of_bare_grid():
    g = hex_grid(2)
    comps = proper_components(g, identity_embedding(2))
    assert comps.components == []
    assert comps.plus == comps.image


def test_pendant_and_isolated_components():
    g = hex_grid(2)
    g.add_vertex("p")
    g.add_edge("p", "h2,-1,-1")
    g.add_vertex("lonely")
    comps = proper_components(g, identity_embedding(2))
    by_vertices = {c.vertices: c for c in comps.components}
    assert by_vertices[("p",)].proper and by_vertices[("p",)].attachments == (("h2,-1,-1", "p"),)
    assert not by_vertices[("lonely",)].proper
    assert "p" in comps.plus and "lonely" not in comps.plus


def test_chord_is_a_trivial_component():
    g = hex_grid(1)
    a, _, c, *_ = cell_corners((0, 0, 0))
    g.add_edge(a, c)
    comps = proper_components(g, identity_embedding(1))
    assert [c.vertices for c in comps.components] == [()]
    assert comps.plus.has_edge(a, c)


def test_subgrid_components_stop_at_the_surrounding_grid():
    g = hex_grid(6)
    glue_k5(g, cell_corners((3, -3, 0))[:2], "k")
    h = identity_embedding(6)
    left, right = [h.subgrid(c, 3) for c in subgrid_centers(6, 3, 2)]
    assert any(set(c.vertices) == {"k0", "k1", "k2"} and not c.external
               for c in proper_components(g, left).components)
    assert "k0" not in proper_components(g, right).plus


# ---------------------------------------------------------------------------
# flat subgrids


def test_planar_grid_single_candidate_is_flat():
    g = hex_grid(2)
    g.add_vertex("p")
    g.add_edge("p", "h2,-1,-1")
    inst = PartiallyPredrawnGraph(g)
    flat = find_flat_subgrid(inst, identity_embedding(2), 2, 0)
    assert flat is not None


def test_flat_subgrid_avoids_glued_k5():
    g = hex_grid(4)
    glue_k5(g, cell_corners((2, -2, 0))[:2], "k")
    inst = PartiallyPredrawnGraph(g)
    flat = find_flat_subgrid(inst, identity_embedding(4), 2, 1)
    assert flat is not None
    # the second candidate, away from the K5
    assert flat.vertex_image == identity_embedding(4).subgrid((-2, 2, 0), 2).vertex_image


def test_all_candidates_spoiled():
    g = hex_grid(4)
    glue_k5(g, cell_corners((2, -2, 0))[:2], "k")
    glue_k5(g, cell_corners((-2, 2, 0))[:2], "m")
    inst = PartiallyPredrawnGraph(g)
    assert find_flat_subgrid(inst, identity_embedding(4), 2, 1) is None


def test_flat_subgrid_radius_precondition():
    with pytest.raises(ValueError):
        find_flat_subgrid(PartiallyPredrawnGraph(hex_grid(2)), identity_embedding(2), 2, 1)


# ---------------------------------------------------------------------------
# treewidth


def test_treewidth_examples():
    tree = Graph([f"t{i}" for i in range(9)], [(f"t{i}", f"t{i // 2}") for i in range(1, 9)])
    assert treewidth_upper_bound(tree) == 1
    assert treewidth_upper_bound(cycle_graph(7)) == 2
    assert treewidth_upper_bound(complete_graph(5)) == 4
    assert treewidth_exact(complete_graph(5)) == 4
    assert treewidth_upper_bound(Graph(["a", "b"])) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_treewidth_bound_is_an_upper_bound(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 8)
    verts = [f"v{i}" for i in range(n)]
    pairs = [(a, b) for i, a in enumerate(verts) for b in verts[i + 1:]]
    g = Graph(verts, rng.sample(pairs, rng.randint(0, len(pairs))))
    assert treewidth_upper_bound(g) >= treewidth_exact(g)


# ---------------------------------------------------------------------------
# the deletion rule


def test_outcome_variants():
    assert ReduceOutcome.delete(("b", "a")).as_dict() == {"outcome": "delete", "edge": ["a", "b"]}
    assert ReduceOutcome.bounded_treewidth(3).as_dict()["bound"] == 3
    assert ReduceOutcome.no_instance().as_dict() == {"outcome": "no-instance"}
    with pytest.raises(ValueError):
        ReduceOutcome("delete")
    with pytest.raises(ValueError):
        ReduceOutcome("no-instance", bound=2)


def test_tree_gives_bounded_treewidth():
    tree = Graph([f"t{i}" for i in range(30)], [(f"t{i}", f"t{i // 2}") for i in range(1, 30)])
    out = choose_deletable_edge(PartiallyPredrawnGraph(tree), 0)
    assert out == ReduceOutcome.bounded_treewidth(1)


def test_subdivided_grid_deletes_on_innermost_cycle():
    g = subdivided(hex_grid(3))
    out = choose_deletable_edge(PartiallyPredrawnGraph(g), 0)
    assert out.kind == "delete"
    centre = set(cell_corners((0, 0, 0)))
    inner = {f"{u}|{v}" for u, v in concentric_cycle(3, 1)}
    assert set(out.edge) <= centre | inner


def test_spoiled_grid_is_no_instance():
    g = hex_grid(3)
    glue_k5(g, cell_corners((0, 0, 0))[:2], "k")
    assert choose_deletable_edge(PartiallyPredrawnGraph(g), 0) == ReduceOutcome.no_instance()


def test_two_coloured_edge_is_preferred():
    g = hex_grid(3)
    g.colors = {v: "black" for v in g.vertices}
    target = cell_corners((1, -1, 0))[3]
    g.colors[target] = "red"
    out = choose_deletable_edge(PartiallyPredrawnGraph(g), 0)
    assert out.kind == "delete" and target in out.edge


def test_delete_edge_updates_predrawing():
    g = hex_grid(1)
    edges = g.edges()
    inst = PartiallyPredrawnGraph(g, straight_predrawing(g, edges))
    smaller = delete_edge(inst, edges[0])
    assert not smaller.graph.has_edge(*edges[0])
    assert edges[0] not in smaller.predrawing.polylines
    assert len(smaller.gamma_edges) == len(edges) - 1


# ---------------------------------------------------------------------------
# deletion-equivalence corpus


SHRUNK_K1 = ReductionRadii(flat=1, grid=2, kept=1, colour=1)
TINY = ReductionRadii(flat=1, grid=1, kept=1, colour=1)


def _corpus():
    """(name, instance, k, patterns, radii); radii None means the proven ones."""
    out = []
    g = hex_grid(3)
    out.append(("grid", PartiallyPredrawnGraph(g), 0, [], None))
    out.append(("subdivided", PartiallyPredrawnGraph(subdivided(hex_grid(3))), 0, [], None))

    g = hex_grid(3)
    for i, cell in enumerate([(0, 0, 0), (1, -1, 0), (-2, 1, 1)]):
        cs = cell_corners(cell)
        g.add_vertex(f"hub{i}")
        for c in cs:
            g.add_edge(f"hub{i}", c)
    g.add_vertex("leaf")
    g.add_edge("leaf", "hub0")
    out.append(("wheels", PartiallyPredrawnGraph(g), 0, [], None))

    g = hex_grid(3)
    centre = cell_corners((0, 0, 0))
    inner = concentric_cycle(3, 1)
    out.append(("predrawn-centre", PartiallyPredrawnGraph(g, straight_predrawing(g, inner)), 0, [], None))

    g = hex_grid(3)
    g.add_vertex("in")
    for c in centre[::2]:
        g.add_edge("in", c)
    out.append(("predrawn-all", PartiallyPredrawnGraph(g, straight_predrawing(g, hex_grid(3).edges())), 0, [], None))

    g = hex_grid(3)
    g.colors = {v: "black" for v in g.vertices}
    g.colors[cell_corners((1, -1, 0))[3]] = "red"
    out.append(("coloured", PartiallyPredrawnGraph(g), 0, [], None))

    g = hex_grid(2)
    glue_k5(g, cell_corners((1, -1, 0))[:2], "k")
    out.append(("k5-shrunk", PartiallyPredrawnGraph(g), 1, [], SHRUNK_K1))

    g = hex_grid(2)
    glue_k33(g, cell_corners((1, -1, 0))[::3], "q")
    out.append(("k33-shrunk", PartiallyPredrawnGraph(g), 1, [], SHRUNK_K1))

    g = hex_grid(2)
    glue_k5(g, cell_corners((1, -1, 0))[:2], "k")
    glue_k5(g, cell_corners((1, 0, -1))[2:4], "m")
    out.append(("two-k5-shrunk", PartiallyPredrawnGraph(g), 1, [], SHRUNK_K1))

    g = hex_grid(2)
    glue_k5(g, cell_corners((1, -1, 0))[:2], "k")
    out.append(("k5-fanplanar-shrunk", PartiallyPredrawnGraph(g), 1, gen_fanplanar_patterns(1), SHRUNK_K1))

    wheel = hex_grid(1)
    wheel.add_vertex("c")
    for v in list(wheel.vertices)[:-1]:
        wheel.add_edge("c", v)
    out.append(("wheel-tiny", PartiallyPredrawnGraph(wheel), 0, [], TINY))

    hexagon = hex_grid(1)
    cs = cell_corners((0, 0, 0))
    for v in ("x", "y"):
        hexagon.add_vertex(v)
    for i in range(3):
        hexagon.add_edge("x", cs[2 * i])
        hexagon.add_edge("y", cs[2 * i + 1])
    out.append(("hexagon-two-hubs-tiny", PartiallyPredrawnGraph(hexagon), 0, [], TINY))
    return out


CORPUS = _corpus()


@pytest.mark.parametrize("name,inst,k,pats,radii", CORPUS, ids=[c[0] for c in CORPUS])
def test_deletion_keeps_the_answer(name, inst, k, pats, radii):
    out = choose_deletable_edge(inst, k, pats, radii=radii)
    assert out.kind == "delete", out
    before = ftpcr_decide(inst, k, pats) is not None
    after = ftpcr_decide(delete_edge(inst, out.edge), k, pats) is not None
    assert before == after


@pytest.mark.parametrize("name,inst,k,pats,radii", CORPUS, ids=[c[0] for c in CORPUS])
def test_returned_subgrid_is_flat(name, inst, k, pats, radii):
    radii = radii or reduction_radii(k, max((len(p.vertices) for p in pats), default=0))
    h = find_hex_grid(inst.graph, radii.grid)
    flat = find_flat_subgrid(inst, h, radii.flat, k)
    assert flat is not None and flat.problems(inst.graph) == []
    plus = proper_components(inst.graph, flat).plus
    g = Graph(list(plus.vertices) + [v for v in inst.gamma_vertices if v not in plus],
              sorted(set(plus.edges()) | set(inst.gamma_edges)))
    check = PartiallyPredrawnGraph(g, inst.predrawing)
    if inst.gamma_planarization().crossing_count:
        assert ftpcr_decide(check, 0) is not None
    else:
        assert ppd_planar(check) is not None
