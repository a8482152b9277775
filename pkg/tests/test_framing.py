import random
from itertools import product
from math import factorial

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crosskit.drawing import PartiallyPredrawnGraph, PolylineDrawing
from crosskit.framing import (
    InadmissibleS,
    LabelBudgetExceeded,
    MarkerSchema,
    Not3Connected,
    RotationMarkerLabel,
    admissible_edge_sets,
    build_flip_aware,
    build_framing,
    check_framing,
    closing_faces,
    emit_mso,
    faces_of,
    pruned_label_count,
    separation_classes,
    small_cut_vertices,
    split_pieces,
    three_con_sep,
)
from crosskit.generators import polyhedral_graphs, random_polyline_drawing
from crosskit.geometry import point
from crosskit.graph import Graph, complete_graph, cycle_graph
from crosskit.oracles import sides_in_embedding
from crosskit.pattern_gen import gen_fanplanar_patterns


def ppg(vertices, edges, positions, drawn):
    g = Graph(vertices, edges)
    pos = {v: point(*xy) for v, xy in positions.items()}
    pd = PolylineDrawing(g, pos, {e: [pos[e[0]], pos[e[1]]] for e in drawn})
    return PartiallyPredrawnGraph(g, pd)


def random_instance(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 12)
    d = random_polyline_drawing(rng, n, rng.randint(1, n), max_crossings=4, connected=False, size=30)
    g = d.host.copy()
    for _ in range(rng.choice([0, 3, 8])):
        u, w = rng.sample(g.vertices, 2)
        g.add_edge(u, w)
    return PartiallyPredrawnGraph(g, PolylineDrawing(g, dict(d.positions), dict(d.polylines)))


def cube():
    names = [f"{i:03b}" for i in range(8)]
    edges = [(a, b) for a in names for b in names if a < b and sum(x != y for x, y in zip(a, b)) == 1]
    return Graph(names, edges)


# ----------------------------------------------------------------------
# framing construction


def test_single_edge():
    fr = build_framing(ppg("ab", [("a", "b")], {"a": (0, 0), "b": (4, 0)}, [("a", "b")]))
    assert len(fr.framing_triplets) == 1
    assert len(fr.framing_cycles) == 2
    assert not fr.connector_edges
    assert check_framing(fr) == []


def test_plane_k4():
    pos = {"v0": (0, 0), "v1": (12, 0), "v2": (6, 12), "v3": (6, 4)}
    g = complete_graph(4)
    inst = ppg(g.vertices, g.edges(), pos, g.edges())
    fr = build_framing(inst)
    assert len(fr.framing_triplets) == 6
    assert len(fr.framing_cycles) == 4
    assert check_framing(fr) == []


def test_two_triangles_joined_by_graph_edge():
    pos = {"a": (0, 0), "b": (4, 0), "c": (2, 4), "d": (10, 0), "e": (14, 0), "f": (12, 4)}
    tri = [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f")]
    inst = ppg("abcdef", tri + [("c", "d")], pos, tri)
    fr = build_framing(inst)
    assert fr.connector_edges == frozenset({("c", "d")})
    assert check_framing(fr) == []


def test_nested_triangles_get_a_star_connector():
    pos = {"a": (0, 0), "b": (30, 0), "c": (15, 30), "d": (12, 5), "e": (18, 5), "f": (15, 10)}
    tri = [("a", "b"), ("b", "c"), ("a", "c"), ("d", "e"), ("e", "f"), ("d", "f")]
    fr = build_framing(ppg("abcdef", tri, pos, tri))
    assert fr.connector_edges == frozenset({("a", "d")})
    assert check_framing(fr) == []


@pytest.mark.parametrize("seed", range(20))
def test_random_instances_keep_framing_invariants(seed):
    fr = build_framing(random_instance(seed))
    assert check_framing(fr) == []
    gamma = fr.planarization
    for e, paths in fr.framing_triplets.items():
        assert len(paths) == 3
        assert all(p[0] == e[0] and p[-1] == e[1] and len(p) == 4 for p in paths)
    assert set(fr.framing_cycles) <= set(gamma.graph.vertices)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=100, max_value=10_000))
def test_framing_is_always_plane(seed):
    assert check_framing(build_framing(random_instance(seed))) == []


# ----------------------------------------------------------------------
# markers and flags


def star_instance():
    pos = {"c": (0, 0), "a": (4, 0), "b": (0, 4), "d": (-4, 0), "e": (0, -4)}
    edges = [("a", "c"), ("b", "c"), ("c", "d"), ("c", "e")]
    return ppg("abcde", edges, pos, [])


def label_count_oracle(slots, max_groups):
    """Count labels by listing slot maps into group ids 0..r (0 = unused)."""
    total = 0
    for r in range(0, min(max_groups, slots) + 1):
        onto = sum(1 for f in product(range(r + 1), repeat=slots) if set(range(1, r + 1)) <= set(f))
        families = onto // factorial(r)
        cyclic = factorial(r - 1) if r else 1
        total += families * cyclic * (r + 1)
    return total


@pytest.mark.parametrize("groups", range(0, 7))
def test_pruned_count_matches_oracle(groups):
    assert pruned_label_count(6, groups) == label_count_oracle(6, groups)


def test_star_cut_and_labels():
    inst = star_instance()
    assert small_cut_vertices(inst.graph) == frozenset({"c"})
    assert len(split_pieces(inst.graph)) == 4
    fr = build_flip_aware(inst, 1)
    assert fr.cut_vertices == frozenset({"c"})
    assert len(fr.markers) == 4
    assert all(len(v) == 8030 for v in fr.markers.values())
    assert label_count_oracle(6, 4) == 8030
    assert len(fr.flags) == 4
    for (e, _), (first, last) in fr.flags.items():
        assert fr.frame_graph.has_edge(first, e[0]) and fr.frame_graph.has_edge(last, e[1])


def test_k0_has_no_markers():
    fr = build_flip_aware(star_instance(), 0)
    assert not fr.markers and not fr.flags


def test_label_cap():
    with pytest.raises(LabelBudgetExceeded):
        build_flip_aware(star_instance(), 1, cap=1000)


def test_overlapping_groups_rejected():
    with pytest.raises(ValueError):
        RotationMarkerLabel(frozenset({frozenset({1, 2}), frozenset({2, 3})}),
                            (frozenset({1, 2}), frozenset({2, 3})), 0)


@pytest.mark.parametrize("k", [1, 2])
def test_schema_cardinality(k):
    assert MarkerSchema(k).count == (6 * k) ** (18 * k) * factorial(18 * k) * (18 * k + 1)


def test_schema_enumerates_lazily():
    sample = MarkerSchema(1).sample(5)
    assert len(sample) == 5 and len(set(sample)) == 5


# ----------------------------------------------------------------------
# separation in 3-connected planar graphs


def test_cube_faces():
    assert len(faces_of(cube())) == 6


def test_cube_hexagon_separates_antipodes():
    hexagon = [("001", "011"), ("011", "010"), ("010", "110"), ("110", "100"), ("100", "101"), ("101", "001")]
    assert three_con_sep(cube(), hexagon, "000", "111")


def test_cube_face_does_not_separate():
    square = [("000", "001"), ("001", "011"), ("011", "010"), ("010", "000")]
    assert not three_con_sep(cube(), square, "100", "111")


def test_adjacent_vertices_never_separated():
    g = cube()
    s = [("000", "001"), ("001", "011")]
    for f in closing_faces(g, s):
        assert not three_con_sep(g, s, "100", "101", face=f)


def test_rejects_non_3connected():
    with pytest.raises(Not3Connected):
        three_con_sep(cycle_graph(5), [("v0", "v1")], "v2", "v3")


def test_rejects_degree_three_edge_set():
    with pytest.raises(InadmissibleS):
        separation_classes(complete_graph(4), [("v0", "v1"), ("v0", "v2"), ("v0", "v3")])


def test_polyhedral_counts():
    assert [len(polyhedral_graphs(n)) for n in range(4, 8)] == [1, 2, 7, 34]


def test_exhaustive_agreement_small():
    pairs = 0
    for n in range(4, 7):
        for g in polyhedral_graphs(n):
            for s, f in admissible_edge_sets(g):
                classes = separation_classes(g, s, face=f)
                sides = sides_in_embedding(g, s, f)
                gid = {v: i for i, gr in enumerate(classes) for v in gr}
                off = sorted(sides)
                for i, a in enumerate(off):
                    for b in off[i + 1:]:
                        pairs += 1
                        assert (gid[a] != gid[b]) == (not sides[a] & sides[b]), (s, a, b)
    assert pairs > 1000


# ----------------------------------------------------------------------
# formula skeleton


def test_mso_k0_has_no_identification():
    text = emit_mso(0, [])
    assert "exists" not in text
    assert "PartiallyPredrawnPlanarAfterIdentifying()" in text


def test_mso_one_negated_conjunct_per_pattern():
    pats = list(gen_fanplanar_patterns(2))
    assert emit_mso(1, pats[:1]).count("~(") == 1
    text = emit_mso(2, pats)
    assert text.count("~(") == len(pats)
    assert text.count("exists x") == 2 and "exists M : Set(V)." in text
    assert text == emit_mso(2, pats)
