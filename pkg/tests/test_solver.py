import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crosskit.drawing import PartiallyPredrawnGraph, PolylineDrawing, equivalent
from crosskit.geometry import point
from crosskit.graph import Graph, complete_bipartite, complete_graph, cycle_graph
from crosskit.limits import BudgetExceeded, Counter
from crosskit.occurrence import occurs
from crosskit.oracles import crossing_number_bruteforce, planar_embedding_count_bruteforce
from crosskit.pattern_gen import gen_fanplanar_patterns
from crosskit.patterns import restrict_drawing
from crosskit.solver import (
    CrossingConfiguration,
    _embeddings,
    _GammaGuide,
    crossing_number,
    ftpcr_decide,
    ppd_planar,
)

TRIANGLE = [("a", "b"), ("b", "c"), ("a", "c")]
CORNERS = {"a": (0, 0), "b": (10, 0), "c": (0, 10)}


def ppg(vertices, edges, positions, drawn):
    g = Graph(vertices, edges)
    pos = {v: point(*xy) for v, xy in positions.items()}
    pd = PolylineDrawing(g, pos, {e: [pos[e[0]], pos[e[1]]] for e in drawn})
    return PartiallyPredrawnGraph(g, pd)


def restricted_to_gamma(cd, inst):
    """The returned drawing with new crossings smoothed away, on the predrawn part only."""
    gamma = inst.gamma_planarization()
    keep = set(gamma.graph.vertices) | {x for e in cd.gamma_edges for x in e}
    sub = restrict_drawing(cd, keep, cd.gamma_edges)
    return sub, gamma


# ---------------------------------------------------------------------------
# ppd_planar


def test_k4_with_predrawn_triangle_is_embeddable():
    k4 = TRIANGLE + [("a", "d"), ("b", "d"), ("c", "d")]
    inst = ppg(list("abcd"), k4, CORNERS, TRIANGLE)
    cd = ppd_planar(inst)
    assert cd is not None and cd.crossing_count == 0
    sub, gamma = restricted_to_gamma(cd, inst)
    assert equivalent(sub, gamma, sphere=True)


def test_k5_is_not_planar():
    assert ppd_planar(PartiallyPredrawnGraph(complete_graph(5))) is None


def test_apex_over_plane_k4_is_rejected():
    k4 = TRIANGLE + [("a", "d"), ("b", "d"), ("c", "d")]
    edges = k4 + [(x, "e") for x in "abcd"]
    inst = ppg(list("abcde"), edges, {**CORNERS, "d": (2, 2)}, k4)
    assert ppd_planar(inst) is None


def test_predrawn_sides_decide_planarity():
    edges = TRIANGLE + [("d", "e")]
    inside = ppg(list("abcde"), edges, {**CORNERS, "d": (2, 2), "e": (3, 3)}, TRIANGLE)
    split = ppg(list("abcde"), edges, {**CORNERS, "d": (2, 2), "e": (20, 20)}, TRIANGLE)
    assert ppd_planar(inside) is not None
    assert ppd_planar(split) is None
    found = ftpcr_decide(split, 1)
    assert found is not None
    cd, config = found
    assert len(config.identified_pairs) == 1
    assert config.problems(1) == []


def test_embedding_respects_predrawn_orientation():
    # a predrawn star fixes the rotation at its centre
    star = [("o", x) for x in "pqrs"]
    inst = ppg(list("opqrs"), star + [("p", "q")], {"o": (0, 0), "p": (5, 0), "q": (0, 5), "r": (-5, 0), "s": (0, -5)}, star)
    cd = ppd_planar(inst)
    assert cd is not None
    gamma = inst.gamma_planarization()
    order = [w for w in cd.rotation["o"]]
    i = order.index("p")
    assert order[i:] + order[:i] == list(gamma.rotation["o"][gamma.rotation["o"].index("p"):]) + \
        list(gamma.rotation["o"][:gamma.rotation["o"].index("p")])


# ---------------------------------------------------------------------------
# embedding enumeration


def _count_embeddings(g: Graph) -> int:
    adj = {v: g.neighbors(v) for v in g.vertices}
    return sum(1 for _ in _embeddings(adj, _GammaGuide(None, {}), 1, Counter(10**7)))


@pytest.mark.parametrize("g", [cycle_graph(4), complete_graph(4), complete_bipartite(2, 3),
                               Graph(list("abcde"), [("a", "b"), ("a", "c"), ("a", "d"), ("d", "e"), ("c", "e")])])
def test_embedding_count_matches_rotation_enumeration(g):
    assert _count_embeddings(g) == planar_embedding_count_bruteforce(g)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000))
def test_embedding_count_random(seed):
    rng = random.Random(seed)
    n = rng.randint(3, 6)
    verts = [f"v{i}" for i in range(n)]
    edges = {tuple(sorted((verts[i], verts[rng.randrange(i)]))) for i in range(1, n)}
    for _ in range(rng.randint(0, 4)):
        a, b = rng.sample(verts, 2)
        edges.add(tuple(sorted((a, b))))
    g = Graph(verts, sorted(edges))
    assert _count_embeddings(g) == planar_embedding_count_bruteforce(g)


# ---------------------------------------------------------------------------
# ftpcr_decide


@pytest.mark.parametrize("g,cr", [(complete_graph(5), 1), (complete_bipartite(3, 3), 1)])
def test_small_crossing_numbers(g, cr):
    inst = PartiallyPredrawnGraph(g)
    assert ftpcr_decide(inst, cr - 1) is None
    found = ftpcr_decide(inst, cr)
    assert found is not None
    cd, config = found
    assert cd.crossing_count == cr
    assert cd.euler_ok()


def test_planar_graph_needs_no_crossings_even_with_patterns():
    inst = PartiallyPredrawnGraph(cycle_graph(5))
    found = ftpcr_decide(inst, 0, gen_fanplanar_patterns(1))
    assert found is not None and found[0].crossing_count == 0


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10_000))
def test_empty_pattern_crossing_number_matches_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 6)
    verts = [f"v{i}" for i in range(n)]
    all_pairs = [(a, b) for i, a in enumerate(verts) for b in verts[i + 1:]]
    edges = rng.sample(all_pairs, rng.randint(n, min(len(all_pairs), 12)))
    g = Graph(verts, edges)
    assert crossing_number(g, 3) == crossing_number_bruteforce(g, 3)


def test_monotone_in_k():
    inst = PartiallyPredrawnGraph(complete_bipartite(3, 3))
    results = [ftpcr_decide(inst, k) is not None for k in range(3)]
    assert results == sorted(results)


def test_fan_patterns_keep_k5_at_one_crossing():
    # K5 with one crossing is fan-planar, so patterns do not change the answer
    inst = PartiallyPredrawnGraph(complete_graph(5))
    pats = gen_fanplanar_patterns(1)
    found = ftpcr_decide(inst, 1, pats)
    assert found is not None
    cd, _ = found
    assert all(occurs(p, cd) is None for p in pats)


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        ftpcr_decide(PartiallyPredrawnGraph(complete_graph(6)), 3, simple=True, budget=50)


def test_configuration_problems():
    e, f = ("a", "b"), ("c", "d")
    bad = CrossingConfiguration([((e, 0), (e, 1)), ((e, 0), (f, 0))])
    msgs = bad.problems(1)
    assert any("one edge" in m for m in msgs)
    assert any("twice" in m for m in msgs)
    assert any("exceed" in m for m in msgs)
