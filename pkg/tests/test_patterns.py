import random

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from crosskit.drawing import CROSSING, REAL, PartiallyPredrawnGraph, PolylineDrawing, planarize_geometric
from crosskit.generators import (
    random_polyline_drawing,
    random_predrawn_drawing,
    random_straight_line_drawing,
)
from crosskit.geometry import point
from crosskit.graph import Graph, edge_key
from crosskit.obstructions import FANPLANAR, PSEUDOLINEAR, check_style_direct, fanplanar_obstructions
from crosskit.occurrence import InvalidHost, occurs, occurs_any, verify_witness
from crosskit.pattern_gen import gen_fanplanar_patterns, gen_pseudolinear_patterns, is_k_contraction_safe
from crosskit.patterns import (
    PatternSet,
    TopologicalCrossingPattern,
    canonical_code,
    isomorphic,
    pattern_drawing,
    pattern_from_dict,
    pattern_to_dict,
    relabel_drawing,
    validate_pattern,
)


def polyline(vertices, lines):
    """Drawing from vertex coordinates and edge polylines given as point lists."""
    g = Graph(sorted(vertices), list(lines))
    pos = {v: point(*xy) for v, xy in vertices.items()}
    return PolylineDrawing(g, pos, {e: [point(*xy) for xy in pts] for e, pts in lines.items()})


def config_one():
    # one edge crossed by two independent edges
    return polyline(
        {"u": (0, 5), "w": (10, 5), "a1": (3, 0), "a2": (3, 10), "b1": (7, 0), "b2": (7, 10)},
        {("u", "w"): [(0, 5), (10, 5)], ("a1", "a2"): [(3, 0), (3, 10)], ("b1", "b2"): [(7, 0), (7, 10)]},
    )


def config_two():
    # f and g share v; g wraps around so w lies inside v -> x_f -> x_g -> v
    return polyline(
        {"u": (0, 5), "w": (10, 5), "v": (4, 0), "a": (4, 10), "b": (7, 3)},
        {("u", "w"): [(0, 5), (10, 5)], ("a", "v"): [(4, 10), (4, 0)],
         ("b", "v"): [(7, 3), (7, 8), (12, 8), (12, 0), (4, 0)]},
    )


def fan_adjacent_ok():
    # f and g share v and cross e in the ordinary fan way
    return polyline(
        {"u": (0, 5), "w": (10, 5), "v": (5, 0), "a": (2, 10), "b": (8, 10)},
        {("u", "w"): [(0, 5), (10, 5)], ("a", "v"): [(2, 10), (5, 0)], ("b", "v"): [(8, 10), (5, 0)]},
    )


@pytest.fixture(scope="module")
def fan3():
    return gen_fanplanar_patterns(3)


@pytest.fixture(scope="module")
def pl_pred3():
    return gen_pseudolinear_patterns(3, True)


def by_name(ps, name):
    return next(p for p in ps if p.name == name)


# ---------------------------------------------------------------------------
# validate_pattern


def test_basic_fan_pattern_is_valid():
    p = by_name(gen_fanplanar_patterns(0), "fan-I")
    assert not p.ep
    assert validate_pattern(p) == []


def _tiny(**kw):
    g = Graph(["x", "a", "b"], [("x", "a"), ("x", "b")])
    return TopologicalCrossingPattern(g, vc={"x"}, **kw)


def test_ephi_edge_with_abstract_endpoint_is_reported():
    names = [v.name for v in validate_pattern(_tiny(vphi={"x"}, ephi={("x", "a")}))]
    assert "EphiEndpointsViolation" in names


def test_contracted_edge_with_real_endpoint_is_reported():
    names = [v.name for v in validate_pattern(_tiny(ep={("x", "a")}))]
    assert "CrossingLocalityViolation" in names


def test_component_without_crossing_is_reported():
    g = Graph(["x", "a", "b", "c"], [("x", "a"), ("b", "c")])
    names = [v.name for v in validate_pattern(TopologicalCrossingPattern(g, vc={"x"}))]
    assert "ComponentWithoutCrossing" in names


def test_nonplanar_pattern_is_reported():
    verts = [f"v{i}" for i in range(5)]
    g = Graph(verts, [(a, b) for i, a in enumerate(verts) for b in verts[i + 1:]])
    names = [v.name for v in validate_pattern(TopologicalCrossingPattern(g, vc={"v0"}))]
    assert "NonPlanarPattern" in names


# ---------------------------------------------------------------------------
# generators


def test_fan_k0_is_the_four_bases():
    ps = gen_fanplanar_patterns(0)
    assert sorted(p.name for p in ps) == ["fan-I", "fan-I-triangle-0", "fan-I-triangle-1", "fan-II"]


def _subdivide_pattern(p, a, b):
    # independent single subdivision straight on the embedding rotation
    rot = {v: list(r) for v, r in p.embedding.rotation.items()}
    s = "new"
    rot[a][rot[a].index(b)] = s
    rot[b][rot[b].index(a)] = s
    rot[s] = [a, b]
    kinds = {v: CROSSING if v in p.vc or v == s else REAL for v in rot}
    emb = pattern_drawing(rot, kinds)
    pi = None
    if p.pi is not None:
        pv = set(p.pi_vertices())
        pe = set(p.pi_edges())
        if edge_key(a, b) in pe:
            pe -= {edge_key(a, b)}
            pe |= {edge_key(a, s), edge_key(s, b)}
            pv.add(s)
        from crosskit.patterns import restrict_drawing
        pi = restrict_drawing(emb, pv, pe)
    g = Graph(sorted(rot), sorted({edge_key(v, w) for v in rot for w in rot[v]}))
    return TopologicalCrossingPattern(g, vc=p.vc | {s}, pi=pi, embedding=emb)


def test_fan_k1_count_matches_independent_enumeration():
    bases = list(gen_fanplanar_patterns(0))
    found = list(bases)
    for p in bases:
        for a, b in p.graph.edges():
            q = _subdivide_pattern(p, a, b)
            if not any(isomorphic(q, r) for r in found):
                found.append(q)
    assert len(gen_fanplanar_patterns(1)) == len(found) == 18


def test_fan_sizes_are_bounded_and_valid(fan3):
    for p in fan3:
        assert validate_pattern(p) == []
        assert len(p.vc) <= 3 + 3
        assert not p.ep


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_pseudolinear_without_predrawing_has_no_contracted_edges(k):
    for p in gen_pseudolinear_patterns(k, False):
        assert not p.ep
        assert validate_pattern(p) == []
        assert p.crossing_budget() <= k


def test_blue_edges_do_not_touch_predrawn_edges(pl_pred3):
    blue_seen = 0
    for p in pl_pred3:
        assert validate_pattern(p) == []
        ends = {x for e in p.ep for x in e}
        if p.ep:
            blue_seen += 1
            assert all(p.edge_colors[e] == "blue" for e in p.ep)
        for e in p.pi_edges():
            assert not set(e) & ends
    assert blue_seen > 0


def test_contraction_safety_examples():
    assert is_k_contraction_safe([], 5)
    fan = list(gen_fanplanar_patterns(1))
    assert is_k_contraction_safe(fan, 4)
    assert is_k_contraction_safe(gen_pseudolinear_patterns(2, True), 2)


def test_blue_variants_without_closure_are_not_safe():
    full = gen_pseudolinear_patterns(3, True)
    bare = [p for p in full if "|sub" not in p.name]
    assert len(bare) < len(full)
    assert not is_k_contraction_safe(bare, 3)


def test_declared_safety_level():
    s = gen_pseudolinear_patterns(2, True)
    assert s.declared_safety_level == 2


# ---------------------------------------------------------------------------
# isomorphism and serialization


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.booleans())
def test_canonical_code_ignores_labels_and_reflection(seed, mirror):
    ps = list(gen_fanplanar_patterns(1)) + list(gen_pseudolinear_patterns(3, True))
    rng = random.Random(seed)
    p = rng.choice(ps)
    names = list(p.graph.vertices)
    shuffled = names[:]
    rng.shuffle(shuffled)
    m = {a: "q" + b for a, b in zip(names, shuffled)}
    emb = relabel_drawing(p.embedding, m)
    pi = relabel_drawing(p.pi, m) if p.pi is not None else None
    if mirror:
        emb = emb.reflected()
        pi = pi.reflected() if pi is not None else None
    g = Graph(sorted(m.values()), [(m[a], m[b]) for a, b in p.graph.edges()])
    q = TopologicalCrossingPattern(
        g, vc={m[v] for v in p.vc}, vphi={m[v] for v in p.vphi}, ep={(m[a], m[b]) for a, b in p.ep},
        ephi={(m[a], m[b]) for a, b in p.ephi}, vertex_colors={m[v]: c for v, c in p.vertex_colors.items()},
        edge_colors={(m[a], m[b]): c for (a, b), c in p.edge_colors.items()}, pi=pi, embedding=emb)
    assert canonical_code(q) == canonical_code(p)
    assert isomorphic(p, q)


def test_generated_members_are_pairwise_distinct():
    ps = list(gen_fanplanar_patterns(2))
    codes = {canonical_code(p) for p in ps}
    assert len(codes) == len(ps)


def test_pattern_json_round_trip(pl_pred3):
    for p in list(pl_pred3)[:60]:
        q = pattern_from_dict(pattern_to_dict(p))
        assert pattern_to_dict(q) == pattern_to_dict(p)
        assert canonical_code(q) == canonical_code(p)


# ---------------------------------------------------------------------------
# occurrence


def test_configuration_one_is_found():
    host = planarize_geometric(config_one())
    p = by_name(gen_fanplanar_patterns(0), "fan-I")
    w = occurs(p, host)
    assert w is not None
    assert verify_witness(p, host, w) == []


def test_configuration_two_is_found_and_fan_drawing_is_clean(fan3):
    bad = planarize_geometric(config_two())
    assert not check_style_direct(bad, FANPLANAR)
    hit = occurs_any(fan3, bad)
    assert hit is not None and hit[0].name.startswith("fan-II")
    good = planarize_geometric(fan_adjacent_ok())
    assert check_style_direct(good, FANPLANAR)
    assert occurs_any(fan3, good) is None


def test_crossing_free_host_has_no_occurrence(fan3):
    d = random_straight_line_drawing(random.Random(2), 6, 0)
    host = planarize_geometric(d)
    assert occurs_any(fan3, host) is None
    assert check_style_direct(host, FANPLANAR) and check_style_direct(host, PSEUDOLINEAR)


def _blue_path_host(p, length):
    """Host equal to p's embedding with its blue edge replaced by a path
    through ``length`` blue predrawn crossings, each made by a short edge."""
    ((a, b),) = p.ep
    rot = {v: list(r) for v, r in p.embedding.rotation.items()}
    kinds = {v: p.kind(v) for v in rot}
    path = [a] + [f"z{i}" for i in range(length)] + [b]
    rot[a][rot[a].index(b)] = path[1]
    rot[b][rot[b].index(a)] = path[-2]
    gamma_edges = set()
    for i in range(1, len(path) - 1):
        z, lft, rgt = path[i], f"l{i}", f"r{i}"
        rot[z] = [path[i - 1], lft, path[i + 1], rgt]
        rot[lft], rot[rgt] = [z], [z]
        kinds.update({z: CROSSING, lft: REAL, rgt: REAL})
        gamma_edges |= {edge_key(z, lft), edge_key(z, rgt)}
    gamma_edges |= {edge_key(x, y) for x, y in zip(path, path[1:])}
    outer = p.embedding.faces[p.embedding.outer_face][0]
    if edge_key(*outer) == edge_key(a, b):
        outer = (outer[0], path[1] if outer[0] == a else path[-2])
    host = pattern_drawing(rot, kinds, outer_dart=outer)
    host.graph.colors = {z: "blue" for z in path[1:-1]}
    host.gamma_edges = frozenset(gamma_edges)
    host.gamma_vertices = frozenset(x for e in gamma_edges for x in e)
    return host, path


def test_blue_contracted_edge_takes_a_long_path(pl_pred3):
    p = next(q for q in pl_pred3 if len(q.ep) == 1 and len(q.vc) == 2 and q.name.startswith("pl-O1-RRRR"))
    host, path = _blue_path_host(p, 3)
    w = occurs(p, host)
    assert w is not None
    assert verify_witness(p, host, w) == []
    (got,) = w.ep_paths.values()
    assert len(got) - 1 == 4
    assert set(got) == set(path)
    # without the blue color the path may not be used
    host.graph.colors = {}
    assert occurs(p, host) is None


def test_invalid_host_flags_are_rejected():
    d = config_one()
    ctx = PartiallyPredrawnGraph(d.host, PolylineDrawing(d.host, dict(d.positions), {("u", "w"): d.polylines[("u", "w")]}))
    host = planarize_geometric(d, gamma=[("a1", "a2")])
    p = by_name(gen_fanplanar_patterns(0), "fan-I")
    with pytest.raises(InvalidHost):
        occurs(p, host, ctx)
    good = planarize_geometric(d, gamma=[("u", "w")])
    assert occurs(p, good, ctx) is not None


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 100_000))
def test_witnesses_certify_themselves(seed):
    rng = random.Random(seed)
    host = planarize_geometric(random_polyline_drawing(rng, 7, 11, max_crossings=3))
    for p in gen_fanplanar_patterns(3):
        w = occurs(p, host)
        if w is not None:
            assert verify_witness(p, host, w) == []
            assert fanplanar_obstructions(host)
            break


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 100_000))
def test_pseudolinear_witnesses_certify_themselves(seed):
    rng = random.Random(seed)
    _, host = random_predrawn_drawing(rng, 7, 11)
    for p in gen_pseudolinear_patterns(4, True):
        w = occurs(p, host)
        if w is not None:
            assert verify_witness(p, host, w) == []
            assert not check_style_direct(host, PSEUDOLINEAR)
            break


def test_fan_agreement_small_corpus(fan3):
    rng = random.Random(101)
    for _ in range(25):
        host = planarize_geometric(random_polyline_drawing(rng, 7, 11, max_crossings=3))
        assert (occurs_any(fan3, host) is None) == check_style_direct(host, FANPLANAR)


def test_pseudolinear_agreement_without_predrawing():
    ps = gen_pseudolinear_patterns(3, False)
    rng = random.Random(17)
    for _ in range(25):
        host = planarize_geometric(random_polyline_drawing(rng, 7, 11, max_crossings=3))
        assert (occurs_any(ps, host) is None) == check_style_direct(host, PSEUDOLINEAR)


def test_pattern_set_iterates():
    s = PatternSet([], 3)
    assert len(s) == 0 and list(s) == []
