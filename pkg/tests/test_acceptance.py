"""Acceptance criteria 1-10, each at its stated size and time limit.

Each test records a one-line detail; ``conftest.py`` prints a pass/fail
line per criterion at the end of the run.
"""

import json
import os
import random
import subprocess
import sys
import time
from itertools import product
from math import factorial
from pathlib import Path

import pytest

from crosskit.constants import M_STAR
from crosskit.drawing import PartiallyPredrawnGraph, PolylineDrawing, planarize_geometric
from crosskit.framing import (
    MarkerSchema,
    admissible_edge_sets,
    build_flip_aware,
    build_framing,
    check_framing,
    separation_classes,
)
from crosskit.generators import (
    polyhedral_graphs,
    random_polyline_drawing,
    random_predrawn_drawing,
    random_straight_line_drawing,
)
from crosskit.graph import Graph, complete_bipartite, complete_graph
from crosskit.hardness import (
    HardnessInstance,
    GridTilingInstance,
    build_instance,
    random_grid_tiling,
    shadow_bounds_section,
    solve_grid_tiling,
    solve_hardness,
    verify_instance,
    widen_channel,
)
from crosskit.io import combinatorial_from_dict, combinatorial_to_dict, ppg_from_dict, ppg_to_dict, read_json
from crosskit.obstructions import FANPLANAR, PSEUDOLINEAR, check_style_direct
from crosskit.occurrence import occurs_any
from crosskit.oracles import crossing_number_bruteforce, sides_in_embedding
from crosskit.pattern_gen import gen_fanplanar_patterns, gen_pseudolinear_patterns
from crosskit.patterns import pattern_set_from_list, pattern_set_to_list
from crosskit.reduction import (
    choose_deletable_edge,
    delete_edge,
    find_flat_subgrid,
    find_hex_grid,
    proper_components,
    reduction_radii,
)
from crosskit.solver import crossing_number, ftpcr_decide, ppd_planar
from test_reduction import CORPUS


def report(record_property, text):
    record_property("detail", text)
    print(text)


# ----------------------------------------------------------------------
# 1. crossing numbers


def test_criterion_1_crossing_numbers(record_property):
    cases = [("K5", complete_graph(5), 1), ("K3,3", complete_bipartite(3, 3), 1), ("K6", complete_graph(6), 3)]
    parts = []
    for name, g, expected in cases:
        t = time.perf_counter()
        got = crossing_number(g)
        took = time.perf_counter() - t
        assert got == expected
        assert took < 60
        assert crossing_number_bruteforce(g, expected) == expected
        parts.append(f"{name}={got} ({took:.1f}s)")
    report(record_property, "crnum " + ", ".join(parts) + ", oracle agrees")


# ----------------------------------------------------------------------
# 2-3. style agreement


def test_criterion_2_fanplanar_agreement(record_property):
    fan = gen_fanplanar_patterns(3)
    rng = random.Random(2024)
    yes = 0
    for i in range(200):
        host = planarize_geometric(random_polyline_drawing(rng, 7, 11, max_crossings=3))
        direct = check_style_direct(host, FANPLANAR)
        assert (occurs_any(fan, host) is None) == direct, f"drawing {i}"
        yes += direct
    report(record_property, f"fan-planar: 200/200 agree ({yes} fan-planar, {200 - yes} not)")


def test_criterion_3_pseudolinear_agreement(record_property):
    predrawn = gen_pseudolinear_patterns(6, True)
    rng = random.Random(5)
    yes = 0
    for i in range(100):
        _, host = random_predrawn_drawing(rng, 7, 11)
        direct = check_style_direct(host, PSEUDOLINEAR)
        assert (occurs_any(predrawn, host) is None) == direct, f"predrawn drawing {i}"
        yes += direct
    plain = gen_pseudolinear_patterns(6, False)
    rng = random.Random(6)
    for i in range(50):
        host = planarize_geometric(random_straight_line_drawing(rng, 8, 14))
        assert check_style_direct(host, PSEUDOLINEAR), f"straight-line drawing {i}"
        assert occurs_any(plain, host) is None, f"straight-line drawing {i}"
    report(record_property, f"pseudolinear: 100/100 predrawn agree ({yes} pseudolinear), 50/50 straight-line agree")


# ----------------------------------------------------------------------
# 4. separation in 3-connected planar graphs


def test_criterion_4_three_con_sep_exhaustive(record_property):
    t = time.perf_counter()
    cases = pairs = 0
    for n in range(4, 9):
        for g in polyhedral_graphs(n):
            for s, face in admissible_edge_sets(g):
                cases += 1
                classes = separation_classes(g, s, face=face)
                sides = sides_in_embedding(g, s, face)
                gid = {v: i for i, gr in enumerate(classes) for v in gr}
                off = sorted(sides)
                for i, a in enumerate(off):
                    for b in off[i + 1:]:
                        pairs += 1
                        assert (gid[a] != gid[b]) == (not sides[a] & sides[b]), (g.edges(), s, a, b)
    took = time.perf_counter() - t
    assert took < 600
    report(record_property, f"3ConSep: {cases} (S, face) cases, {pairs} pairs, 0 disagreements, {took:.0f}s")


# ----------------------------------------------------------------------
# 5-7. hardness construction

_BUILT: dict = {}


def tile_set_instances():
    if "tile_sets" not in _BUILT:
        rng = random.Random(606)
        gts = [random_grid_tiling(rng, 2, M_STAR) for _ in range(20)]
        _BUILT["tile_sets"] = [(gt, build_instance(gt)) for gt in gts]
    return _BUILT["tile_sets"]


def test_criterion_5_shadow_bounds_funnel(record_property):
    count = 0
    for gt, inst in tile_set_instances():
        m = gt.m
        for rec in inst.cells.values():
            chans = [c for g in rec.filtering.values() for c in g.channels.values()]
            chans += [c for cs in rec.vh_channels.values() for c in cs]
            for c in chans:
                for h in (0, c.a, m ** 8):
                    assert shadow_bounds_section(c, h), (rec.cell, c.corners, h)
                    count += 1
    report(record_property, f"shadow >= exact funnel section on {count} (channel, h) pairs, exact arithmetic")


def test_criterion_6_geometric_checks(record_property):
    assert 2 <= M_STAR <= 16
    fallback = 0
    bits = 0
    caught = 0
    for idx, (gt, inst) in enumerate(tile_set_instances()):
        rep = verify_instance(inst)
        for name in "abcdef":
            assert rep.checks[name].passed, (idx, name, rep.checks[name].failures[:1])
        assert rep.passed, (idx, rep.first_failure())
        assert inst.max_bit_length() <= inst.bit_length_bound()
        fallback += rep.fallback_used
        bits = max(bits, rep.max_bit_length)
        rng = random.Random(idx)
        cell = rng.choice(gt.cells())
        side = rng.choice("bltr")
        tile = rng.choice(sorted(gt.tiles_of(cell)))
        bad = verify_instance(widen_channel(gt, cell, side, tile))
        assert not bad.passed, (idx, cell, side, tile)
        caught += 1
    report(record_property, f"m*={M_STAR}: 20/20 tile sets pass (a)-(f) and (g); {caught}/20 widened channels "
                            f"detected; fallback used {fallback}x; max bit length {bits}")


def test_criterion_7_reduction_iff(record_property):
    rng = random.Random(707)
    yes = worst = 0
    for i in range(30):
        t = time.perf_counter()
        gt = random_grid_tiling(rng, 2, M_STAR, solvable=(i % 2 == 0))
        direct = solve_grid_tiling(gt) is not None
        placement = solve_hardness(build_instance(gt))
        took = time.perf_counter() - t
        assert direct == (placement is not None), i
        assert took < 300
        yes += direct
        worst = max(worst, took)
    report(record_property, f"30/30 agree ({yes} yes, {30 - yes} no) at k=2, m={M_STAR}; slowest {worst:.1f}s")


# ----------------------------------------------------------------------
# 8. edge deletion


def flat_by_planarity(inst, flat) -> bool:
    plus = proper_components(inst.graph, flat).plus
    g = Graph(list(plus.vertices) + [v for v in inst.gamma_vertices if v not in plus],
              sorted(set(plus.edges()) | set(inst.gamma_edges)))
    check = PartiallyPredrawnGraph(g, inst.predrawing)
    if inst.gamma_planarization().crossing_count:
        return ftpcr_decide(check, 0) is not None
    return ppd_planar(check) is not None


def test_criterion_8_deletion_corpus(record_property):
    assert len(CORPUS) >= 10
    failures = 0
    for name, inst, k, pats, radii in CORPUS:
        out = choose_deletable_edge(inst, k, pats, radii=radii)
        if out.kind != "delete":
            failures += 1
            continue
        before = ftpcr_decide(inst, k, pats) is not None
        after = ftpcr_decide(delete_edge(inst, out.edge), k, pats) is not None
        failures += before != after
        rr = radii or reduction_radii(k, max((len(p.vertices) for p in pats), default=0))
        flat = find_flat_subgrid(inst, find_hex_grid(inst.graph, rr.grid), rr.flat, k)
        assert flat is None or flat_by_planarity(inst, flat), name
    assert failures == 0
    report(record_property, f"deletion corpus: {len(CORPUS)} instances, 0 failures; returned subgrids all flat")


# ----------------------------------------------------------------------
# 9. framing


def random_partial_instance(seed):
    rng = random.Random(seed)
    n = rng.randint(4, 12)
    d = random_polyline_drawing(rng, n, rng.randint(1, n), max_crossings=4, connected=False, size=30)
    g = d.host.copy()
    for _ in range(rng.choice([0, 3, 8])):
        u, w = rng.sample(g.vertices, 2)
        g.add_edge(u, w)
    return PartiallyPredrawnGraph(g, PolylineDrawing(g, dict(d.positions), dict(d.polylines)))


def test_criterion_9_framing(record_property):
    counts = []
    for seed in range(20):
        inst = random_partial_instance(900 + seed)
        assert check_framing(build_framing(inst)) == [], seed
        fr = build_flip_aware(inst, 1)
        assert check_framing(fr) == [], seed
        total = fr.pruned_label_count()
        assert total >= 0
        counts.append(total)
    for k in (1, 2):
        assert MarkerSchema(k).count == (6 * k) ** (18 * k) * factorial(18 * k) * (18 * k + 1)
    report(record_property, f"framing invariants hold on 20/20; flip-aware pruned label counts (k=1) {counts}; "
                            "schema cardinality matches for k=1,2")


# ----------------------------------------------------------------------
# 10. command line


def cube_graph():
    names = [f"{i:03b}" for i in range(8)]
    return Graph(names, [(a, b) for a in names for b in names
                         if a < b and sum(x != y for x, y in zip(a, b)) == 1])


def star_instance():
    g = Graph(list("abcde"), [("a", "c"), ("b", "c"), ("c", "d"), ("c", "e")])
    return PartiallyPredrawnGraph(g)


def write(path: Path, obj) -> str:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return str(path)


def run_cli(args, cwd, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    return subprocess.run([sys.executable, "-m", "crosskit.cli", *args], cwd=cwd, env=env,
                          capture_output=True, timeout=600)


def test_criterion_10_cli_determinism(tmp_path, record_property):
    from crosskit.hexgrid import hex_grid

    inputs = tmp_path / "in"
    inputs.mkdir()
    drawn = random_polyline_drawing(random.Random(3), 7, 10, max_crossings=3)
    write(inputs / "drawn.ppg.json", ppg_to_dict(PartiallyPredrawnGraph(drawn.host, drawn)))
    write(inputs / "k5.ppg.json", ppg_to_dict(PartiallyPredrawnGraph(complete_graph(5))))
    write(inputs / "grid.ppg.json", ppg_to_dict(PartiallyPredrawnGraph(hex_grid(3))))
    write(inputs / "star.ppg.json", ppg_to_dict(star_instance()))
    write(inputs / "cube.ppg.json", ppg_to_dict(PartiallyPredrawnGraph(cube_graph())))
    tiles = {(i, j): {(1, 2), (2, 2), (3, 1)} for i, j in product((1, 2), repeat=2)}
    write(inputs / "a.gt.json", GridTilingInstance(2, M_STAR, tiles).to_dict())
    i = str(inputs)
    commands = [
        ("planarize", [f"{i}/drawn.ppg.json", "--out", "planar.json"], ["planar.json"]),
        ("validate", [f"{i}/drawn.ppg.json"], []),
        ("check", [f"{i}/drawn.ppg.json", "--style", "fanplanar"], []),
        ("check", [f"{i}/drawn.ppg.json", "--style", "pseudolinear"], []),
        ("patterns", ["gen", "--family", "fanplanar", "--k", "1", "--out", "fan.json"], ["fan.json"]),
        ("patterns", ["gen", "--family", "pseudolinear", "--k", "2", "--predrawn", "--out", "pl.json"], ["pl.json"]),
        ("crnum", [f"{i}/k5.ppg.json", "--k", "1", "--out", "witness.json"], ["witness.json"]),
        ("crnum", [f"{i}/k5.ppg.json", "--k", "1", "--style", "fanplanar"], []),
        ("ppd-planar", [f"{i}/drawn.ppg.json"], []),
        ("reduce", [f"{i}/grid.ppg.json", "--k", "0"], []),
        ("framing", [f"{i}/star.ppg.json", "--flip-aware", "--k", "1", "--out", "frame"],
         ["frame.ppg.json", "frame.annotations.json"]),
        ("mso", ["--k", "1", "--out", "phi.txt"], ["phi.txt"]),
        ("sep3", [f"{i}/cube.ppg.json", "--s", "001-011,011-010,010-110,110-100,100-101,101-001",
                  "--a", "000", "--b", "111"], []),
        ("gen-gridtiling", ["--k", "2", "--m", "3", "--seed", "9", "--out", "r.gt.json"], ["r.gt.json"]),
        ("solve-gridtiling", [f"{i}/a.gt.json"], []),
        ("gen-hardness", [f"{i}/a.gt.json", "--out", "inst"], ["inst.ppg.json", "inst.meta.json"]),
        ("verify-hardness", ["inst.ppg.json"], []),
        ("solve-hardness", ["inst.ppg.json"], []),
        ("thicken", ["inst.ppg.json", "--layers", "1", "--out", "thick"], ["thick.ppg.json", "thick.meta.json"]),
        ("render", ["thick.ppg.json", "--svg", "thick.svg", "--solve", "--scale", "0.05"], ["thick.svg"]),
    ]
    runs = []
    for seed in (1, 2):
        cwd = tmp_path / f"run{seed}"
        cwd.mkdir()
        outs = []
        for name, args, files in commands:
            res = run_cli([name, *args], cwd, seed)
            assert res.returncode in (0, 1), (name, res.stderr.decode())
            outs.append((res.returncode, res.stdout, {f: (cwd / f).read_bytes() for f in files}))
        runs.append((cwd, outs))
    (cwd1, first), (_, second) = runs
    for (name, _, _), a, b in zip(commands, first, second):
        assert a == b, name

    # every emitted file reloads to an equal object
    def same(path, load, dump):
        data = read_json(cwd1 / path)
        assert dump(load(data)) == data, path

    same("planar.json", combinatorial_from_dict, combinatorial_to_dict)
    same("witness.json", combinatorial_from_dict, combinatorial_to_dict)
    same("fan.json", pattern_set_from_list, pattern_set_to_list)
    same("pl.json", pattern_set_from_list, pattern_set_to_list)
    same("frame.ppg.json", ppg_from_dict, ppg_to_dict)
    same("r.gt.json", GridTilingInstance.from_dict, lambda gt: gt.to_dict())
    for prefix in ("inst", "thick"):
        ppg = read_json(cwd1 / f"{prefix}.ppg.json")
        meta = read_json(cwd1 / f"{prefix}.meta.json")
        back = HardnessInstance.from_parts(ppg_from_dict(ppg), meta)
        assert ppg_to_dict(back.to_ppg()) == ppg
        assert back.meta_dict() == meta
    assert json.loads((cwd1 / "frame.annotations.json").read_text()) is not None
    assert (cwd1 / "phi.txt").read_text() == first[11][1].decode()
    report(record_property, f"{len(commands)} CLI invocations byte-identical across two runs "
                            "(different hash seeds); all emitted JSON files reload losslessly")
