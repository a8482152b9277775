"""Command line front end.

Every subcommand reads the JSON formats of the owning module, prints JSON
(or plain text for ``mso``) on standard output and a short human line on
standard error. Exit codes: 0 success or a positive answer, 1 a negative
answer, 2 a usage or input error, 3 an exhausted search budget.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import io
from .limits import BudgetExceeded

OK, NEGATIVE, USAGE, BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(obj) -> None:
    sys.stdout.write(io.dumps(obj))


def _note(text: str) -> None:
    sys.stderr.write(text + "\n")


def _load_ppg(path: str):
    try:
        return io.load_ppg(path)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _patterns_for(args, inst=None) -> list:
    from .pattern_gen import gen_fanplanar_patterns, gen_pseudolinear_patterns
    from .patterns import pattern_set_from_list

    if getattr(args, "patterns", None) and getattr(args, "style", None):
        raise UsageError("give --patterns or --style, not both")
    if getattr(args, "patterns", None):
        return list(pattern_set_from_list(io.read_json(args.patterns)))
    style = getattr(args, "style", None)
    if style == "fanplanar":
        return list(gen_fanplanar_patterns(args.k))
    if style == "pseudolinear":
        predrawn = inst is not None and not inst.is_empty()
        return list(gen_pseudolinear_patterns(args.k, predrawn))
    return []


# ----------------------------------------------------------------------
# drawings and patterns


def cmd_planarize(args) -> int:
    from .drawing import NonSimpleDrawing, planarize_geometric

    inst = _load_ppg(args.input)
    try:
        cd = planarize_geometric(inst.predrawing, gamma=inst.gamma_edges)
    except NonSimpleDrawing as exc:
        _emit({"simple": False, "violations": [v.as_dict() for v in exc.args[0]]})
        _note("drawing is not simple")
        return NEGATIVE
    out = io.combinatorial_to_dict(cd)
    if args.out:
        io.write_json(args.out, out)
    _emit(out)
    return OK


def cmd_validate(args) -> int:
    from .drawing import validate_drawing

    inst = _load_ppg(args.input)
    bad = validate_drawing(inst.predrawing)
    _emit({"valid": not bad, "violations": [v.as_dict() for v in bad]})
    _note("valid" if not bad else f"{len(bad)} violation(s)")
    return OK if not bad else NEGATIVE


def cmd_check(args) -> int:
    from .drawing import NonSimpleDrawing, planarize_geometric
    from .obstructions import check_style_direct

    inst = _load_ppg(args.input)
    try:
        cd = planarize_geometric(inst.predrawing)
    except NonSimpleDrawing as exc:
        raise UsageError(f"drawing is not simple: {exc.args[0][0]}") from exc
    ok = check_style_direct(cd, args.style)
    _emit({"style": args.style, "holds": ok})
    return OK if ok else NEGATIVE


def cmd_patterns_gen(args) -> int:
    from .pattern_gen import gen_fanplanar_patterns, gen_pseudolinear_patterns
    from .patterns import pattern_set_to_list

    if args.k < 0:
        raise UsageError("--k must be non-negative")
    if args.family == "fanplanar":
        pats = gen_fanplanar_patterns(args.k)
    else:
        pats = gen_pseudolinear_patterns(args.k, args.predrawn)
    items = pattern_set_to_list(pats)
    if args.out:
        io.write_json(args.out, items)
    _emit(items)
    _note(f"{len(items)} pattern(s)")
    return OK


# ----------------------------------------------------------------------
# solving


def _witness(cd, config=None) -> dict:
    out = {"planarization": io.combinatorial_to_dict(cd), "crossings": cd.crossing_count}
    if config is not None:
        out["configuration"] = config.as_dict()
    return out


def cmd_crnum(args) -> int:
    from .solver import ftpcr_decide

    if args.k < 0:
        raise UsageError("--k must be non-negative")
    inst = _load_ppg(args.input)
    pats = _patterns_for(args, inst)
    simple = not pats and inst.is_empty()
    res = ftpcr_decide(inst, args.k, pats, simple=simple)
    if res is None:
        _emit({"k": args.k, "answer": False})
        _note(f"no drawing with at most {args.k} crossing(s)")
        return NEGATIVE
    cd, config = res
    out = {"k": args.k, "answer": True, "witness": _witness(cd, config)}
    if args.out:
        io.write_json(args.out, out["witness"]["planarization"])
    _emit(out)
    return OK


def cmd_ppd_planar(args) -> int:
    from .solver import ppd_planar

    inst = _load_ppg(args.input)
    cd = ppd_planar(inst)
    if cd is None:
        _emit({"planar": False})
        return NEGATIVE
    _emit({"planar": True, "witness": _witness(cd)})
    return OK


def cmd_reduce(args) -> int:
    from .reduction import reduce_instance

    inst = _load_ppg(args.input)
    pats = _patterns_for(args, inst)
    last = None
    for outcome, _ in reduce_instance(inst, args.k, pats):
        sys.stdout.write(json.dumps(outcome.as_dict(), sort_keys=True) + "\n")
        sys.stdout.flush()
        last = outcome
    return NEGATIVE if last is not None and last.kind == "no-instance" else OK


# ----------------------------------------------------------------------
# framing, formula and separation


def cmd_framing(args) -> int:
    from .drawing import PartiallyPredrawnGraph
    from .framing import build_flip_aware, build_framing

    inst = _load_ppg(args.input)
    if args.flip_aware:
        if args.k is None:
            raise UsageError("--flip-aware needs --k")
        fr = build_flip_aware(inst, args.k)
    else:
        fr = build_framing(inst)
    notes = fr.annotations()
    notes["frame_rotation"] = {v: list(nb) for v, nb in sorted(fr.frame_rotation.items())}
    frame = io.ppg_to_dict(PartiallyPredrawnGraph(fr.frame_graph))
    if args.out:
        io.write_json(f"{args.out}.ppg.json", frame)
        io.write_json(f"{args.out}.annotations.json", notes)
    _emit({"frame": frame, "annotations": notes})
    return OK


def cmd_mso(args) -> int:
    from .framing import emit_mso

    if args.k < 0:
        raise UsageError("--k must be non-negative")
    if not args.patterns and not args.style:
        args.style = "fanplanar"
    text = emit_mso(args.k, _patterns_for(args))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return OK


def _edge_list(text: str) -> list[tuple[str, str]]:
    out = []
    for item in text.split(","):
        ends = item.strip().split("-")
        if len(ends) != 2 or not all(ends):
            raise UsageError(f"bad edge {item!r}; expected u-v")
        out.append((ends[0], ends[1]))
    return out


def cmd_sep3(args) -> int:
    from .framing import InadmissibleS, Not3Connected, three_con_sep

    g = _load_ppg(args.input).graph
    s = _edge_list(args.s)
    face = args.face.split(",") if args.face else None
    try:
        sep = three_con_sep(g, s, args.a, args.b, face=face)
    except (Not3Connected, InadmissibleS) as exc:
        raise UsageError(str(exc)) from exc
    _emit({"a": args.a, "b": args.b, "separated": sep})
    return OK if sep else NEGATIVE


# ----------------------------------------------------------------------
# hardness instances


def _load_gt(path: str):
    from .hardness import GridTilingInstance

    try:
        return GridTilingInstance.from_dict(io.read_json(path))
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _meta_path(instance: str, meta: Optional[str]) -> str:
    if meta:
        return meta
    if instance.endswith(".ppg.json"):
        return instance[: -len(".ppg.json")] + ".meta.json"
    raise UsageError("give --meta for an instance file not named *.ppg.json")


def _load_hardness(args):
    from .hardness import HardnessInstance

    ppg = _load_ppg(args.input)
    try:
        meta = io.read_json(_meta_path(args.input, args.meta))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read metadata: {exc}") from exc
    return HardnessInstance.from_parts(ppg, meta)


def _save_hardness(inst, prefix: str) -> dict:
    io.write_json(f"{prefix}.ppg.json", io.ppg_to_dict(inst.to_ppg()))
    io.write_json(f"{prefix}.meta.json", inst.meta_dict())
    return {"instance": f"{prefix}.ppg.json", "meta": f"{prefix}.meta.json", "k": inst.k, "m": inst.m,
            "vertices": len(inst.predrawn.positions), "predrawn_edges": len(inst.predrawn.polylines),
            "obstacles": len(inst.obstacles), "max_bit_length": inst.max_bit_length(),
            "fallback_used": inst.fallback_used()}


def cmd_gen_gridtiling(args) -> int:
    from .hardness import random_grid_tiling

    solvable = {"yes": True, "no": False, "any": None}[args.solvable]
    gt = random_grid_tiling(random.Random(args.seed), args.k, args.m, density=args.density, solvable=solvable)
    if args.out:
        io.write_json(args.out, gt.to_dict())
    _emit(gt.to_dict())
    return OK


def cmd_gen_hardness(args) -> int:
    from .hardness import DegenerateConstruction, build_instance

    gt = _load_gt(args.input)
    try:
        inst = build_instance(gt)
    except DegenerateConstruction as exc:
        _emit({"built": False, "reason": str(exc)})
        return NEGATIVE
    _emit(_save_hardness(inst, args.out))
    return OK


def cmd_verify_hardness(args) -> int:
    from .hardness import verify_instance

    report = verify_instance(_load_hardness(args))
    _emit(report.as_dict())
    _note("all checks pass" if report.passed else f"first failing check: {report.first_failure()}")
    return OK if report.passed else NEGATIVE


def _placement_dict(inst, placement) -> dict:
    from .geometry import format_point
    from .hardness import placement_tiles

    tiles = placement_tiles(inst, placement)
    return {"placement": {v: format_point(p) for v, p in sorted(placement.items())},
            "tiles": {f"{i},{j}": list(t) for (i, j), t in sorted(tiles.items())}}


def cmd_solve_hardness(args) -> int:
    from .hardness import insertion_crossings, solve_hardness

    inst = _load_hardness(args)
    placement = solve_hardness(inst)
    if placement is None:
        _emit({"solvable": False})
        return NEGATIVE
    out = {"solvable": True, **_placement_dict(inst, placement)}
    if inst.gap_edges:
        out["gap_crossings"] = insertion_crossings(inst, placement)
    _emit(out)
    return OK


def cmd_solve_gridtiling(args) -> int:
    from .hardness import solve_grid_tiling

    sol = solve_grid_tiling(_load_gt(args.input))
    if sol is None:
        _emit({"solvable": False})
        return NEGATIVE
    _emit({"solvable": True, "tiles": {f"{i},{j}": list(t) for (i, j), t in sorted(sol.items())}})
    return OK


def cmd_thicken(args) -> int:
    from .hardness import OffsetTooLarge, thicken

    if args.layers < 1:
        raise UsageError("--layers must be at least 1")
    try:
        inst = thicken(_load_hardness(args), args.layers)
    except OffsetTooLarge as exc:
        _emit({"thickened": False, "reason": str(exc)})
        return NEGATIVE
    out = _save_hardness(inst, args.out)
    out["gap_edges"] = len(inst.gap_edges)
    _emit(out)
    return OK


def cmd_render(args) -> int:
    from .hardness import render_svg, solve_hardness

    inst = _load_hardness(args)
    placement = solve_hardness(inst) if args.solve else None
    Path(args.svg).write_text(render_svg(inst, placement, scale=args.scale), encoding="utf-8")
    _emit({"svg": args.svg, "placed": placement is not None})
    return OK


# ----------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="crosskit", description="Drawing extension with restricted crossings.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, func, help_text, input_help=None):
        sp = sub.add_parser(name, help=help_text)
        if input_help:
            sp.add_argument("input", help=input_help)
        sp.set_defaults(func=func)
        return sp

    def pattern_choice(sp):
        sp.add_argument("--patterns", help="pattern set file (.json array)")
        sp.add_argument("--style", choices=["fanplanar", "pseudolinear"])

    sp = add("planarize", cmd_planarize, "planarize the predrawn part", ".ppg.json instance")
    sp.add_argument("--out")
    add("validate", cmd_validate, "check that the predrawing is simple", ".ppg.json instance")
    sp = add("check", cmd_check, "test a drawing against a drawing style", ".ppg.json drawing")
    sp.add_argument("--style", required=True, choices=["fanplanar", "pseudolinear"])

    sp = sub.add_parser("patterns", help="pattern set tools")
    psub = sp.add_subparsers(dest="action", parser_class=_Parser)
    psub.required = True
    gp = psub.add_parser("gen", help="generate a pattern family")
    gp.add_argument("--family", required=True, choices=["fanplanar", "pseudolinear"])
    gp.add_argument("--k", type=int, required=True)
    gp.add_argument("--predrawn", action="store_true")
    gp.add_argument("--out")
    gp.set_defaults(func=cmd_patterns_gen)

    sp = add("crnum", cmd_crnum, "decide a drawing with at most k crossings", ".ppg.json instance")
    sp.add_argument("--k", type=int, required=True)
    pattern_choice(sp)
    sp.add_argument("--out", help="write the witness planarization here")
    add("ppd-planar", cmd_ppd_planar, "partially predrawn planarity", ".ppg.json instance")
    sp = add("reduce", cmd_reduce, "apply the edge deletion rule (JSON lines)", ".ppg.json instance")
    sp.add_argument("--k", type=int, required=True)
    pattern_choice(sp)

    sp = add("framing", cmd_framing, "build the framing of an instance", ".ppg.json instance")
    sp.add_argument("--flip-aware", action="store_true")
    sp.add_argument("--k", type=int)
    sp.add_argument("--out", help="prefix for .ppg.json and .annotations.json")
    sp = add("mso", cmd_mso, "print the formula skeleton")
    sp.add_argument("--k", type=int, required=True)
    pattern_choice(sp)
    sp.add_argument("--out")
    sp = add("sep3", cmd_sep3, "separation in a 3-connected planar graph", ".ppg.json graph")
    sp.add_argument("--s", required=True, help="edge list u-v,v-w,...")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--face", help="closing face as v1,v2,... (needed for paths)")

    sp = add("gen-gridtiling", cmd_gen_gridtiling, "random Grid Tiling instance")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--density", type=float, default=0.3)
    sp.add_argument("--solvable", choices=["yes", "no", "any"], default="any")
    sp.add_argument("--out")
    sp = add("gen-hardness", cmd_gen_hardness, "build the obstacle instance", ".gt.json instance")
    sp.add_argument("--out", required=True, help="prefix for .ppg.json and .meta.json")
    for name, func, text in (("verify-hardness", cmd_verify_hardness, "verify the obstacle geometry"),
                             ("solve-hardness", cmd_solve_hardness, "place H with straight edges")):
        sp = add(name, func, text, ".ppg.json instance")
        sp.add_argument("--meta")
    add("solve-gridtiling", cmd_solve_gridtiling, "solve a Grid Tiling instance", ".gt.json instance")
    sp = add("thicken", cmd_thicken, "nest parallel chains in every obstacle", ".ppg.json instance")
    sp.add_argument("--meta")
    sp.add_argument("--layers", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp = add("render", cmd_render, "draw an instance as SVG", ".ppg.json instance")
    sp.add_argument("--meta")
    sp.add_argument("--svg", required=True)
    sp.add_argument("--scale", type=float)
    sp.add_argument("--solve", action="store_true", help="also draw a placement of H")
    return p


def run(argv: Sequence[str]) -> int:
    try:
        args = build_parser().parse_args(list(argv))
        return args.func(args)
    except UsageError as exc:
        _note(f"crosskit: {exc}")
        return USAGE
    except BudgetExceeded as exc:
        _note(f"crosskit: {exc}")
        return BUDGET
    except ValueError as exc:
        _note(f"crosskit: {exc}")
        return USAGE


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
