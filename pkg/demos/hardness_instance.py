"""
From Grid Tiling to straight-line extension
===========================================

Build the obstacle drawing for a 2x2 Grid Tiling instance, verify the
geometry exactly, solve it both ways and write an SVG picture.
"""

import random
from pathlib import Path

from crosskit.constants import M_STAR
from crosskit.hardness import (
    build_instance,
    placement_tiles,
    random_grid_tiling,
    render_svg,
    solve_grid_tiling,
    solve_hardness,
    thicken,
    verify_instance,
)

gt = random_grid_tiling(random.Random(1), 2, M_STAR, solvable=True)
print("tiles:", gt.to_dict()["tiles"])
inst = build_instance(gt)
print(len(inst.obstacles), "obstacles,", len(inst.predrawn.positions), "vertices,",
      "max bit length", inst.max_bit_length())

# ----------------------------------------------------------------------
# every check the reduction relies on, in exact arithmetic
report = verify_instance(inst)
for name, check in report.checks.items():
    print(f"({name}) {check.title}: {'pass' if check.passed else 'FAIL'} on {check.tested}")

# ----------------------------------------------------------------------
# a placement of H exists exactly when the tiling has a solution
placement = solve_hardness(inst)
print("grid tiling:", solve_grid_tiling(gt))
print("placement picks:", placement_tiles(inst, placement))

# ----------------------------------------------------------------------
# nested chains keep the answer; the neighbour edges cross the gap edges
thick = thicken(inst, 2)
print("thickened verify:", verify_instance(thick).passed)
out = Path("hardness_instance.svg")
out.write_text(render_svg(inst, placement))
print("wrote", out)
