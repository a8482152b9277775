"""
Crossing numbers and restricted drawing styles
==============================================

Small complete graphs, with and without a forbidden-pattern family.
"""

from crosskit.graph import complete_bipartite, complete_graph
from crosskit.pattern_gen import gen_fanplanar_patterns
from crosskit.solver import crossing_number

# plain crossing numbers by exhaustive search over crossing configurations
for name, g in [("K5", complete_graph(5)), ("K3,3", complete_bipartite(3, 3)), ("K6", complete_graph(6))]:
    print(name, "crossing number", crossing_number(g))

# fan-planar drawings of K5 still need only one crossing
fan = list(gen_fanplanar_patterns(1))
print("K5 fan-planar, k <= 1:", crossing_number(complete_graph(5), max_k=1, pats=fan))
