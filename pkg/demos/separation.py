"""
Separating vertices in a 3-connected planar graph
=================================================

The cube has a unique embedding, so whether a cycle separates two
vertices is a property of the graph alone.
"""

from crosskit.framing import faces_of, three_con_sep
from crosskit.graph import Graph

names = [f"{i:03b}" for i in range(8)]
cube = Graph(names, [(a, b) for a in names for b in names if a < b and sum(x != y for x, y in zip(a, b)) == 1])
print("faces:", faces_of(cube))

# the hexagon around the 000-111 axis separates the two antipodes
hexagon = [("001", "011"), ("011", "010"), ("010", "110"), ("110", "100"), ("100", "101"), ("101", "001")]
print("hexagon separates 000 and 111:", three_con_sep(cube, hexagon, "000", "111"))

# a face never separates anything
square = [("000", "001"), ("001", "011"), ("011", "010"), ("010", "000")]
print("face separates 100 and 111:", three_con_sep(cube, square, "100", "111"))
