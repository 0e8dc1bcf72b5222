"""Classical and no-signalling bounds in the bipartite Bell structure.

The classical set of the two-party Bell graph is the convex hull of 16
deterministic strategies; the winning probability of the parity game
a + b = xy is at most 3/4 there.  The PR box wins with certainty, is
no-signalling, and the exact membership LP proves it lies outside the
classical polytope.
"""

from fractions import Fraction

from causalbox import (
    build_hypergraph,
    chsh_graph,
    chsh_score,
    classical_member,
    enumerate_classical_vertices,
    functional_from_indicator,
    maximize_functional,
    ns_box_vertices,
    ns_member,
    pr_box,
)

g = chsh_graph()
vertices = enumerate_classical_vertices(g)
print("classical strategies:", len(vertices))

win = functional_from_indicator(
    vertices[0].table,
    lambda v: Fraction(1, 4) if (v["A"] ^ v["B"]) == (v["X"] & v["Y"]) else 0,
)
value, best = maximize_functional(win, vertices)
print("best classical winning probability:", value)
print("best strategy responses:", dict(best.responses))

box = pr_box(0, 0, 0)
print("\nPR box winning probability:", chsh_score(box))
print("PR box is no-signalling:", ns_member(box, build_hypergraph(g)))

verdict = classical_member(box, g)
print("PR box inside the classical polytope:", verdict.member)

value, _ = maximize_functional(win, ns_box_vertices())
print("maximum over the 24 no-signalling vertices:", value)
