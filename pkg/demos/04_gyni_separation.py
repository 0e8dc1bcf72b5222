"""A minimal structure separating classical, box-world and nested models.

Four observed binary vertices, one latent: X -> A -> B -> C with the latent
parenting A, B and C.  Its lift is the tripartite Bell structure, whose
no-signalling boxes include the guess-your-neighbour's-input winner.
Substituting the diagonal (Y = A, Z = B) gives a single-input family that
the exact LP places outside the classical polytope but inside the
post-selection model, with a no-signalling lift certificate that projects
back entry for entry.
"""

from causalbox import (
    bell_inputs,
    build_hypergraph,
    classical_member,
    enumerate_classical_vertices,
    enumerate_h_vertices,
    gyni_graph,
    gyni_projected,
    join_inputs,
    project,
    ps_member,
    uniform_table,
)

g = gyni_graph()
h = build_hypergraph(g)
print("lift copies:", h.copy_map)
print("lifted strategies:", len(enumerate_h_vertices(h)))
print("projected classical vertices:", len(enumerate_classical_vertices(g)))

target = gyni_projected()
print("\ntarget family support (x = 0):")
for a in (0, 1):
    for b in (0, 1):
        for c in (0, 1):
            value = target.value({"A": a, "B": b, "C": c, "X": 0})
            if value:
                print(f"  p({a},{b},{c}|x=0) = {value}")

print("\nclassical member:", classical_member(target, g).member)

joint = join_inputs(target, uniform_table((("X", 2),)))
verdict = ps_member(joint, g)
print("post-selection member:", verdict.member, "with scale", verdict.scale)

inputs = uniform_table(tuple((i, 2) for i in bell_inputs(h.base)))
projected = project(join_inputs(verdict.certificate, inputs), h.copies)
print(
    "certificate projects back exactly:",
    all(projected.value(env) == value for env, value in joint.cells()),
)
