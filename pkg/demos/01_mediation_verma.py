"""The mediation structure and its Verma constraint.

The chain X -> A -> B -> C with a hidden common cause of A and C is the
smallest structure whose observable distributions obey an equality that
d-separation cannot see: the kernel sum_a p(a|x) p(c|x,a,b) cannot depend
on x.  This script derives that constraint from the graph, verifies it on
random classical models, and shows a distribution that satisfies every
conditional independence yet violates the Verma equality.
"""

import random
from fractions import Fraction

from causalbox import (
    check_nested,
    district_kernel,
    districts,
    enumerate_constraints,
    mediation_graph,
    prob_table,
    to_mdag,
)
from causalbox.networks import random_network

g = mediation_graph()
print("vertices:", ", ".join(g.names()))
print("districts:", [sorted(d) for d in districts(to_mdag(g))])

print("\nequality constraints of the nested Markov model:")
for record in enumerate_constraints(g):
    print(" ", record)

rng = random.Random(1)
net = random_network(g, rng, latent_cardinality=4)
p = net.joint_observed()
print("\na random classical model on the graph is a member:", check_nested(p, g).member)

q = district_kernel(p, g, frozenset({"A", "C"}))
print("its district kernel q(A,C | B,X) is exactly p(a|x) p(c|x,a,b);")
print("q(A=0,C=0 | B=0,X=0) =", q.value({"A": 0, "C": 0, "B": 0, "X": 0}))

# Now a sharp counterexample: A tracks X and C tracks B xor X.  Every
# d-separation statement of the graph still holds, but the derived kernel
# remembers x.
def tricky(v):
    if v["A"] != v["X"] or v["C"] != (v["B"] ^ v["X"]):
        return Fraction(0)
    return Fraction(1, 4)

bad = prob_table((("A", 2), ("B", 2), ("C", 2), ("X", 2)), tricky)
verdict = check_nested(bad, g)
print("\nthe deterministic 'C = B xor X' table is a member:", verdict.member)
for violation in verdict.violations:
    print("  violated:", violation.record)
    print("  witness :", violation.witness)
