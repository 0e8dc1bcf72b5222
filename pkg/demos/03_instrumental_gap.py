"""A strict gap between the nested Markov and post-selection models.

The instrumental structure X -> A -> B with a latent common cause of A and
B has no equality constraint at all, so its nested Markov model is the
whole simplex.  Its post-selection model is smaller: lifting to the Bell
structure and demanding a no-signalling completion of the diagonal imposes
the inequality max_a sum_b max_x p(a,b|x) <= 1.  The signalling table
p(a,b|x) = [a=0][b=x] scores 2, passes the nested Markov test vacuously,
and is refuted by the exact LP.
"""

from fractions import Fraction

from causalbox import (
    Kernel,
    check_nested,
    enumerate_classical_vertices,
    enumerate_constraints,
    instrumental_graph,
    instrumental_score,
    ps_member,
    split_joint,
)

g = instrumental_graph()
print("equality constraints:", enumerate_constraints(g) or "(none)")

print("\ninstrumental scores of the classical vertices:")
vertices = enumerate_classical_vertices(g)
print(sorted(set(str(instrumental_score(v.table)) for v in vertices)))

score2 = Kernel.from_function(
    (("A", 2), ("B", 2), ("X", 2)),
    (),
    lambda v: Fraction(1, 2) if v["A"] == 0 and v["B"] == v["X"] else Fraction(0),
)
kernel, _ = split_joint(score2, ["X"])
print("\nthe 'b perfectly tracks x' table scores:", instrumental_score(kernel))
print("nested Markov member:", check_nested(score2, g).member)
print("post-selection member:", ps_member(score2, g).status)
