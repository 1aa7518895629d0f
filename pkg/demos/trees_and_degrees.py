"""From a finite ultrametric space to its tree, and the two degree counts.

Run: python demos/trees_and_degrees.py
"""
from fractions import Fraction as F

from ultraramsey import (
    DistanceSet,
    FiniteSpace,
    QPoint,
    big_ramsey_degree,
    degree_monotonicity_report,
    space_of_leaves,
    tree_of_space,
)

S = DistanceSet([1, F(1, 2)])

# three points: two at distance 1/2, a third at distance 1 from both
X = FiniteSpace.from_points([QPoint(), QPoint({F(1, 2): 1}), QPoint({1: 1})], S, labels=["a", "b", "c"])
T = tree_of_space(X)
print("tree of X:", T.to_nested())
print("leaf labels:", [t.label for t in T.leaf_nodes()])

# reading the distances back off the meet heights gives X again
Y = space_of_leaves(T, S)
print("round trip matrix:", [[str(v) for v in row] for row in Y.matrix])

rep = big_ramsey_degree(X)
print(f"linear extensions {rep.extension_count}, |Aut| {rep.automorphisms}, orbits {rep.orbit_count}")

# a pair over longer and longer distance sets
pair = FiniteSpace.equilateral(2, 1, DistanceSet([1]))
chain = [DistanceSet([1]), DistanceSet([1, F(1, 2)]), DistanceSet([1, F(1, 2), F(1, 4)]), DistanceSet([1, F(1, 2), F(1, 4), F(1, 8)])]
m = degree_monotonicity_report(pair, *chain)
for size, e, o in zip(m.sizes, m.extension_counts, m.orbit_counts):
    print(f"|S| = {size}: extensions {e}, orbits {o}")
