"""Two colourings for well-ordered infinite S, and an injective copy.

A cover of Q_S by disjoint balls with radii 2^-n shrinking to 0 gives the
colouring "index of the ball"; every copy sees it neither constant nor
injective.  For finite S a greedy construction finds copies on which a map
is injective, or reports where its range is finite.

Run: python demos/covers_and_injectivity.py
"""
import itertools
from fractions import Fraction as F

from ultraramsey import DistanceSet, FiniteSpace, QPoint, Region, enumerate_qspace
from ultraramsey.divlab import Embedding, build_ball_cover, check_not_constant_not_injective, injective_copy

S = DistanceSet(rule=lambda j: F(1, 2**j))
cov = build_ball_cover(S, 6)
for n, b in enumerate(cov.balls):
    print(f"b_{n}: {b}")
pts = list(itertools.islice(enumerate_qspace(S), 40))
rep = check_not_constant_not_injective(cov, Embedding.identity(), pts)
print("same colour:", rep.equal_pair, "at distance", rep.equal_distance)
print("different colours:", rep.distinct_pair, "at distance", rep.distinct_distance)

S2 = DistanceSet([1, F(1, 2)])
R = Region(S2, 2, 9)
target = FiniteSpace.from_points([QPoint({1: a, F(1, 2): b}) for a in range(4) for b in range(2)], S2)
run = injective_copy(lambda x: x.get(F(1, 2)), lambda x: True, target, R)
print("\nf = x(1/2):", run.status, [p.get(F(1, 2)) for p in run.points])
run = injective_copy(lambda x: 0, lambda x: True, target, R)
print("f constant:", run.status, run.blocked)
