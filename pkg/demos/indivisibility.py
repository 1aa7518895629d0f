"""Monochromatic copies when S is finite (hence well-ordered).

Each colour class is pruned inside a window: balls where the class meets
too few children are removed until nothing changes.  A surviving residue
is big enough for the greedy embedding, which here copies the 8-point
binary space 2^{|S|}.

Run: python demos/indivisibility.py
"""
import random
from fractions import Fraction as F

from ultraramsey import DistanceSet, FiniteSpace, Region, enumerate_qpoints
from ultraramsey.divlab import OracleColoring, monochromatic_copy, prune_sequence

S = DistanceSet([1, F(1, 2), F(1, 4)])
R = Region(S, 3, 4)
target = FiniteSpace.from_points(enumerate_qpoints(S, 3, 2), S)

rng = random.Random(3)
chi = OracleColoring.table({p: rng.randrange(3) for p in R.points()}, 3)
for c in range(3):
    res = prune_sequence(lambda x: chi(x) == c, R, width=2)
    print(f"class {c}: {sum(chi(p) == c for p in R.points())} points, residue {len(res.residue)} after {res.stages} stages")

out = monochromatic_copy(chi, 3, target, R)
print("copy in colour", out.color)
for p in out.state.points:
    print("  ", p)
