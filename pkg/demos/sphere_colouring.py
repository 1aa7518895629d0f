"""A colouring of Q_S that every copy sees in all colours, when (S, >) is
not well-ordered.

S = {1 - 2^-i : i >= 1} increases to 1.  Every point sits in a shell
[s_i, s_{i+1}) around the net point within distance 1 of it (here a single
net point), and gets colour i mod J.  For any copy and any point y of it,
moving the preimage of y at a coordinate s_i with i in the right class
gives a copy point of the requested colour.

Run: python demos/sphere_colouring.py
"""
from fractions import Fraction as F

from ultraramsey import DistanceSet, QPoint
from ultraramsey.divlab import Embedding, Ladder, ModClasses, locate, range_witness, sphere_coloring, sphere_color

S = DistanceSet(rule=lambda j: 1 - F(1, 2 ** (j + 1)), sup=1)
ladder = Ladder(lambda i: 1 - F(1, 2**i), sup=1)
J = 5
C = sphere_coloring(S, ladder, ModClasses(J), 3, 2)

# a copy of Q_S that triples every coordinate and shifts one of them
copy = Embedding.affine(3, {F(3, 4): 1})
y = copy(QPoint({F(1, 2): 1}))
e, i = locate(y, C)
print(f"y = {y}: shell {i}, colour {sphere_color(y, C)}")
for j in range(J):
    w = range_witness(copy, y, j, C)
    print(f"  colour {j}: {w}  (preimage {copy.inverse(w)})")
