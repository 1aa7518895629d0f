"""Finite arrow relations by backtracking, and the pair experiment.

For X a pair and |S| = 1 the two candidate degrees are 2 (linear extensions
of a root with two leaves) and 1 (orbits under the swap).  Finite arrow
checks cannot settle the infinite value; the table only records what small
equilateral spaces do.

Run: python demos/arrow_experiments.py
"""
from ultraramsey import DistanceSet, FiniteSpace, check_arrow

S = DistanceSet([1])


def K(n):
    return FiniteSpace.equilateral(n, 1, S)


v = check_arrow(K(5), K(3), K(2), 2, 1)
print("K5 -> (K3)^pair_{2,1}:", v.status)
print("  counterexample colouring of the 10 edges:", v.counterexample)
print("K6 -> (K3)^pair_{2,1}:", check_arrow(K(6), K(3), K(2), 2, 1).status)

print("\nminimal l with Z -> (Y)^pair_{2,l}")
print("|Z| " + " ".join(f"|Y|={y}" for y in (2, 3, 4)))
for z in range(3, 10):
    row = []
    for y in (2, 3, 4):
        if y > z:
            row.append("  -  ")
            continue
        l = next(l for l in (1, 2) if check_arrow(K(z), K(y), K(2), 2, l).status == "holds")
        row.append(f"  {l}  ")
    print(f"{z:>3} " + " ".join(row))
