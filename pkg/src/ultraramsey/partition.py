"""Copies, finite arrow relations, and expanded subtrees with their types.

``Z -> (Y)^X_{k,l}`` holds when every ``k``-colouring of the copies of ``X``
in ``Z`` leaves some copy of ``Y`` whose own copies of ``X`` see at most
``l`` colours.  :func:`check_arrow` decides this on finite instances by
searching for a counterexample colouring.

Expanded subtrees live in ``N^{<=h}``: nodes are tuples of naturals, ordered
by the prefix relation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .core import DistanceSet, FiniteSpace, QPoint, q_distance
from .treecodec import RootedTree, linear_extensions, tree_isomorphisms

__all__ = [
    "Copy",
    "enumerate_copies",
    "ArrowVerdict",
    "check_arrow",
    "exhaustive_arrow",
    "counterexample_is_valid",
    "is_expanded",
    "tree_of_nodes",
    "type_of",
    "psi",
    "phi",
    "expanded_universal",
    "downward_copies",
    "window_children",
    "restrict_point",
    "lift_coloring",
]


@dataclass(frozen=True)
class Copy:
    """A subset of ``Z`` isometric to ``X``.  ``points`` are sorted ``Z``
    indices; ``bijection[i]`` is the ``Z`` index of the image of point ``i`` of ``X``."""

    points: tuple[int, ...]
    bijection: tuple[int, ...]

    def labels(self, Z: FiniteSpace) -> list:
        return [Z.labels[i] for i in self.points]

    def to_json(self, Z: FiniteSpace) -> dict:
        return {"points": self.labels(Z), "bijection": [Z.labels[i] for i in self.bijection]}


def enumerate_copies(Z: FiniteSpace, X: FiniteSpace) -> list[Copy]:
    """All subsets of ``Z`` isometric to ``X``, each once, sorted by index."""
    n, m = len(Z), len(X)
    if m > n:
        return []
    zm, xm = Z.matrix, X.matrix
    found: dict[tuple[int, ...], tuple[int, ...]] = {}
    image: list[int] = []
    used = [False] * n

    def extend(i):
        if i == m:
            key = tuple(sorted(image))
            found.setdefault(key, tuple(image))
            return
        for c in range(n):
            if used[c]:
                continue
            if any(zm[c][image[j]] != xm[i][j] for j in range(i)):
                continue
            used[c] = True
            image.append(c)
            extend(i + 1)
            image.pop()
            used[c] = False

    extend(0)
    return [Copy(k, found[k]) for k in sorted(found)]


@dataclass
class ArrowVerdict:
    """``status`` is ``"holds"``, ``"fails"`` or ``"unknown"`` (budget spent).

    ``counterexample`` maps each copy of ``X`` (by position in
    ``x_copies``) to a colour; it is set only when the relation fails.
    """

    status: str
    k: int
    l: int
    x_copies: list[Copy] = field(repr=False)
    y_copies: list[Copy] = field(repr=False)
    counterexample: tuple[int, ...] | None = None
    nodes: int = 0
    reason: str = ""

    @property
    def holds(self) -> bool | None:
        return {"holds": True, "fails": False}.get(self.status)

    def to_json(self, Z: FiniteSpace) -> dict:
        out = {
            "holds": self.holds,
            "status": self.status,
            "k": self.k,
            "l": self.l,
            "x_copies": len(self.x_copies),
            "y_copies": len(self.y_copies),
            "search_nodes": self.nodes,
            "reason": self.reason,
        }
        if self.counterexample is not None:
            out["witness"] = {
                "coloring": [
                    {"copy": c.labels(Z), "color": col} for c, col in zip(self.x_copies, self.counterexample)
                ]
            }
        return out


def _containment(x_copies: Sequence[Copy], y_copies: Sequence[Copy]) -> list[list[int]]:
    sets = [frozenset(c.points) for c in x_copies]
    return [[i for i, s in enumerate(sets) if s <= frozenset(y.points)] for y in y_copies]


def counterexample_is_valid(coloring: Sequence[int], x_copies, y_copies, l: int) -> bool:
    """Every copy of ``Y`` sees more than ``l`` colours."""
    inside = _containment(x_copies, y_copies)
    return all(len({coloring[i] for i in members}) > l for members in inside)


def exhaustive_arrow(Z: FiniteSpace, Y: FiniteSpace, X: FiniteSpace, k: int, l: int, limit: int = 10**6) -> bool:
    """Decide the arrow by scanning all ``k ** #copies`` colourings."""
    xc, yc = enumerate_copies(Z, X), enumerate_copies(Z, Y)
    if k ** len(xc) > limit:
        raise ValueError(f"{k}^{len(xc)} colourings exceed the limit {limit}")
    inside = _containment(xc, yc)
    for col in itertools.product(range(k), repeat=len(xc)):
        if not any(len({col[i] for i in members}) <= l for members in inside):
            return False
    return True


def check_arrow(
    Z: FiniteSpace,
    Y: FiniteSpace,
    X: FiniteSpace,
    k: int,
    l: int,
    budget: int = 10**7,
) -> ArrowVerdict:
    """Decide ``Z -> (Y)^X_{k,l}``.

    Backtracks over colourings of the copies of ``X`` up to renaming of
    colours, abandoning a partial colouring as soon as some copy of ``Y``
    would see at most ``l`` colours under every completion.  ``budget``
    bounds the number of search nodes; running out gives ``"unknown"``.
    A ``"fails"`` verdict is re-checked before it is returned.
    """
    if k < 1 or l < 1:
        raise ValueError("k and l must be positive")
    xc = enumerate_copies(Z, X)
    yc = enumerate_copies(Z, Y)
    if not yc:
        col = (0,) * len(xc)
        return ArrowVerdict("fails", k, l, xc, yc, col, 0, "Z has no copy of Y")
    if l >= k:
        return ArrowVerdict("holds", k, l, xc, yc, None, 0, "l >= k")

    # colex order closes small copies of Y early, which feeds the pruning
    order = sorted(range(len(xc)), key=lambda i: tuple(reversed(xc[i].points)))
    xc = [xc[i] for i in order]
    inside = _containment(xc, yc)
    n = len(xc)
    containing: list[list[int]] = [[] for _ in range(n)]
    for y, members in enumerate(inside):
        for i in members:
            containing[i].append(y)
    uncolored = [len(m) for m in inside]
    counts = [[0] * k for _ in yc]
    distinct = [0] * len(yc)

    if any(u <= l for u in uncolored):
        return ArrowVerdict("holds", k, l, xc, yc, None, 0, "some copy of Y has at most l copies of X")

    coloring = [0] * n
    nodes = 0

    class _Budget(Exception):
        pass

    def rec(i: int, used: int) -> bool:
        nonlocal nodes
        if i == n:
            return True
        for c in range(min(used + 1, k)):
            nodes += 1
            if nodes > budget:
                raise _Budget
            dead = False
            for y in containing[i]:
                uncolored[y] -= 1
                counts[y][c] += 1
                if counts[y][c] == 1:
                    distinct[y] += 1
                if distinct[y] + uncolored[y] <= l:
                    dead = True
            if not dead:
                coloring[i] = c
                if rec(i + 1, max(used, c + 1)):
                    return True
            for y in containing[i]:
                uncolored[y] += 1
                counts[y][c] -= 1
                if counts[y][c] == 0:
                    distinct[y] -= 1
        return False

    try:
        found = rec(0, 0)
    except _Budget:
        return ArrowVerdict("unknown", k, l, xc, yc, None, nodes, "search budget exhausted")
    if found:
        col = tuple(coloring)
        if not counterexample_is_valid(col, xc, yc, l):
            raise AssertionError("search produced an invalid counterexample")
        return ArrowVerdict("fails", k, l, xc, yc, col, nodes, "counterexample colouring found")
    return ArrowVerdict("holds", k, l, xc, yc, None, nodes, "search space exhausted")


# -- expanded subtrees -----------------------------------------------------

Node = tuple  # a node of N^{<=h}


def _meet(u: Node, v: Node) -> Node:
    k = 0
    while k < len(u) and k < len(v) and u[k] == v[k]:
        k += 1
    return u[:k]


def is_expanded(nodes: Iterable[Node]) -> bool:
    """Whether a meet-closed set of sequences containing ``()`` is expanded:

    (i) every node is strictly increasing;
    (ii) once two nodes disagree at a position they disagree at every later
         position both have;
    (iii) distinct nonempty nodes have distinct last entries, which makes
         the order by last entry linear.

    Raises:
        ValueError: if the set lacks ``()`` or is not closed under meets.
    """
    nodes = set(map(tuple, nodes))
    if () not in nodes:
        raise ValueError("the root () is missing")
    for u, v in itertools.combinations(nodes, 2):
        if _meet(u, v) not in nodes:
            raise ValueError(f"not meet-closed: meet of {u} and {v} is missing")
    for u in nodes:
        if any(a >= b for a, b in zip(u, u[1:])):
            return False
    for u, v in itertools.combinations(nodes, 2):
        common = min(len(u), len(v))
        for k in range(common):
            if u[k] != v[k]:
                if any(u[j] == v[j] for j in range(k, common)):
                    return False
                break
    lasts = [u[-1] for u in nodes if u]
    return len(set(lasts)) == len(lasts)


def tree_of_nodes(nodes: Iterable[Node]) -> RootedTree:
    """The prefix order on a set of sequences with a least element, as a
    :class:`RootedTree` labelled by the sequences."""
    nodes = sorted(set(map(tuple, nodes)), key=lambda u: (len(u), u))
    if not nodes:
        raise ValueError("empty node set")
    root = nodes[0]
    kids: dict[Node, list[Node]] = {u: [] for u in nodes}
    present = set(nodes)
    for u in nodes[1:]:
        if u[: len(root)] != root:
            raise ValueError(f"{u} is not above the root {root}")
        parent = next(u[:j] for j in range(len(u) - 1, -1, -1) if u[:j] in present)
        kids[parent].append(u)

    def build(u):
        return RootedTree(tuple(build(c) for c in kids[u]), u)

    return build(root)


def type_of(nodes: Iterable[Node], T: RootedTree) -> list[tuple[int, ...]]:
    """Types of an expanded copy of ``T``: the order "root first, then by
    last entry", pulled back to ``T`` along each isomorphism.  Types are
    tuples of preorder indices of ``T``, sorted; more than one appears when
    ``T`` has nontrivial automorphisms.

    Raises:
        ValueError: if the nodes do not form a copy of ``T``.
    """
    nodes = set(map(tuple, nodes))
    U = tree_of_nodes(nodes)
    if U.encoding != T.encoding:
        raise ValueError("the node set is not isomorphic to the pattern tree")
    seqs = [t.label for t in U.preorder()]
    ranked = sorted(range(len(seqs)), key=lambda i: (len(seqs[i]) > 0, seqs[i][-1] if seqs[i] else -1))
    types = {tuple(sigma[i] for i in ranked) for sigma in tree_isomorphisms(U, T)}
    return sorted(types)


def psi(nodes: Iterable[Node]) -> frozenset[int]:
    """Last entries of the nonempty nodes."""
    return frozenset(u[-1] for u in nodes if u)


def phi(order: Sequence[int], M: Iterable[int], T: RootedTree) -> frozenset[Node]:
    """The expanded copy of ``T`` with type ``order`` and last-entry set ``M``.

    The ``i``-th smallest element of ``M`` goes to the ``i``-th non-root node
    of ``order``; a node becomes the sequence of values along its path.

    Raises:
        ValueError: if ``|M| != |T| - 1`` or ``order`` does not extend ``T``.
    """
    M = sorted(set(M))
    n = T.size
    if len(M) != n - 1:
        raise ValueError(f"need {n - 1} values, got {len(M)}")
    order = tuple(order)
    par = T.parents()
    pos = {v: i for i, v in enumerate(order)}
    if sorted(order) != list(range(n)) or order[0] != 0 or any(pos[par[v]] > pos[v] for v in range(1, n)):
        raise ValueError("order is not a linear extension of the tree")
    value = {v: M[i - 1] for i, v in enumerate(order) if i}
    seq: list[Node] = [()] * n
    for v in range(1, n):  # parents precede children in preorder
        seq[v] = seq[par[v]] + (value[v],)
    return frozenset(seq)


def window_children(values: int, height: int) -> Callable[[Node], list[Node]]:
    """Children in the window ``{0..values-1}^{<=height}``."""

    def children(u: Node) -> list[Node]:
        return [u + (v,) for v in range(values)] if len(u) < height else []

    return children


def downward_copies(T: RootedTree, children: Callable[[Node], list[Node]]) -> list[frozenset[Node]]:
    """Downward-closed subtrees rooted at ``()`` and isomorphic to ``T``
    inside the host tree described by ``children``."""
    found: set[frozenset[Node]] = set()

    def embed(t: RootedTree, host: Node) -> Iterator[list[Node]]:
        kids = children(host)
        if len(t.children) > len(kids):
            return
        for pick in itertools.permutations(kids, len(t.children)):
            parts = [list(embed(c, h)) for c, h in zip(t.children, pick)]
            for combo in itertools.product(*parts):
                yield [host] + [u for part in combo for u in part]

    for nodes in embed(T, ()):
        found.add(frozenset(nodes))
    return sorted(found, key=lambda s: sorted(s))


def expanded_universal(N: Sequence[int], height: int, width: int) -> frozenset[Node]:
    """A downward-closed expanded subtree of ``N^{<=height}``, ``width``-branching
    at every non-leaf node.

    Nodes receive labels from ``N`` in creation order.  Creation runs in
    rounds and a node created in round ``t`` grows one child in each of the
    rounds ``t .. t + width - 1``, so the children of every node are spread
    across later label ranges.  With ``width >= |T|`` every type of a pattern
    ``T`` of height ``<= height`` is realised by some copy.

    Raises:
        ValueError: if ``N`` has too few elements.
    """
    N = sorted(set(N))
    need = sum(width**i for i in range(1, height + 1))
    if len(N) < need:
        raise ValueError(f"N has {len(N)} elements; {need} are needed")
    labels = iter(N)
    nodes: list[Node] = [()]
    born = [0]
    grown = [0]
    t = 0
    while True:
        progressed = False
        i = 0
        while i < len(nodes):
            u = nodes[i]
            if len(u) < height and grown[i] < width and born[i] <= t:
                child = u + (next(labels),)
                nodes.append(child)
                born.append(t)
                grown.append(0)
                grown[i] += 1
                progressed = True
            i += 1
        if not progressed:
            break
        t += 1
    return frozenset(nodes)


# -- restriction to a smaller distance set ----------------------------------


def restrict_point(x: QPoint, S_prime: DistanceSet) -> QPoint:
    """``1_{S'} x``: clear the coordinates outside ``S'``."""
    return x.restrict(lambda s: s in S_prime)


def lift_coloring(S: DistanceSet, S_prime: DistanceSet, chi_prime: Callable, kind: str = "copies") -> Callable:
    """Pull a colouring over ``Q_{S'}`` back to ``Q_S`` through ``1_{S'}``.

    ``kind="points"`` colours points; ``kind="copies"`` colours tuples of
    points and requires every pairwise distance to lie in ``S'`` (where the
    restriction map is isometric).
    """
    if not S_prime.is_finite:
        raise ValueError("S' must be finite")
    if not all(s in S for s in S_prime.values):
        raise ValueError("S' is not a subset of S")
    if kind == "points":
        return lambda x: chi_prime(restrict_point(x, S_prime))
    if kind != "copies":
        raise ValueError(f"unknown kind {kind!r}")

    def chi(copy: Sequence[QPoint]):
        for a, b in itertools.combinations(copy, 2):
            d = q_distance(a, b)
            if d not in S_prime:
                raise ValueError(f"distance {d} is outside S'; the restriction is not isometric there")
        return chi_prime(tuple(restrict_point(p, S_prime) for p in copy))

    return chi
