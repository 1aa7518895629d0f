"""Rooted trees, the tree of a finite ultrametric space and back, and exact
counting of linear extensions and automorphisms.

A space ``X`` over ``S = {s_0 > ... > s_{h-1}}`` is coded by the meet-closed
tree whose leaves sit at depth ``h`` and are the points of ``X``; two leaves
whose meet has height ``k`` are at distance ``s_k``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterator, Sequence

from .core import DistanceSet, FiniteSpace, InvalidSpaceError, validate_space

__all__ = [
    "RootedTree",
    "chain",
    "star",
    "complete_tree",
    "rooted_trees",
    "tree_of_space",
    "space_of_leaves",
    "canonical_encoding",
    "is_isomorphic",
    "tree_isomorphisms",
    "count_linear_extensions",
    "linear_extensions",
    "brute_force_extensions",
    "count_automorphisms",
    "DegreeReport",
    "big_ramsey_degree",
    "MonotonicityReport",
    "degree_monotonicity_report",
]


@dataclass(frozen=True)
class RootedTree:
    """An immutable rooted tree.  Children are kept in canonical order
    (sorted by subtree encoding), so preorder indices are canonical up to
    ties between isomorphic siblings.  ``label`` is optional payload and is
    ignored by isomorphism tests."""

    children: tuple["RootedTree", ...] = ()
    label: Any = field(default=None, compare=True)

    def __post_init__(self):
        kids = tuple(self.children)
        kids = tuple(sorted(kids, key=lambda t: (t.encoding, repr(t.label))))
        object.__setattr__(self, "children", kids)

    @cached_property
    def encoding(self) -> bytes:
        return b"(" + b"".join(c.encoding for c in self.children) + b")"

    @cached_property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children)

    def __len__(self) -> int:
        return self.size

    @property
    def height(self) -> int:
        return 1 + max(c.height for c in self.children) if self.children else 0

    def is_leaf(self) -> bool:
        return not self.children

    def preorder(self) -> list["RootedTree"]:
        out = []
        stack = [self]
        while stack:
            t = stack.pop()
            out.append(t)
            stack.extend(reversed(t.children))
        return out

    def parents(self) -> list[int]:
        """Parent index of every node in preorder; the root has ``-1``."""
        out = [-1]

        def walk(t, me):
            for c in t.children:
                out.append(me)
                walk(c, len(out) - 1)

        walk(self, 0)
        return out

    def depths(self) -> list[int]:
        par = self.parents()
        dep = [0] * len(par)
        for i in range(1, len(par)):
            dep[i] = dep[par[i]] + 1
        return dep

    def leaves(self) -> list[tuple[int, ...]]:
        """Child-index paths from the root to each leaf, in preorder."""
        out = []

        def walk(t, path):
            if not t.children:
                out.append(path)
            for i, c in enumerate(t.children):
                walk(c, path + (i,))

        walk(self, ())
        return out

    def leaf_nodes(self) -> list["RootedTree"]:
        return [t for t in self.preorder() if not t.children]

    def leaf_depths(self) -> set[int]:
        return {len(p) for p in self.leaves()}

    @classmethod
    def from_nested(cls, obj) -> "RootedTree":
        if not isinstance(obj, list):
            raise ValueError("a tree is a nested list, e.g. [[], []]")
        return cls(tuple(cls.from_nested(c) for c in obj))

    def to_nested(self) -> list:
        return [c.to_nested() for c in self.children]

    def unlabeled(self) -> "RootedTree":
        return RootedTree(tuple(c.unlabeled() for c in self.children))

    def __repr__(self) -> str:
        return f"RootedTree({self.to_nested()})"


def chain(n: int) -> RootedTree:
    """A path with ``n`` nodes."""
    if n < 1:
        raise ValueError("a chain has at least one node")
    t = RootedTree()
    for _ in range(n - 1):
        t = RootedTree((t,))
    return t


def star(leaves: int) -> RootedTree:
    return RootedTree(tuple(RootedTree() for _ in range(leaves)))


def complete_tree(branching: int, height: int) -> RootedTree:
    t = RootedTree()
    for _ in range(height):
        t = RootedTree(tuple(t for _ in range(branching)))
    return t


def rooted_trees(n: int) -> list[RootedTree]:
    """Every unlabeled rooted tree with ``n`` nodes, once each."""
    return list(_trees(n))


_TREE_CACHE: dict[int, list[RootedTree]] = {}


def _trees(n: int) -> list[RootedTree]:
    if n in _TREE_CACHE:
        return _TREE_CACHE[n]
    if n < 1:
        return []
    out = {}
    for forest in _forests(n - 1, n - 1):
        t = RootedTree(forest)
        out.setdefault(t.encoding, t)
    _TREE_CACHE[n] = sorted(out.values(), key=lambda t: t.encoding)
    return _TREE_CACHE[n]


def _forests(total: int, max_part: int) -> Iterator[tuple[RootedTree, ...]]:
    # multisets of trees with sizes summing to total, parts non-increasing
    if total == 0:
        yield ()
        return
    for first in range(min(total, max_part), 0, -1):
        for t in _trees(first):
            for rest in _forests(total - first, first):
                if rest and rest[0].size == first and rest[0].encoding < t.encoding:
                    continue
                yield (t,) + rest


# -- spaces <-> trees ----------------------------------------------------


def _finite_values(S: DistanceSet) -> tuple:
    if not S.is_finite:
        raise ValueError("the tree coding needs a finite distance set")
    return S.values


def tree_of_space(X: FiniteSpace) -> RootedTree:
    """The natural tree of ``X``: leaves at depth ``|S|`` labelled by the
    points of ``X``, with unary nodes wherever a level does not split."""
    values = _finite_values(X.S)
    h = len(values)
    if len(X) == 0:
        raise ValueError("empty space")
    verdict = validate_space(X.matrix, X.S)
    if not verdict:
        raise InvalidSpaceError(verdict)
    m = X.matrix

    def build(members: list[int], k: int) -> RootedTree:
        if k == h:
            if len(members) != 1:
                raise AssertionError("distinct points at distance 0")
            return RootedTree((), X.labels[members[0]])
        groups: list[list[int]] = []
        for i in members:
            for g in groups:
                if m[i][g[0]] < values[k]:
                    g.append(i)
                    break
            else:
                groups.append([i])
        return RootedTree(tuple(build(g, k + 1) for g in groups))

    return build(list(range(len(X))), 0)


def space_of_leaves(T: RootedTree, S: DistanceSet) -> FiniteSpace:
    """Leaves of ``T`` with ``d(x, y) = s_k``, ``k`` the height of their meet."""
    values = _finite_values(S)
    paths = T.leaves()
    depths = {len(p) for p in paths}
    if depths != {len(values)}:
        raise ValueError(f"leaf depths {sorted(depths)} do not all equal |S| = {len(values)}")
    nodes = T.leaf_nodes()
    labels = [t.label if t.label is not None else f"x{i}" for i, t in enumerate(nodes)]
    n = len(paths)
    matrix = [[0] * n for _ in range(n)]
    for i, j in itertools.combinations(range(n), 2):
        a, b = paths[i], paths[j]
        k = 0
        while a[k] == b[k]:
            k += 1
        matrix[i][j] = matrix[j][i] = values[k]
    return FiniteSpace(tuple(labels), tuple(map(tuple, matrix)), S)


def canonical_encoding(T: RootedTree) -> bytes:
    """Bottom-up sorted-subtree serialisation; equal iff isomorphic."""
    return T.encoding


def is_isomorphic(T: RootedTree, U: RootedTree) -> bool:
    return T.encoding == U.encoding


def tree_isomorphisms(T: RootedTree, U: RootedTree) -> Iterator[tuple[int, ...]]:
    """Every isomorphism ``T -> U`` as a tuple mapping preorder indices of
    ``T`` to preorder indices of ``U``."""
    if T.encoding != U.encoding:
        return

    def child_offsets(t: RootedTree, i: int) -> list[int]:
        out, j = [], i + 1
        for c in t.children:
            out.append(j)
            j += c.size
        return out

    def match(a: RootedTree, ia: int, b: RootedTree, ib: int) -> Iterator[dict[int, int]]:
        # a and b are isomorphic; group children by encoding
        groups_a: dict[bytes, list] = {}
        groups_b: dict[bytes, list] = {}
        for c, j in zip(a.children, child_offsets(a, ia)):
            groups_a.setdefault(c.encoding, []).append((c, j))
        for c, j in zip(b.children, child_offsets(b, ib)):
            groups_b.setdefault(c.encoding, []).append((c, j))
        pairings = []
        for enc, ca in groups_a.items():
            cb = groups_b[enc]
            pairings.append([list(zip(ca, p)) for p in itertools.permutations(cb)])
        for choice in itertools.product(*pairings):
            pairs = [pr for group in choice for pr in group]
            subs = [list(match(x, jx, y, jy)) for (x, jx), (y, jy) in pairs]
            for sub in itertools.product(*subs):
                m = {ia: ib}
                for part in sub:
                    m.update(part)
                yield m

    n = T.size
    for m in match(T, 0, U, 0):
        yield tuple(m[i] for i in range(n))


# -- counting --------------------------------------------------------------


def count_linear_extensions(T: RootedTree) -> int:
    """``|T|! / prod_v |subtree(v)|``, exact."""
    sizes = 1
    for t in T.preorder():
        sizes *= t.size
    count, rem = divmod(math.factorial(T.size), sizes)
    assert rem == 0
    return count


def linear_extensions(T: RootedTree) -> Iterator[tuple[int, ...]]:
    """Every linear order of the nodes extending the tree order, as tuples
    of preorder indices (root first)."""
    par = T.parents()
    n = len(par)
    kids: list[list[int]] = [[] for _ in range(n)]
    for i in range(1, n):
        kids[par[i]].append(i)
    order: list[int] = [0]
    avail = list(kids[0])

    def rec():
        if len(order) == n:
            yield tuple(order)
            return
        for pos in range(len(avail)):
            v = avail[pos]
            rest = avail[:pos] + avail[pos + 1 :]
            saved = avail[:]
            avail[:] = rest + kids[v]
            order.append(v)
            yield from rec()
            order.pop()
            avail[:] = saved

    yield from rec()


def brute_force_extensions(T: RootedTree, bound: int = 10, collect: bool = False):
    """Count linear extensions by enumeration.

    Returns the count, or ``(count, orders)`` when ``collect`` is set.

    Raises:
        ValueError: if ``T`` has more than ``bound`` nodes.
    """
    if T.size > bound:
        raise ValueError(f"tree has {T.size} nodes; brute force is capped at {bound}")
    if collect:
        orders = list(linear_extensions(T))
        return len(orders), orders
    return sum(1 for _ in linear_extensions(T))


def count_automorphisms(T: RootedTree) -> int:
    total = 1
    for t in T.preorder():
        for mult in Counter(c.encoding for c in t.children).values():
            total *= math.factorial(mult)
    return total


@dataclass(frozen=True)
class DegreeReport:
    extension_count: int
    orbit_count: int
    automorphisms: int
    tree: RootedTree = field(repr=False)

    def to_json(self) -> dict:
        return {
            "extension_count": str(self.extension_count),
            "orbit_count": str(self.orbit_count),
            "automorphisms": str(self.automorphisms),
            "tree": self.tree.to_nested(),
        }


def big_ramsey_degree(X: FiniteSpace) -> DegreeReport:
    """Both degree candidates for ``X`` in ``U_S``: the number of linear
    extensions of its tree and that number divided by ``|Aut|``."""
    T = tree_of_space(X)
    ext = count_linear_extensions(T)
    aut = count_automorphisms(T)
    orbit, rem = divmod(ext, aut)
    if rem:
        raise AssertionError("automorphism group does not act freely on extensions")
    return DegreeReport(ext, orbit, aut, T)


@dataclass(frozen=True)
class MonotonicityReport:
    sizes: tuple[int, ...]
    extension_counts: tuple[int, ...]
    orbit_counts: tuple[int, ...]
    strictly_increasing: bool

    def to_json(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "extension_counts": [str(v) for v in self.extension_counts],
            "orbit_counts": [str(v) for v in self.orbit_counts],
            "strictly_increasing": self.strictly_increasing,
        }


def degree_monotonicity_report(X: FiniteSpace, *chain_of_sets: DistanceSet) -> MonotonicityReport:
    """Degrees of ``X`` over a strictly increasing chain ``S ⊊ S' ⊊ ...`` of
    finite distance sets.

    Raises:
        ValueError: if ``|X| < 2``, a set is infinite, the chain is not
            strictly increasing, or ``X`` has a distance outside the first set.
    """
    if len(X) < 2:
        raise ValueError("the comparison needs at least two points")
    if len(chain_of_sets) < 2:
        raise ValueError("give at least two distance sets")
    for S in chain_of_sets:
        _finite_values(S)
    for a, b in zip(chain_of_sets, chain_of_sets[1:]):
        if not (a.is_subset_of(b) and len(a) < len(b)):
            raise ValueError(f"{a} is not a proper subset of {b}")
    if not all(d in chain_of_sets[0] for d in X.distances()):
        raise ValueError("the space has distances outside the first set")
    reports = [big_ramsey_degree(X.over(S)) for S in chain_of_sets]
    ext = tuple(r.extension_count for r in reports)
    return MonotonicityReport(
        tuple(len(S) for S in chain_of_sets),
        ext,
        tuple(r.orbit_count for r in reports),
        all(a < b for a, b in zip(ext, ext[1:])),
    )
