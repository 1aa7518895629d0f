from fractions import Fraction as F
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_automorphisms, brute_extensions, brute_isometric, spaces, trees
from ultraramsey import (
    DistanceSet,
    FiniteSpace,
    QPoint,
    RootedTree,
    big_ramsey_degree,
    brute_force_extensions,
    canonical_encoding,
    chain,
    complete_tree,
    count_automorphisms,
    count_linear_extensions,
    degree_monotonicity_report,
    is_isomorphic,
    linear_extensions,
    rooted_trees,
    space_of_leaves,
    star,
    tree_isomorphisms,
    tree_of_space,
)

# OEIS A000081: rooted unlabeled trees by node count
A000081 = [1, 1, 2, 4, 9, 20, 48, 115]


def test_rooted_tree_counts():
    assert [len(rooted_trees(n)) for n in range(1, 9)] == A000081


def test_nested_round_trip():
    T = RootedTree.from_nested([[[], []], []])
    assert T.to_nested() == [[[], []], []]
    assert T.size == 5 and T.height == 2
    assert RootedTree.from_nested([[], []]).size == 3


def test_known_counts():
    assert count_linear_extensions(chain(3)) == 1
    assert count_linear_extensions(star(2)) == 2
    assert count_linear_extensions(star(4)) == 24
    assert count_automorphisms(star(4)) == 24
    assert count_automorphisms(chain(5)) == 1
    # complete binary tree of height 2: 7!/(7*3*3) = 80, |Aut| = 8
    T = complete_tree(2, 2)
    assert count_linear_extensions(T) == 80
    assert count_automorphisms(T) == 8


@given(trees(max_nodes=7))
def test_extension_count_matches_permutations(T):
    assert count_linear_extensions(T) == brute_extensions(T)


@given(trees(max_nodes=7))
def test_automorphisms_match_permutations(T):
    assert count_automorphisms(T) == brute_automorphisms(T)
    assert len(set(tree_isomorphisms(T, T))) == count_automorphisms(T)


@given(trees(max_nodes=7))
def test_linear_extensions_generator(T):
    exts = list(linear_extensions(T))
    assert len(exts) == len(set(exts)) == count_linear_extensions(T)
    par = T.parents()
    for e in exts:
        pos = {v: i for i, v in enumerate(e)}
        assert all(pos[par[v]] < pos[v] for v in range(1, T.size))


@given(trees(max_nodes=7))
def test_aut_divides_extensions(T):
    assert count_linear_extensions(T) % count_automorphisms(T) == 0


def test_brute_force_bound():
    with pytest.raises(ValueError):
        brute_force_extensions(chain(12), bound=10)


@given(trees(max_nodes=8), st.randoms())
def test_canonical_encoding_invariant_under_shuffles(T, rnd):
    def shuffle(t):
        kids = [shuffle(c) for c in t]
        rnd.shuffle(kids)
        return kids

    U = RootedTree.from_nested(shuffle(T.to_nested()))
    assert canonical_encoding(T) == canonical_encoding(U)
    assert is_isomorphic(T, U)


def test_non_isomorphic_trees_differ():
    encs = {canonical_encoding(T) for T in rooted_trees(7)}
    assert len(encs) == 48


@given(spaces())
def test_space_tree_space(X):
    T = tree_of_space(X)
    assert T.leaf_depths() == {len(X.S)}
    Y = space_of_leaves(T, X.S)
    idx = {l: i for i, l in enumerate(X.labels)}
    for a, la in enumerate(Y.labels):
        for b, lb in enumerate(Y.labels):
            assert Y.d(a, b) == X.d(idx[la], idx[lb])


@given(spaces(max_points=6))
def test_tree_of_space_is_isometry_invariant(X):
    Y = X.subspace(list(reversed(range(len(X)))))
    assert canonical_encoding(tree_of_space(X)) == canonical_encoding(tree_of_space(Y))


def test_tree_of_space_pair_and_triangle():
    S = DistanceSet([1])
    assert tree_of_space(FiniteSpace.equilateral(2, 1, S)).unlabeled() == star(2)
    S2 = DistanceSet([1, F(1, 2)])
    X = FiniteSpace.from_points([QPoint(), QPoint({F(1, 2): 1}), QPoint({1: 1})], S2)
    assert tree_of_space(X).unlabeled() == RootedTree.from_nested([[[]], [[], []]])


def test_space_of_leaves_rejects_ragged():
    with pytest.raises(ValueError):
        space_of_leaves(RootedTree.from_nested([[[]], []]), DistanceSet([1, F(1, 2)]))


def test_space_of_leaves_distances_separate_trees():
    S = DistanceSet([1, F(1, 2)])
    two = [T for T in rooted_trees(5) if T.leaf_depths() == {2}]
    spaces_ = [space_of_leaves(T, S) for T in two]
    for i in range(len(spaces_)):
        for j in range(len(spaces_)):
            assert brute_isometric(spaces_[i], spaces_[j]) == (i == j)


def test_degree_of_pair():
    rep = big_ramsey_degree(FiniteSpace.equilateral(2, 1, DistanceSet([1])))
    assert (rep.extension_count, rep.orbit_count, rep.automorphisms) == (2, 1, 2)
    assert rep.to_json()["extension_count"] == "2"


def test_degree_of_equilateral():
    # root with n leaves over |S| = 1: n! extensions, n! automorphisms
    for n in range(1, 6):
        rep = big_ramsey_degree(FiniteSpace.equilateral(n, 1, DistanceSet([1])))
        assert rep.extension_count == factorial(n) and rep.orbit_count == 1


def test_monotonicity_pair():
    X = FiniteSpace.equilateral(2, 1, DistanceSet([1]))
    chain_ = [DistanceSet([1]), DistanceSet([1, F(1, 2)]), DistanceSet([1, F(1, 2), F(1, 4)])]
    rep = degree_monotonicity_report(X, *chain_)
    assert rep.extension_counts == (2, 6, 20)
    assert rep.strictly_increasing


def test_monotonicity_validation():
    X = FiniteSpace.equilateral(2, 1, DistanceSet([1]))
    with pytest.raises(ValueError):
        degree_monotonicity_report(X, DistanceSet([1]), DistanceSet([1]))
    with pytest.raises(ValueError):
        degree_monotonicity_report(FiniteSpace.equilateral(1, 1, DistanceSet([1])), DistanceSet([1]), DistanceSet([1, 2]))
    with pytest.raises(ValueError):
        degree_monotonicity_report(X, DistanceSet([2]), DistanceSet([2, 3]))
