import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_isometric, spaces
from ultraramsey import (
    DistanceSet,
    FiniteSpace,
    QPoint,
    RootedTree,
    check_arrow,
    counterexample_is_valid,
    downward_copies,
    enumerate_copies,
    enumerate_qpoints,
    exhaustive_arrow,
    expanded_universal,
    is_expanded,
    lift_coloring,
    linear_extensions,
    phi,
    psi,
    q_distance,
    restrict_point,
    rooted_trees,
    star,
    tree_of_nodes,
    type_of,
    window_children,
)

S1 = DistanceSet([1])


def K(n):
    return FiniteSpace.equilateral(n, 1, S1)


def brute_copies(Z, X):
    return sorted(c for c in itertools.combinations(range(len(Z)), len(X)) if brute_isometric(Z.subspace(c), X))


def brute_arrow(Z, Y, X, k, l):
    xs = brute_copies(Z, X)
    ys = [set(c) for c in brute_copies(Z, Y)]
    if not ys:
        return False
    inside = [[i for i, c in enumerate(xs) if set(c) <= y] for y in ys]
    for col in itertools.product(range(k), repeat=len(xs)):
        if all(len({col[i] for i in ins}) > l for ins in inside):
            return False
    return True


@given(spaces(max_points=6, max_s=2), st.data())
def test_copies_match_brute_force(Z, data):
    idx = data.draw(st.lists(st.integers(0, len(Z) - 1), min_size=1, max_size=min(3, len(Z)), unique=True))
    X = Z.subspace(idx)
    cps = enumerate_copies(Z, X)
    assert [c.points for c in cps] == brute_copies(Z, X)
    for c in cps:
        assert all(Z.d(c.bijection[i], c.bijection[j]) == X.d(i, j) for i in range(len(X)) for j in range(len(X)))


def test_copy_counts_equilateral():
    assert len(enumerate_copies(K(6), K(2))) == 15
    assert len(enumerate_copies(K(6), K(3))) == 20
    assert enumerate_copies(K(2), K(3)) == []


def test_arrow_classical_ramsey():
    assert check_arrow(K(6), K(3), K(2), 2, 1).status == "holds"
    v = check_arrow(K(5), K(3), K(2), 2, 1)
    assert v.status == "fails"
    assert counterexample_is_valid(v.counterexample, v.x_copies, v.y_copies, 1)


def test_arrow_trivial_cases():
    assert check_arrow(K(3), K(4), K(2), 2, 1).status == "fails"
    assert check_arrow(K(3), K(3), K(2), 2, 2).status == "holds"
    assert check_arrow(K(4), K(2), K(2), 3, 1).status == "holds"


def test_arrow_budget_gives_unknown():
    v = check_arrow(K(6), K(3), K(2), 2, 1, budget=5)
    assert v.status == "unknown" and v.holds is None


@st.composite
def arrow_instances(draw):
    S = DistanceSet([1, F(1, 2)])
    pool = enumerate_qpoints(S, 2, 3)
    pts = draw(st.lists(st.sampled_from(pool), min_size=3, max_size=6, unique=True))
    Z = FiniteSpace.from_points(pts, S)
    yi = draw(st.lists(st.integers(0, len(Z) - 1), min_size=2, max_size=min(4, len(Z)), unique=True))
    Y = Z.subspace(yi)
    xi = draw(st.lists(st.sampled_from(range(len(yi))), min_size=1, max_size=2, unique=True))
    X = Y.subspace(xi)
    k = draw(st.integers(1, 3))
    l = draw(st.integers(1, 2))
    return Z, Y, X, k, l


@given(arrow_instances())
def test_arrow_matches_exhaustive(inst):
    Z, Y, X, k, l = inst
    if k ** len(enumerate_copies(Z, X)) > 5000:
        return
    v = check_arrow(Z, Y, X, k, l)
    expected = brute_arrow(Z, Y, X, k, l)
    assert v.holds == expected == exhaustive_arrow(Z, Y, X, k, l)
    if v.status == "fails":
        assert counterexample_is_valid(v.counterexample, v.x_copies, v.y_copies, l)


def test_arrow_json_witness():
    v = check_arrow(K(5), K(3), K(2), 2, 1)
    out = v.to_json(K(5))
    assert out["holds"] is False
    assert len(out["witness"]["coloring"]) == 10


# -- expanded subtrees ----------------------------------------------------


def test_is_expanded_examples():
    assert is_expanded({(), (0,), (1,), (0, 2), (1, 3)})
    assert not is_expanded({(), (1,), (1, 1)})  # not strictly increasing
    assert not is_expanded({(), (0,), (1,), (0, 4), (1, 4)})  # divergence healed
    # distinct last entries are required so the order by last entry is linear
    assert not is_expanded({(), (0,), (0, 3), (3,), (3, 4)})
    with pytest.raises(ValueError):
        is_expanded({(0,), (1,)})
    with pytest.raises(ValueError):
        is_expanded({(), (0, 1), (0, 2)})


def test_tree_of_nodes_shape():
    T = tree_of_nodes({(), (0,), (0, 1), (0, 2)})
    assert T.unlabeled() == RootedTree.from_nested([[[], []]])


def test_types_of_symmetric_copy():
    C = {(), (0,), (1,)}
    types = type_of(C, star(2))
    assert sorted(types) == sorted(linear_extensions(star(2)))
    assert all(phi(t, psi(C), star(2)) == frozenset(C) for t in types)


def test_phi_rejects_bad_input():
    with pytest.raises(ValueError):
        phi((0, 1, 2), [1], star(2))
    with pytest.raises(ValueError):
        phi((1, 0, 2), [1, 2], star(2))


@given(st.sampled_from([T for n in range(2, 6) for T in rooted_trees(n) if T.height <= 2]), st.data())
def test_psi_phi_identity(T, data):
    order = data.draw(st.sampled_from(list(linear_extensions(T))))
    M = data.draw(st.lists(st.integers(0, 30), min_size=T.size - 1, max_size=T.size - 1, unique=True))
    C = phi(order, M, T)
    assert is_expanded(C)
    assert psi(C) == frozenset(M)
    assert order in type_of(C, T)


def test_phi_psi_on_window():
    ch = window_children(4, 2)
    for T in [T for n in range(2, 5) for T in rooted_trees(n) if len(T.leaf_depths()) == 1]:
        for C in downward_copies(T, ch):
            if is_expanded(C):
                for t in type_of(C, T):
                    assert phi(t, psi(C), T) == C


def test_downward_copies_count():
    # root with two leaves in {0..3}^{<=1}: choose 2 of 4 children
    assert len(downward_copies(star(2), window_children(4, 1))) == 6


def _children_in(E):
    def ch(x):
        return sorted(v for v in E if len(v) == len(x) + 1 and v[: len(x)] == x)

    return ch


def test_expanded_universal_realises_every_type():
    E = expanded_universal(range(500), 2, 4)
    assert is_expanded(E)
    ch = _children_in(E)
    for n in range(2, 5):
        for T in rooted_trees(n):
            if T.height > 2:
                continue
            seen = set()
            for C in downward_copies(T, ch):
                seen.update(type_of(C, T))
            assert seen == set(linear_extensions(T))


def test_expanded_universal_needs_labels():
    with pytest.raises(ValueError):
        expanded_universal(range(5), 2, 3)


# -- restriction ----------------------------------------------------------


def test_restrict_point():
    x = QPoint({1: 2, F(1, 2): 3, F(1, 4): 1})
    assert restrict_point(x, DistanceSet([1, F(1, 4)])) == QPoint({1: 2, F(1, 4): 1})


def test_lift_coloring_pairs_and_points():
    S = DistanceSet([1, F(1, 2), F(1, 4)])
    Sp = DistanceSet([1, F(1, 4)])
    rng = random.Random(5)
    pts = enumerate_qpoints(S, 3, 3)
    chi = lift_coloring(S, Sp, lambda pair: int(q_distance(*pair) == 1), kind="copies")
    for _ in range(300):
        a, b = rng.sample(pts, 2)
        d = q_distance(a, b)
        if d in Sp:
            assert q_distance(restrict_point(a, Sp), restrict_point(b, Sp)) == d
            assert chi((a, b)) == int(d == 1)
        else:
            with pytest.raises(ValueError):
                chi((a, b))
    chi_p = lift_coloring(S, Sp, lambda x: x.get(F(1, 4)) % 2, kind="points")
    assert chi_p(QPoint({F(1, 2): 1, F(1, 4): 1})) == 1
    with pytest.raises(ValueError):
        lift_coloring(S, DistanceSet([3]), lambda x: 0)
