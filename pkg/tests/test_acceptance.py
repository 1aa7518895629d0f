"""The ten acceptance criteria, each at its stated tolerance and time limit.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import itertools
import random
import time
from fractions import Fraction as F

import conftest
from conftest import POOL, brute_extensions
from ultraramsey import (
    DistanceSet,
    FiniteSpace,
    QPoint,
    RootedTree,
    canonical_encoding,
    check_arrow,
    count_linear_extensions,
    counterexample_is_valid,
    degree_monotonicity_report,
    downward_copies,
    enumerate_qpoints,
    enumerate_qspace,
    exhaustive_arrow,
    is_expanded,
    is_isometric,
    lift_coloring,
    linear_extensions,
    phi,
    psi,
    q_distance,
    restrict_point,
    rooted_trees,
    space_of_leaves,
    tree_of_space,
    type_of,
    window_children,
)
from ultraramsey.core import Region
from ultraramsey.divlab import (
    Embedding,
    Ladder,
    ModClasses,
    OracleColoring,
    almost_finite_range,
    build_ball_cover,
    check_not_constant_not_injective,
    injective_copy,
    monochromatic_copy,
    range_witness,
    sphere_coloring,
    sphere_color,
)


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.1f}s, limit {self.limit}s"


def K(n, S=DistanceSet([1])):
    return FiniteSpace.equilateral(n, 1, S)


def test_ac01_extension_count_oracle():
    with Timer(60):
        trees = [T for n in range(1, 8) for T in rooted_trees(n)]
        assert len(trees) == 1 + 1 + 2 + 4 + 9 + 20 + 48
        for T in trees:
            assert count_linear_extensions(T) == brute_extensions(T)


def _random_uniform_tree(rng, h):
    def grow(depth):
        if depth == h:
            return []
        return [grow(depth + 1) for _ in range(rng.choice([1, 1, 2, 3]))]

    return RootedTree.from_nested(grow(0))


def test_ac02_duality_round_trip():
    rng = random.Random(20240)
    with Timer(30):
        for _ in range(500):
            S = DistanceSet(rng.sample(POOL, rng.randint(1, 4)))
            coords = S.values
            n = rng.randint(1, min(8, 3 ** len(coords)))
            rows = rng.sample(list(itertools.product(range(3), repeat=len(coords))), n)
            X = FiniteSpace.from_points([QPoint(dict(zip(coords, r))) for r in rows], S)
            T = tree_of_space(X)
            Y = space_of_leaves(T, S)
            assert is_isometric(X, Y)
            # labels travel with the leaves, so the isometry is the identity on labels
            pos = {l: i for i, l in enumerate(Y.labels)}
            assert all(X.d(a, b) == Y.d(pos[X.labels[a]], pos[X.labels[b]]) for a in range(n) for b in range(n))
            assert canonical_encoding(tree_of_space(Y)) == canonical_encoding(T)
            U = _random_uniform_tree(rng, len(S))
            assert canonical_encoding(tree_of_space(space_of_leaves(U, S))) == canonical_encoding(U)


def test_ac03_psi_phi_bijection():
    values, height = 6, 2
    ch = window_children(values, height)
    patterns = [T for n in range(1, 6) for T in rooted_trees(n) if T.height <= height]
    checked = 0
    with Timer(60):
        for T in patterns:
            for C in downward_copies(T, ch):
                if not is_expanded(C):
                    continue
                for order in type_of(C, T):
                    assert phi(order, psi(C), T) == C
                    checked += 1
            for order in linear_extensions(T):
                for M in itertools.combinations(range(values), T.size - 1):
                    C = phi(order, M, T)
                    assert all(len(u) <= height and all(v < values for v in u) for u in C)
                    assert is_expanded(C)
                    assert psi(C) == frozenset(M)
    assert checked > 0


def test_ac04_arrow_ground_truth():
    with Timer(120):
        v6 = check_arrow(K(6), K(3), K(2), 2, 1)
        assert v6.status == "holds"
        assert exhaustive_arrow(K(6), K(3), K(2), 2, 1) is True
        v5 = check_arrow(K(5), K(3), K(2), 2, 1)
        assert v5.status == "fails"
        assert counterexample_is_valid(v5.counterexample, v5.x_copies, v5.y_copies, 1)
        # self-certification without the library: every triangle sees both colours
        col = {tuple(c.points): x for c, x in zip(v5.x_copies, v5.counterexample)}
        for tri in itertools.combinations(range(5), 3):
            assert len({col[e] for e in itertools.combinations(tri, 2)}) == 2
        assert exhaustive_arrow(K(5), K(3), K(2), 2, 1) is False


def test_ac05_degree_candidate_experiment():
    table = {}
    with Timer(120):
        for z in range(3, 9):
            for y in range(2, 5):
                if y > z:
                    continue
                for l in (1, 2):
                    v = check_arrow(K(z), K(y), K(2), 2, l)
                    assert v.status in ("holds", "fails")
                    n_copies = len(v.x_copies)
                    if 2**n_copies <= 2**15:
                        assert v.holds == exhaustive_arrow(K(z), K(y), K(2), 2, l)
                    if v.status == "holds":
                        table[z, y] = l
                        break
                else:
                    table[z, y] = None
    # l = 2 = number of colours always suffices
    assert all(v is not None for v in table.values())
    conftest.AC_NOTES.append("ac05 observed minimal l for Z -> (Y)^pair_{2,l}, |S| = 1 (finite Z only):")
    for (z, y), l in sorted(table.items()):
        conftest.AC_NOTES.append(f"  |Z|={z} |Y|={y} minimal l={l}")


def test_ac06_sphere_colouring_mechanism():
    S = DistanceSet(rule=lambda j: 1 - F(1, 2 ** (j + 1)), sup=1)
    L = Ladder(lambda i: 1 - F(1, 2**i), sup=1)
    with Timer(30):
        C = sphere_coloring(S, L, ModClasses(10), 6, 3)
        copy = Embedding.identity()
        for y in enumerate_qpoints(S, 6, 3):
            for j in range(10):
                w = range_witness(copy, y, j, C)
                assert sphere_color(w, C) == j
                assert copy(copy.inverse(w)) == w


S3 = DistanceSet([1, F(1, 2), F(1, 4)])
TARGET8 = FiniteSpace.from_points(enumerate_qpoints(S3, 3, 2), S3)


def _check_mono(chi, k):
    R = Region(S3, 3, 4)
    with Timer(60):
        res = monochromatic_copy(chi, k, TARGET8, R)
        assert res.status == "complete"
        pts = res.state.points
        D = tuple(tuple(q_distance(a, b) for b in pts) for a in pts)
        assert D == TARGET8.matrix
        assert len({chi(p) for p in pts}) == 1


def test_ac07a_monochromatic_constant():
    _check_mono(OracleColoring.constant(1), 1)


def test_ac07b_monochromatic_first_coordinate_parity():
    _check_mono(OracleColoring.coordinate_mod(1, 2), 2)


def test_ac07c_monochromatic_three_class_table():
    rng = random.Random(7)
    pts = Region(S3, 3, 4).points()
    _check_mono(OracleColoring.table({p: rng.randrange(3) for p in pts}, 3), 3)


def test_ac08_ball_cover():
    S = DistanceSet(rule=lambda j: F(1, 2**j))
    with Timer(30):
        cov = build_ball_cover(S, 20)
        first20 = list(cov.balls[:20])
        r = [b.radius for b in first20]
        assert len(first20) == 20 and all(a > b for a, b in zip(r, r[1:]))
        window = list(itertools.islice(enumerate_qspace(S), 3000))
        for x in window[:1000]:
            cov(x)  # extends the cover lazily until x is covered
        radii = cov.radii
        assert all(a > b for a, b in zip(radii, radii[1:]))
        for x in window:
            assert sum(x in b for b in cov.balls) <= 1
        for x in window[:1000]:
            assert sum(x in b for b in cov.balls) == 1
        rep = check_not_constant_not_injective(cov, Embedding.identity(), window[:60])
        assert rep.status == "found"
        a, b = rep.equal_pair
        assert a != b and cov(a) == cov(b)
        c, d = rep.distinct_pair
        assert cov(c) != cov(d)
    conftest.AC_NOTES.append(f"ac08 first 1000 enumerated points covered by {len(cov.balls)} balls")


def test_ac09_injective_engine():
    S = DistanceSet([1, F(1, 2)])
    R = Region(S, 2, 9)
    target = FiniteSpace.from_points([QPoint({1: a, F(1, 2): b}) for a in range(4) for b in range(2)], S)
    f = lambda x: x.get(F(1, 2))
    with Timer(10):
        st = injective_copy(f, lambda x: True, target, R)
        assert st.status == "complete" and len(st.points) == 8
        assert len({f(y) for y in st.points}) == 8
        D = tuple(tuple(q_distance(a, b) for b in st.points) for a in st.points)
        assert D == target.matrix
        st = injective_copy(lambda x: 0, lambda x: True, target, R)
        assert st.status == "blocked" and st.blocked.kind == "finite_range"
        afr = almost_finite_range(lambda x: 0, st.blocked.ball, lambda x: True, R, width=len(st.blocked.covering), range_bound=1)
        assert afr.status == "almost_finite" and afr.values == [0]


def test_ac10_degree_monotonicity():
    S, Sp, Spp = DistanceSet([1]), DistanceSet([1, F(1, 2)]), DistanceSet([1, F(1, 2), F(1, 4)])
    rng = random.Random(10)
    with Timer(10):
        rep = degree_monotonicity_report(K(2), S, Sp, Spp)
        assert rep.extension_counts == (2, 6, 20)
        assert rep.strictly_increasing
        chi = lift_coloring(Spp, Sp, lambda pair: hash(pair) % 3, kind="copies")
        pts = enumerate_qpoints(Spp, 3, 4)
        n = 0
        while n < 10_000:
            a, b = rng.sample(pts, 2)
            d = q_distance(a, b)
            if d not in Sp:
                continue
            ra, rb = restrict_point(a, Sp), restrict_point(b, Sp)
            assert q_distance(ra, rb) == d
            assert chi((a, b)) == hash((ra, rb)) % 3
            n += 1
