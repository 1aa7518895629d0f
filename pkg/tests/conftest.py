import itertools
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ultraramsey import DistanceSet, FiniteSpace, QPoint, RootedTree

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

POOL = [Fraction(3), Fraction(2), Fraction(1), Fraction(2, 3), Fraction(1, 2), Fraction(1, 4), Fraction(1, 7)]


@st.composite
def distance_sets(draw, max_size=4):
    vals = draw(st.lists(st.sampled_from(POOL), min_size=1, max_size=max_size, unique=True))
    return DistanceSet(vals)


@st.composite
def spaces(draw, max_points=8, max_s=4, width=3):
    S = draw(distance_sets(max_s))
    coords = S.values
    cap = min(max_points, width ** len(coords))
    n = draw(st.integers(1, cap))
    rows = draw(
        st.lists(st.tuples(*[st.integers(0, width - 1)] * len(coords)), min_size=n, max_size=n, unique=True)
    )
    return FiniteSpace.from_points([QPoint(dict(zip(coords, r))) for r in rows], S)


@st.composite
def trees(draw, max_nodes=8):
    n = draw(st.integers(1, max_nodes))
    parents = [draw(st.integers(0, i - 1)) for i in range(1, n)]
    kids = {i: [] for i in range(n)}
    for c, p in enumerate(parents, start=1):
        kids[p].append(c)

    def build(i):
        return [build(c) for c in kids[i]]

    return RootedTree.from_nested(build(0))


def brute_isometric(A, B):
    if len(A) != len(B):
        return False
    n = len(A)
    return any(
        all(A.d(i, j) == B.d(p[i], p[j]) for i in range(n) for j in range(n))
        for p in itertools.permutations(range(n))
    )


def brute_extensions(T):
    par = T.parents()
    n = len(par)
    total = 0
    for perm in itertools.permutations(range(n)):
        pos = {v: i for i, v in enumerate(perm)}
        if all(pos[par[v]] < pos[v] for v in range(1, n)):
            total += 1
    return total


def brute_automorphisms(T):
    par = T.parents()
    n = len(par)
    return sum(
        1
        for p in itertools.permutations(range(n))
        if p[0] == 0 and all(p[par[v]] == par[p[v]] for v in range(1, n))
    )


_AC_RESULTS = {}
AC_NOTES: list[str] = []


def pytest_runtest_logreport(report):
    if "test_acceptance" in report.nodeid and report.when == "call":
        name = report.nodeid.split("::")[-1]
        _AC_RESULTS[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _AC_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_AC_RESULTS.items()):
        terminalreporter.write_line(f"{name}: {'PASS' if outcome == 'passed' else 'FAIL'}")
    for line in AC_NOTES:
        terminalreporter.write_line(line)
