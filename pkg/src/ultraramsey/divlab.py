"""Constructive colourings and embedding engines on finite windows of ``Q_S``.

* a sphere colouring that every copy of ``Q_S`` sees in full, when ``(S, >)``
  is not well-ordered;
* smallness of a set in a ball, the greedy isometric embedding it controls,
  and the pruning that leaves a set not small in any ball it meets;
* a cover by disjoint balls with radii decreasing to 0, and the greedy
  construction of copies on which a map is injective.

Infinite objects are never materialised.  Every engine works inside a
:class:`~ultraramsey.core.Region` or along a lazy enumeration, and every
returned witness is re-checked before it is handed back.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .core import (
    Ball,
    DistanceSet,
    FiniteSpace,
    QPoint,
    Region,
    enumerate_qpoints,
    enumerate_qspace,
    parse_rational,
    q_distance,
)

__all__ = [
    "Ladder",
    "ModClasses",
    "PairingClasses",
    "SphereColoring",
    "build_separated_net",
    "sphere_coloring",
    "locate",
    "sphere_color",
    "theorem1_color",
    "Embedding",
    "range_witness",
    "OracleColoring",
    "SmallnessVerdict",
    "is_small",
    "StepRecord",
    "Blocked",
    "EmbeddingState",
    "greedy_embed",
    "PruneResult",
    "PruningAborted",
    "prune_sequence",
    "MonochromaticResult",
    "RegionTooSmall",
    "monochromatic_copy",
    "target_branching",
    "BallCoverColoring",
    "build_ball_cover",
    "CoverWitnessReport",
    "check_not_constant_not_injective",
    "RangeVerdict",
    "almost_finite_range",
    "injective_copy",
]


# -- sphere colouring -----------------------------------------------------


class Ladder:
    """A strictly increasing sequence ``0 = s_0 < s_1 < ...`` with ``s_i``
    (``i >= 1``) given by ``rule`` and supremum ``sup`` (``None``: unbounded)."""

    def __init__(self, rule: Callable[[int], Fraction], sup=None):
        self._rule = rule
        self._vals = [Fraction(0)]
        self.sup = None if sup is None else parse_rational(sup)

    def __getitem__(self, i: int) -> Fraction:
        while len(self._vals) <= i:
            v = parse_rational(self._rule(len(self._vals)))
            if v <= self._vals[-1]:
                raise ValueError("ladder is not strictly increasing")
            if self.sup is not None and v >= self.sup:
                raise ValueError("ladder value reaches its supremum")
            self._vals.append(v)
        return self._vals[i]

    def shell(self, d: Fraction) -> int:
        """The ``i`` with ``s_i <= d < s_{i+1}``."""
        if d < 0 or (self.sup is not None and d >= self.sup):
            raise ValueError(f"{d} lies outside [0, sup)")
        i = 0
        while not d < self[i + 1]:
            i += 1
        return i


class ModClasses:
    """``A_j = {i : i mod J = j}``."""

    def __init__(self, J: int):
        if J < 1:
            raise ValueError("need at least one class")
        self.J = J

    def class_of(self, i: int) -> int:
        return i % self.J

    def next_index(self, j: int, above: int) -> int:
        """Least ``i > above`` in ``A_j``."""
        if not 0 <= j < self.J:
            raise ValueError(f"no class {j}")
        i = above + 1
        return i + (j - i) % self.J


class PairingClasses:
    """Columns of the Cantor pairing: infinitely many infinite classes."""

    @staticmethod
    def _pair(j: int, t: int) -> int:
        return (j + t) * (j + t + 1) // 2 + t

    def class_of(self, i: int) -> int:
        w = (math.isqrt(8 * i + 1) - 1) // 2
        t = i - w * (w + 1) // 2
        return w - t

    def next_index(self, j: int, above: int) -> int:
        t = 0
        while self._pair(j, t) <= above:
            t += 1
        return self._pair(j, t)


@dataclass
class SphereColoring:
    """``chi(y) = j`` iff ``i(y)`` is in class ``j``, where ``y`` lies in the
    shell ``[s_i, s_{i+1})`` around its unique net point."""

    S: DistanceSet
    ladder: Ladder
    net: list[QPoint]
    classes: object  # ModClasses | PairingClasses

    def to_json(self) -> dict:
        return {
            "net": [e.to_json() for e in self.net],
            "sup": None if self.ladder.sup is None else str(self.ladder.sup),
        }


def build_separated_net(S: DistanceSet, ladder: Ladder, depth: int, width: int) -> list[QPoint]:
    """Greedy maximal subset of the window with pairwise distances ``>= sup``.
    An unbounded ladder gives a single point."""
    if ladder.sup is None:
        return [QPoint()]
    rho = ladder.sup
    net: list[QPoint] = []
    for x in enumerate_qpoints(S, depth, width):
        if all(q_distance(x, e) >= rho for e in net):
            net.append(x)
    return net


def sphere_coloring(S: DistanceSet, ladder: Ladder, classes, depth: int, width: int) -> SphereColoring:
    return SphereColoring(S, ladder, build_separated_net(S, ladder, depth, width), classes)


def locate(y: QPoint, C: SphereColoring) -> tuple[QPoint, int]:
    """The net point ``e`` within ``sup`` of ``y`` and the shell index.

    Raises:
        LookupError: if no net point is close enough (window too small).
    """
    rho = C.ladder.sup
    near = [e for e in C.net if rho is None or q_distance(e, y) < rho]
    if not near:
        raise LookupError(f"{y} lies outside every net cell; enlarge the window")
    if len(near) > 1:
        raise AssertionError("net points closer than sup")
    e = near[0]
    return e, C.ladder.shell(q_distance(e, y))


def sphere_color(y: QPoint, C: SphereColoring) -> int:
    return C.classes.class_of(locate(y, C)[1])


theorem1_color = sphere_color  # interface name


class Embedding:
    """An isometric embedding ``Q_S -> Q_S`` with a partial inverse."""

    def __init__(self, forward: Callable[[QPoint], QPoint], inverse: Callable[[QPoint], QPoint], name: str = ""):
        self._forward = forward
        self._inverse = inverse
        self.name = name

    def __call__(self, x: QPoint) -> QPoint:
        return self._forward(x)

    def inverse(self, y: QPoint) -> QPoint:
        return self._inverse(y)

    @classmethod
    def identity(cls) -> "Embedding":
        return cls(lambda x: x, lambda y: y, "identity")

    @classmethod
    def affine(cls, scale: int = 1, offset: Mapping | None = None) -> "Embedding":
        """``x(s) -> scale * x(s) + offset(s)`` coordinatewise; injective on
        every coordinate, hence isometric."""
        if scale < 1:
            raise ValueError("scale must be a positive integer")
        off = {parse_rational(s): int(v) for s, v in (offset or {}).items()}

        def fwd(x: QPoint) -> QPoint:
            d = {s: scale * v for s, v in x.support.items()}
            for s, c in off.items():
                d[s] = d.get(s, 0) + c
            return QPoint(d)

        def inv(y: QPoint) -> QPoint:
            d = {}
            keys = set(y.support) | set(off)
            for s in keys:
                q, rem = divmod(y.get(s) - off.get(s, 0), scale)
                if rem or q < 0:
                    raise ValueError(f"{y} is not in the range of the embedding")
                d[s] = q
            return QPoint(d)

        return cls(fwd, inv, f"affine(scale={scale})")


def range_witness(
    copy: Embedding,
    y: QPoint,
    j: int,
    C: SphereColoring,
    allow_self: bool = False,
    max_index: int | None = None,
) -> QPoint:
    """A point ``y_j`` of the copy with colour ``j``.

    Picks the least ``i_j > i(y) + 1`` in class ``j`` and moves the preimage
    of ``y`` at coordinate ``s_{i_j}``; the image is at distance ``s_{i_j}``
    from ``y`` and, by the isosceles rule, in shell ``i_j`` of ``e(y)``.

    Raises:
        ValueError: if ``i_j`` exceeds ``max_index`` or ``s_{i_j}`` is not in ``S``.
    """
    e, i = locate(y, C)
    if allow_self and C.classes.class_of(i) == j:
        return y
    ij = C.classes.next_index(j, i + 1)
    if max_index is not None and ij > max_index:
        raise ValueError(f"colour {j} needs ladder index {ij} > {max_index}")
    s = C.ladder[ij]
    if s not in C.S:
        raise ValueError(f"ladder value {s} is not in S")
    x = copy.inverse(y)
    yj = copy(x.with_coord(s, x.get(s) + 1))
    if q_distance(y, yj) != s:
        raise AssertionError("embedding is not isometric")
    if q_distance(e, yj) != q_distance(y, yj):
        raise AssertionError("isosceles rule violated")
    if sphere_color(yj, C) != j:
        raise AssertionError("witness has the wrong colour")
    return yj


# -- colourings -----------------------------------------------------------


class OracleColoring:
    """A memoised total map ``Q_S -> {0..k-1}``."""

    def __init__(self, k: int, func: Callable[[QPoint], int], name: str = "oracle"):
        self.k = k
        self._func = func
        self.name = name
        self.memo: dict[QPoint, int] = {}

    def __call__(self, x: QPoint) -> int:
        c = self.memo.get(x)
        if c is None:
            c = int(self._func(x))
            if not 0 <= c < self.k:
                raise ValueError(f"{self.name} returned {c} outside 0..{self.k - 1}")
            self.memo[x] = c
        return c

    @classmethod
    def constant(cls, k: int = 1, color: int = 0) -> "OracleColoring":
        return cls(k, lambda x: color, "constant")

    @classmethod
    def coordinate_mod(cls, s, k: int) -> "OracleColoring":
        s = parse_rational(s)
        return cls(k, lambda x: x.get(s) % k, f"x({s}) mod {k}")

    @classmethod
    def table(cls, entries: Mapping[QPoint, int], k: int, default: int = 0) -> "OracleColoring":
        entries = dict(entries)
        return cls(k, lambda x: entries.get(x, default), "table")


# -- smallness ------------------------------------------------------------


@dataclass
class SmallnessVerdict:
    """``status`` is ``"small"``, ``"not_small"`` or ``"unknown"``.

    ``covering`` (small) are the radius-``r^-`` balls that hold every probed
    point of ``A ∩ b``; ``witnesses`` (not small) lie in distinct children.
    """

    status: str
    ball: Ball
    covering: list[Ball] = field(default_factory=list)
    witnesses: list[QPoint] = field(default_factory=list)
    probes: int = 0

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "ball": self.ball.to_json(),
            "covering": [c.to_json() for c in self.covering],
            "witnesses": [w.to_json() for w in self.witnesses],
            "probes": self.probes,
        }


def is_small(
    A: Callable[[QPoint], bool],
    b: Ball,
    region: Region,
    width: int = 2,
    probe_budget: int = 10**6,
) -> SmallnessVerdict:
    """Finite test of smallness of ``A`` in ``b`` over the region points of ``b``.

    Not small once ``width`` points of ``A ∩ b`` in distinct children are
    found; small once every region point of ``b`` has been probed and fewer
    children were hit.
    """
    if b.radius == 0:
        inside = bool(A(b.center))
        return SmallnessVerdict("not_small" if inside else "small", b, [], [b.center] if inside else [], 1)
    r = b.radius
    lower = region.coords[region.coords.index(r) + 1 :]
    # the coordinate at r varies fastest so that distinct children show up early
    pts = sorted(region.points_in(b), key=lambda y: (tuple(y.get(c) for c in lower), y.get(r)))
    hit: dict[int, QPoint] = {}
    probes = 0
    for y in pts:
        if probes >= probe_budget:
            return SmallnessVerdict("unknown", b, [], list(hit.values()), probes)
        probes += 1
        if A(y):
            hit.setdefault(y.get(r), y)
            if len(hit) >= width:
                return SmallnessVerdict("not_small", b, [], list(hit.values()), probes)
    cr = region.true_child_radius(r)
    return SmallnessVerdict("small", b, [Ball(y, cr) for y in hit.values()], [], probes)


# -- greedy embedding -------------------------------------------------------


@dataclass
class StepRecord:
    index: int
    r: Fraction
    M: tuple[int, ...]
    ball: Ball
    excluded: list[Ball]
    probes: int

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "r": str(self.r),
            "M": list(self.M),
            "ball": self.ball.to_json(),
            "excluded": [c.to_json() for c in self.excluded],
            "probes": self.probes,
        }


@dataclass
class Blocked:
    """Why a step could not be completed inside the region.

    ``kind="small"``: no point of ``Y`` in ``ball`` outside ``covering``, so
    ``Y`` is small in ``ball`` within the region.  ``kind="finite_range"``:
    such points exist but ``f`` only takes the already used ``values`` there.
    """

    step: int
    kind: str
    ball: Ball | None
    covering: list[Ball]
    values: list[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "step": self.step,
            "kind": self.kind,
            "ball": None if self.ball is None else self.ball.to_json(),
            "covering": [c.to_json() for c in self.covering],
            "values": list(self.values),
        }


@dataclass
class EmbeddingState:
    """``status`` is ``"complete"``, ``"blocked"`` or ``"unknown"``."""

    target: tuple[tuple[Fraction, ...], ...]
    points: list[QPoint]
    steps: list[StepRecord]
    status: str
    blocked: Blocked | None = None
    probes: int = 0

    def verify(self, f: Callable | None = None) -> bool:
        """Re-check ``d(y_m, y_n) = d(x_m, x_n)`` (and injectivity of ``f``)."""
        n = len(self.points)
        for a in range(n):
            for b in range(a + 1, n):
                if q_distance(self.points[a], self.points[b]) != self.target[a][b]:
                    return False
        if f is not None:
            vals = [f(y) for y in self.points]
            if len(set(vals)) != len(vals):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "points": [p.to_json() for p in self.points],
            "steps": [s.to_json() for s in self.steps],
            "blocked": None if self.blocked is None else self.blocked.to_json(),
            "probes": self.probes,
        }


def _target_matrix(target) -> tuple[tuple[Fraction, ...], ...]:
    if isinstance(target, FiniteSpace):
        return target.matrix
    pts = list(target)
    return tuple(tuple(q_distance(a, b) for b in pts) for a in pts)


def greedy_embed(
    Y: Callable[[QPoint], bool],
    target,
    region: Region,
    budget: int = 10**6,
    f: Callable[[QPoint], int] | None = None,
) -> EmbeddingState:
    """Build ``y_0, y_1, ...`` inside ``Y ∩ region`` with the distances of ``target``.

    Step ``t`` takes ``r`` = least target distance from ``x_t`` to earlier
    points, ``M`` its minimisers, ``b`` the radius-``r`` ball around
    ``{y_m : m in M}``, and searches ``b`` minus the balls ``B(y_m, r^-)``.
    When ``f`` is given each new point also needs an ``f``-value not used
    before.  ``target`` is a :class:`FiniteSpace` or a sequence of points.
    """
    D = _target_matrix(target)
    n = len(D)
    pts: list[QPoint] = []
    steps: list[StepRecord] = []
    used: set[int] = set()
    probes = 0

    def state(status, blocked=None):
        st = EmbeddingState(D, list(pts), steps, status, blocked, probes)
        if status == "complete" and not st.verify(f):
            raise AssertionError("embedding failed its postcondition")
        return st

    if n == 0:
        return state("complete")
    for x in region.points():
        if probes >= budget:
            return state("unknown")
        probes += 1
        if Y(x):
            pts.append(x)
            if f is not None:
                used.add(f(x))
            break
    else:
        return state("blocked", Blocked(0, "small", region.root(), []))

    for t in range(1, n):
        row = D[t][:t]
        r = min(row)
        if r <= 0:
            raise ValueError("target points must be distinct")
        if r not in region.coords:
            raise ValueError(f"target distance {r} is not a region coordinate")
        M = tuple(m for m in range(t) if row[m] == r)
        b = Ball(pts[M[0]], r)
        excluded_vals = {pts[m].get(r) for m in M}
        cr = region.true_child_radius(r)
        excluded = [Ball(pts[m], cr) for m in M]
        seen_values: set[int] = set()
        saw_y = False
        start = probes
        chosen = None
        for y in region.points_in(b):
            if y.get(r) in excluded_vals:
                continue
            if probes >= budget:
                return state("unknown")
            probes += 1
            if not Y(y):
                continue
            saw_y = True
            if f is None:
                chosen = y
                break
            v = f(y)
            seen_values.add(v)
            if v not in used:
                chosen = y
                used.add(v)
                break
        steps.append(StepRecord(t, r, M, b, excluded, probes - start))
        if chosen is None:
            kind = "finite_range" if saw_y else "small"
            return state("blocked", Blocked(t, kind, b, excluded, sorted(seen_values)))
        pts.append(chosen)
    return state("complete")


def injective_copy(
    f: Callable[[QPoint], int],
    Y: Callable[[QPoint], bool],
    target,
    region: Region,
    budget: int = 10**6,
) -> EmbeddingState:
    """Greedy embedding on which ``f`` is injective; see :func:`greedy_embed`.

    A blocked run carries either a smallness certificate for ``Y`` or a
    finite-range certificate (the used values) for ``f`` in the blocking ball.
    """
    return greedy_embed(Y, target, region, budget, f)


# -- pruning --------------------------------------------------------------


class PruningAborted(RuntimeError):
    pass


@dataclass
class PruneResult:
    residue: frozenset[QPoint]
    stages: int
    log: list[list[Ball]]

    def to_json(self) -> dict:
        return {
            "residue_size": len(self.residue),
            "stages": self.stages,
            "removed": [[b.to_json() for b in stage] for stage in self.log],
        }


def prune_sequence(
    A: Callable[[QPoint], bool],
    region: Region,
    width: int | None = None,
    probe_budget: int | None = None,
) -> PruneResult:
    """Iterate ``A <- A minus (union of region balls in which A is small)``
    until nothing changes.

    Smallness is judged inside the region: a positive-radius ball is small
    when the current set meets fewer than ``width`` of its children
    (default: all ``region.width`` children are required).  The residue is
    not small in any region ball it meets.
    """
    width = region.width if width is None else width
    pts = region.points()
    if probe_budget is not None and len(pts) > probe_budget:
        raise PruningAborted(f"region has {len(pts)} points; budget is {probe_budget}")
    coords = region.coords
    d = region.depth
    current = {tuple(x.get(c) for c in coords) for x in pts if A(x)}
    log: list[list[Ball]] = []
    while current:
        small: list[tuple[int, tuple]] = []
        for level in range(d):
            kids: dict[tuple, set[int]] = {}
            for v in current:
                kids.setdefault(v[:level], set()).add(v[level])
            small.extend((level, p) for p, ks in kids.items() if len(ks) < width)
        if not small:
            break
        drop = set()
        for level, p in small:
            drop.update(v for v in current if v[:level] == p)
        current -= drop
        log.append([Ball(QPoint(dict(zip(coords, p))), coords[level]) for level, p in sorted(small)])
    residue = frozenset(QPoint(dict(zip(coords, v))) for v in current)
    return PruneResult(residue, len(log), log)


def target_branching(target) -> int:
    """Largest number of children of a ball of the target space."""
    D = _target_matrix(target)
    n = len(D)
    best = 1
    radii = {D[a][b] for a in range(n) for b in range(n) if a != b}
    for r in radii:
        for a in range(n):
            ball = [b for b in range(n) if D[a][b] <= r]
            classes: list[int] = []
            for b in ball:
                if all(D[b][c] >= r for c in classes):
                    classes.append(b)
            best = max(best, len(classes))
    return best


class RegionTooSmall(RuntimeError):
    pass


@dataclass
class MonochromaticResult:
    status: str  # "complete" | "unknown"
    color: int | None
    state: EmbeddingState | None
    residue_sizes: dict[int, int]

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "color": self.color,
            "residue_sizes": {str(c): v for c, v in self.residue_sizes.items()},
            "embedding": None if self.state is None else self.state.to_json(),
        }


def monochromatic_copy(
    chi: Callable[[QPoint], int],
    k: int,
    target,
    region: Region,
    width: int | None = None,
    budget: int = 10**6,
) -> MonochromaticResult:
    """A copy of ``target`` inside one colour class of ``chi``.

    Each class is pruned inside the region with ``width`` = the branching
    of the target (unless given); the greedy embedding then runs inside the
    largest surviving residue, falling back to smaller ones.  The copy is
    re-verified isometric and monochromatic.

    Raises:
        RegionTooSmall: if every class prunes to nothing.
    """
    width = target_branching(target) if width is None else width
    residues = {c: prune_sequence(lambda x, c=c: chi(x) == c, region, width).residue for c in range(k)}
    sizes = {c: len(v) for c, v in residues.items()}
    alive = sorted((c for c in range(k) if residues[c]), key=lambda c: (-sizes[c], c))
    if not alive:
        raise RegionTooSmall("every colour class was pruned away; enlarge the region width or depth")
    last = None
    for c in alive:
        res = residues[c]
        st = greedy_embed(res.__contains__, target, region, budget)
        if st.status == "complete":
            if any(chi(y) != c for y in st.points):
                raise AssertionError("copy is not monochromatic")
            return MonochromaticResult("complete", c, st, sizes)
        last = st
    return MonochromaticResult("unknown", None, last, sizes)


# -- ball covers ----------------------------------------------------------


class BallCoverColoring:
    """``f(x) = n`` iff ``x`` is in ``b_n``, for disjoint balls ``b_n`` with
    strictly decreasing radii that cover ``Q_S``.

    Balls are attached greedily along :func:`enumerate_qspace`: an uncovered
    point gets a ball of radius ``s_{n+1}``, below every earlier radius, so
    it cannot meet an earlier ball.  More balls are made on demand.
    """

    def __init__(self, S: DistanceSet):
        if S.is_finite or not S.well_ordered:
            raise ValueError("the cover needs an infinite S decreasing to 0")
        self.S = S
        self.balls: list[Ball] = []
        self._enum = enumerate_qspace(S)
        self.enumerated = 0

    @property
    def radii(self) -> list[Fraction]:
        return [b.radius for b in self.balls]

    def _step(self) -> None:
        x = next(self._enum)
        self.enumerated += 1
        if self.index_of(x) is None:
            self.balls.append(Ball(x, self.S[len(self.balls) + 1]))

    def extend(self, count: int) -> None:
        while len(self.balls) < count:
            self._step()

    def cover_prefix(self, count: int) -> None:
        """Process the first ``count`` enumerated points."""
        while self.enumerated < count:
            self._step()

    def index_of(self, x: QPoint) -> int | None:
        for n, b in enumerate(self.balls):
            if x in b:
                return n
        return None

    def __call__(self, x: QPoint) -> int:
        n = self.index_of(x)
        while n is None:
            self._step()
            n = self.index_of(x)
        return n

    def to_json(self) -> dict:
        return {"balls": [b.to_json() for b in self.balls], "enumerated": self.enumerated}


def build_ball_cover(S: DistanceSet, count: int) -> BallCoverColoring:
    cover = BallCoverColoring(S)
    cover.extend(count)
    return cover


@dataclass
class CoverWitnessReport:
    """``equal_pair``: two copy points with one colour (not injective);
    ``distinct_pair``: two with different colours (not constant)."""

    status: str  # "found" | "unknown"
    equal_pair: tuple[QPoint, QPoint] | None
    distinct_pair: tuple[QPoint, QPoint] | None
    equal_distance: Fraction | None
    distinct_distance: Fraction | None
    distinct_by_distance: dict[Fraction, tuple[QPoint, QPoint]]

    def to_json(self) -> dict:
        pair = lambda p: None if p is None else [p[0].to_json(), p[1].to_json()]
        return {
            "status": self.status,
            "equal_pair": pair(self.equal_pair),
            "equal_distance": None if self.equal_distance is None else str(self.equal_distance),
            "distinct_pair": pair(self.distinct_pair),
            "distinct_distance": None if self.distinct_distance is None else str(self.distinct_distance),
            "distinct_by_distance": {str(d): pair(p) for d, p in sorted(self.distinct_by_distance.items())},
        }


def check_not_constant_not_injective(
    f: Callable[[QPoint], int], copy: Embedding, samples: Sequence[QPoint]
) -> CoverWitnessReport:
    """Scan the images of ``samples`` under ``copy`` for a pair with equal
    ``f``-values and a pair with different ones.  ``distinct_by_distance``
    keeps one differently coloured pair per distance, which shows colour
    changes at small distances."""
    imgs = [copy(x) for x in samples]
    cols = [f(y) for y in imgs]
    eq = ne = None
    by_dist: dict[Fraction, tuple[QPoint, QPoint]] = {}
    for a, b in itertools.combinations(range(len(imgs)), 2):
        if imgs[a] == imgs[b]:
            continue
        if cols[a] == cols[b]:
            if eq is None:
                eq = (imgs[a], imgs[b])
        else:
            if ne is None:
                ne = (imgs[a], imgs[b])
            by_dist.setdefault(q_distance(imgs[a], imgs[b]), (imgs[a], imgs[b]))
    status = "found" if eq is not None and ne is not None else "unknown"
    return CoverWitnessReport(
        status,
        eq,
        ne,
        None if eq is None else q_distance(*eq),
        None if ne is None else q_distance(*ne),
        by_dist,
    )


# -- almost finite range ----------------------------------------------------


@dataclass
class RangeVerdict:
    """``status``: ``"almost_finite"``, ``"not_almost_finite"`` or ``"unknown"``.

    For ``almost_finite``, ``excluded`` are the radius-``r^-`` balls removed
    and ``values`` the range outside them.  For ``not_almost_finite``,
    ``values`` is the smallest outside range over every allowed exclusion,
    all larger than the bound, and ``witnesses`` realise those values.
    """

    status: str
    ball: Ball
    excluded: list[Ball]
    values: list[int]
    witnesses: list[QPoint]
    probes: int

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "ball": self.ball.to_json(),
            "excluded": [c.to_json() for c in self.excluded],
            "values": self.values,
            "witnesses": [w.to_json() for w in self.witnesses],
            "probes": self.probes,
        }


def almost_finite_range(
    f: Callable[[QPoint], int],
    b: Ball,
    Y: Callable[[QPoint], bool],
    region: Region,
    width: int = 1,
    range_bound: int = 1,
    probe_budget: int = 10**6,
) -> RangeVerdict:
    """Look for at most ``width`` children of ``b`` outside of which ``f``
    takes at most ``range_bound`` values on ``Y``, over the region points of ``b``."""
    r = b.radius
    if r == 0:
        raise ValueError("the ball needs a positive radius")
    per_child: dict[int, dict[int, QPoint]] = {}
    probes = 0
    for y in region.points_in(b):
        if probes >= probe_budget:
            return RangeVerdict("unknown", b, [], [], [], probes)
        probes += 1
        if Y(y):
            per_child.setdefault(y.get(r), {}).setdefault(f(y), y)
    children = sorted(per_child)
    cr = region.true_child_radius(r)
    best = None
    for size in range(min(width, len(children)) + 1):
        for excl in itertools.combinations(children, size):
            outside: dict[int, QPoint] = {}
            for v in children:
                if v not in excl:
                    for val, y in per_child[v].items():
                        outside.setdefault(val, y)
            if len(outside) <= range_bound:
                balls = [Ball(b.center.with_coord(r, v), cr) for v in excl]
                return RangeVerdict("almost_finite", b, balls, sorted(outside), [], probes)
            if best is None or len(outside) < len(best):
                best = outside
    best = best or {}
    return RangeVerdict(
        "not_almost_finite", b, [], sorted(best), [best[v] for v in sorted(best)], probes
    )
