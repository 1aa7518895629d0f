"""Exact distance sets, points of the ultrametric Urysohn space, finite
ultrametric spaces and balls.

Points are finitely supported maps from a distance set ``S`` to the naturals,
with ``d(x, y)`` the largest coordinate on which ``x`` and ``y`` disagree.
All distances are :class:`fractions.Fraction`; floats are rejected.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Sequence

Rational = Fraction

__all__ = [
    "Rational",
    "parse_rational",
    "format_rational",
    "DistanceSet",
    "QPoint",
    "q_distance",
    "Violation",
    "SpaceVerdict",
    "validate_space",
    "InvalidSpaceError",
    "FiniteSpace",
    "find_isometry",
    "is_isometric",
    "pred_radius",
    "NoPredecessorError",
    "Ball",
    "ball_contains",
    "child_balls",
    "enumerate_qpoints",
    "enumerate_qspace",
    "Region",
]


def parse_rational(value) -> Fraction:
    """Parse ``"p/q"``, an integer string, an int or a Fraction.

    Floats are refused so that no rounding can slip into a distance.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise ValueError(f"not an exact rational: {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise TypeError(f"cannot read a rational from {type(value).__name__}")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class NoPredecessorError(ValueError):
    pass


class DistanceSet:
    """A set ``S`` of positive rationals with a fixed enumeration.

    A finite set is given by ``values`` and stored in decreasing order.  An
    infinite set is given by a strictly monotone ``rule`` ``i -> s_i``
    (``i >= 0``), optionally preceded by finitely many ``values`` which are
    enumerated first.  A decreasing rule is the well-ordered case; an
    increasing rule needs ``sup`` (``None`` for unbounded) so that
    predecessor queries above the tail can be answered.

    The enumeration order is the coordinate order used by
    :func:`enumerate_qpoints`: the head in decreasing order, then the tail
    in generation order.
    """

    def __init__(
        self,
        values: Iterable = (),
        rule: Callable[[int], Fraction] | None = None,
        sup: Fraction | None = None,
        search_limit: int = 100_000,
    ):
        head = sorted((parse_rational(v) for v in values), reverse=True)
        if any(v <= 0 for v in head):
            raise ValueError("distances must be strictly positive")
        if len(set(head)) != len(head):
            raise ValueError("repeated distance in S")
        self._head = tuple(head)
        self._rule = rule
        self._tail: list[Fraction] = []
        self._search_limit = search_limit
        self.sup = None if sup is None else parse_rational(sup)
        self.direction = None
        if rule is not None:
            a, b = self._tail_at(0), self._tail_at(1)
            if a == b:
                raise ValueError("generator rule is not injective")
            self.direction = "decreasing" if b < a else "increasing"
            if self.direction == "decreasing" and head and head[-1] <= a:
                raise ValueError("head values must lie above a decreasing tail")

    # -- enumeration -----------------------------------------------------
    def _tail_at(self, i: int) -> Fraction:
        while len(self._tail) <= i:
            j = len(self._tail)
            v = parse_rational(self._rule(j))
            if v <= 0:
                raise ValueError(f"generated distance s_{j} = {v} is not positive")
            if self._tail:
                prev = self._tail[-1]
                if (self.direction == "decreasing" and not v < prev) or (
                    self.direction == "increasing" and not v > prev
                ):
                    raise ValueError("generator rule is not strictly monotone")
            self._tail.append(v)
        return self._tail[i]

    @property
    def is_finite(self) -> bool:
        return self._rule is None

    @property
    def well_ordered(self) -> bool:
        """Whether ``(S, >)`` is a well-order."""
        return self._rule is None or self.direction == "decreasing"

    def __len__(self) -> int:
        if self._rule is not None:
            raise TypeError("infinite distance set has no length")
        return len(self._head)

    def __getitem__(self, i: int) -> Fraction:
        if i < 0:
            raise IndexError(i)
        if i < len(self._head):
            return self._head[i]
        if self._rule is None:
            raise IndexError(i)
        return self._tail_at(i - len(self._head))

    def __iter__(self) -> Iterator[Fraction]:
        for i in itertools.count():
            try:
                yield self[i]
            except IndexError:
                return

    def window(self, depth: int) -> tuple[Fraction, ...]:
        """The first ``depth`` values of the enumeration."""
        if self._rule is None and depth > len(self._head):
            raise ValueError(f"depth {depth} exceeds |S| = {len(self._head)}")
        return tuple(self[i] for i in range(depth))

    @property
    def values(self) -> tuple[Fraction, ...]:
        if self._rule is not None:
            raise TypeError("infinite distance set; use window()")
        return self._head

    def __contains__(self, s) -> bool:
        try:
            s = parse_rational(s)
        except (TypeError, ValueError):
            return False
        if s in self._head:
            return True
        if self._rule is None:
            return False
        if self.direction == "increasing" and self.sup is not None and s >= self.sup:
            return False
        for i in range(self._search_limit):
            t = self._tail_at(i)
            if t == s:
                return True
            if (self.direction == "decreasing" and t < s) or (
                self.direction == "increasing" and t > s
            ):
                return False
        raise RuntimeError(f"membership of {s} undecided after {self._search_limit} values")

    def index(self, s) -> int:
        s = parse_rational(s)
        if s not in self:
            raise ValueError(f"{s} is not in S")
        for i in itertools.count():
            if self[i] == s:
                return i
        raise AssertionError  # unreachable

    def max(self) -> Fraction:
        if self._rule is None or self.direction == "decreasing":
            return self[0]
        raise ValueError("S has no maximum")

    def pred(self, s) -> Fraction:
        """``max {t in S : t < s}``; see :func:`pred_radius`."""
        s = parse_rational(s)
        if s not in self:
            raise ValueError(f"{s} is not in S")
        below = [t for t in self._head if t < s]
        best = max(below) if below else None
        if self._rule is not None:
            if self.direction == "decreasing":
                for i in itertools.count():
                    t = self._tail_at(i)
                    if t < s:
                        best = t if best is None else max(best, t)
                        break
            else:
                first = self._tail_at(0)
                if first < s:
                    if self.sup is not None and s >= self.sup:
                        raise NoPredecessorError(f"{s} has no predecessor: S is not well-ordered below it")
                    prev = first
                    for i in itertools.count(1):
                        if i > self._search_limit:
                            raise RuntimeError("predecessor search limit reached")
                        t = self._tail_at(i)
                        if t >= s:
                            break
                        prev = t
                    best = prev if best is None else max(best, prev)
        if best is None:
            raise NoPredecessorError(f"{s} is the minimum of S and has no predecessor")
        return best

    def is_subset_of(self, other: "DistanceSet") -> bool:
        if not self.is_finite:
            raise TypeError("subset test needs a finite set on the left")
        return all(s in other for s in self._head)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DistanceSet):
            return NotImplemented
        if self.is_finite and other.is_finite:
            return self._head == other._head
        return self is other

    def __hash__(self) -> int:
        return hash(self._head) if self.is_finite else id(self)

    def __repr__(self) -> str:
        shown = ", ".join(format_rational(v) for v in self._head)
        if self._rule is None:
            return f"DistanceSet([{shown}])"
        tail = ", ".join(format_rational(self._tail_at(i)) for i in range(3))
        return f"DistanceSet([{shown}] + [{tail}, ...])"

    def to_json(self) -> list[str]:
        return [format_rational(v) for v in self.values]


class QPoint:
    """A finitely supported map ``S -> N``; only nonzero entries are stored."""

    __slots__ = ("_d", "_key")

    def __init__(self, support: Mapping | None = None):
        d = {}
        for s, v in (support or {}).items():
            s = parse_rational(s)
            if s <= 0:
                raise ValueError("coordinates are positive distances")
            v = int(v)
            if v < 0:
                raise ValueError("coordinate values are natural numbers")
            if v:
                d[s] = v
        self._d = d
        self._key = tuple(sorted(d.items(), reverse=True))

    @property
    def support(self) -> dict[Fraction, int]:
        return dict(self._d)

    def __getitem__(self, s) -> int:
        return self._d.get(parse_rational(s), 0)

    def get(self, s: Fraction) -> int:
        return self._d.get(s, 0)

    def with_coord(self, s, value: int) -> "QPoint":
        d = dict(self._d)
        d[parse_rational(s)] = value
        return QPoint(d)

    def restrict(self, keep: Callable[[Fraction], bool]) -> "QPoint":
        return QPoint({s: v for s, v in self._d.items() if keep(s)})

    def __eq__(self, other) -> bool:
        return isinstance(other, QPoint) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __lt__(self, other: "QPoint") -> bool:
        return self._key < other._key

    def __repr__(self) -> str:
        inner = ", ".join(f"{format_rational(s)}: {v}" for s, v in self._key)
        return "QPoint({" + inner + "})"

    def check_in(self, S: DistanceSet) -> None:
        for s in self._d:
            if s not in S:
                raise ValueError(f"coordinate {format_rational(s)} is not in S")

    def to_json(self) -> dict:
        return {"support": {format_rational(s): v for s, v in self._key}}

    @classmethod
    def from_json(cls, obj) -> "QPoint":
        if not isinstance(obj, dict) or "support" not in obj:
            raise ValueError('a point is an object {"support": {...}}')
        return cls(obj["support"])


def q_distance(x: QPoint, y: QPoint) -> Fraction:
    """Largest coordinate where ``x`` and ``y`` differ, or 0 when equal."""
    best = 0
    xd, yd = x._d, y._d
    for s, v in xd.items():
        if s > best and yd.get(s, 0) != v:
            best = s
    for s in yd:
        if s > best and s not in xd:
            best = s
    return Fraction(best)


@dataclass(frozen=True)
class Violation:
    kind: str  # "shape" | "symmetry" | "diagonal" | "positivity" | "membership" | "ultrametric"
    indices: tuple[int, ...]
    detail: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "indices": list(self.indices), "detail": self.detail}


@dataclass(frozen=True)
class SpaceVerdict:
    valid: bool
    violations: tuple[Violation, ...] = ()

    def __bool__(self) -> bool:
        return self.valid


def validate_space(m: Sequence[Sequence], S: DistanceSet, labels: Sequence | None = None) -> SpaceVerdict:
    """Check that ``m`` is the distance matrix of a member of ``U_S``.

    Every violated property is listed.  An ultrametric violation is
    reported as ``(i, j, k)`` with ``d(i, k) > max(d(i, j), d(j, k))``.

    Raises:
        ValueError: if ``m`` is not square.
    """
    n = len(m)
    if any(len(row) != n for row in m):
        raise ValueError("distance matrix is not square")
    name = (lambda i: str(labels[i])) if labels is not None else str
    m = [[parse_rational(v) for v in row] for row in m]
    out: list[Violation] = []
    for i in range(n):
        if m[i][i] != 0:
            out.append(Violation("diagonal", (i,), f"d({name(i)},{name(i)}) = {m[i][i]} != 0"))
        for j in range(i + 1, n):
            a, b = m[i][j], m[j][i]
            if a != b:
                out.append(Violation("symmetry", (i, j), f"d({name(i)},{name(j)}) = {a} but d({name(j)},{name(i)}) = {b}"))
            if a <= 0:
                out.append(Violation("positivity", (i, j), f"d({name(i)},{name(j)}) = {a} is not positive"))
            elif a not in S:
                out.append(Violation("membership", (i, j), f"d({name(i)},{name(j)}) = {a} is not in S"))
    for i, k in itertools.combinations(range(n), 2):
        for j in range(n):
            if j in (i, k):
                continue
            if m[i][k] > max(m[i][j], m[j][k]):
                out.append(
                    Violation(
                        "ultrametric",
                        (i, j, k),
                        f"d({name(i)},{name(k)}) = {m[i][k]} > max(d({name(i)},{name(j)}), d({name(j)},{name(k)}))",
                    )
                )
    return SpaceVerdict(not out, tuple(out))


class InvalidSpaceError(ValueError):
    def __init__(self, verdict: SpaceVerdict):
        self.verdict = verdict
        lines = "; ".join(v.detail for v in verdict.violations[:5])
        more = len(verdict.violations) - 5
        super().__init__(f"invalid ultrametric space: {lines}" + (f" (+{more} more)" if more > 0 else ""))


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    """A finite ultrametric space with distances in ``S``, validated on creation."""

    labels: tuple
    matrix: tuple[tuple[Fraction, ...], ...]
    S: DistanceSet = field(repr=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        matrix = tuple(tuple(parse_rational(v) for v in row) for row in self.matrix)
        if len(labels) != len(matrix):
            raise ValueError("one label per point is required")
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be distinct")
        verdict = validate_space(matrix, self.S, labels)
        if not verdict:
            raise InvalidSpaceError(verdict)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def from_points(cls, points: Sequence[QPoint], S: DistanceSet, labels: Sequence | None = None) -> "FiniteSpace":
        if labels is None:
            labels = [f"p{i}" for i in range(len(points))]
        m = [[q_distance(a, b) for b in points] for a in points]
        return cls(tuple(labels), tuple(map(tuple, m)), S)

    @classmethod
    def equilateral(cls, n: int, s, S: DistanceSet) -> "FiniteSpace":
        s = parse_rational(s)
        m = [[Fraction(0) if i == j else s for j in range(n)] for i in range(n)]
        return cls(tuple(f"p{i}" for i in range(n)), tuple(map(tuple, m)), S)

    def __len__(self) -> int:
        return len(self.labels)

    def d(self, i: int, j: int) -> Fraction:
        return self.matrix[i][j]

    def distances(self) -> set[Fraction]:
        n = len(self)
        return {self.matrix[i][j] for i in range(n) for j in range(i + 1, n)}

    def subspace(self, indices: Sequence[int]) -> "FiniteSpace":
        idx = list(indices)
        return FiniteSpace(
            tuple(self.labels[i] for i in idx),
            tuple(tuple(self.matrix[i][j] for j in idx) for i in idx),
            self.S,
        )

    def over(self, S: DistanceSet) -> "FiniteSpace":
        """The same labelled matrix regarded as a member of ``U_S``."""
        return FiniteSpace(self.labels, self.matrix, S)

    def to_json(self) -> dict:
        return {
            "S": self.S.to_json(),
            "labels": list(self.labels),
            "matrix": [[format_rational(v) for v in row] for row in self.matrix],
        }


def find_isometry(A: FiniteSpace, B: FiniteSpace) -> tuple[int, ...] | None:
    """A bijection ``p`` with ``B.d(p[i], p[j]) == A.d(i, j)``, by backtracking."""
    n = len(A)
    if n != len(B):
        return None
    a, b = A.matrix, B.matrix
    if sorted(sorted(r) for r in a) != sorted(sorted(r) for r in b):
        return None
    image: list[int] = []
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        for c in range(n):
            if used[c] or any(b[c][image[j]] != a[i][j] for j in range(i)):
                continue
            used[c] = True
            image.append(c)
            if extend(i + 1):
                return True
            image.pop()
            used[c] = False
        return False

    return tuple(image) if extend(0) else None


def is_isometric(A: FiniteSpace, B: FiniteSpace) -> bool:
    return find_isometry(A, B) is not None


def pred_radius(s, S: DistanceSet) -> Fraction:
    """``max {t in S : t < s}``.

    Raises:
        NoPredecessorError: if ``s`` is the minimum of ``S`` or ``S`` is not
            well-ordered below ``s``.
    """
    return S.pred(s)


def _pred_or_zero(s: Fraction, S: DistanceSet) -> Fraction:
    try:
        return S.pred(s)
    except NoPredecessorError:
        return Fraction(0)


class Ball:
    """Closed ball ``{y : d(center, y) <= radius}`` with ``radius`` in ``S + {0}``.

    The stored center is canonical: coordinates at or below the radius are
    cleared, which picks the lexicographically least element.  Two balls are
    equal iff they have the same radius and canonical center.
    """

    __slots__ = ("center", "radius")

    def __init__(self, center: QPoint, radius):
        radius = parse_rational(radius)
        if radius < 0:
            raise ValueError("negative radius")
        self.radius = radius
        self.center = center.restrict(lambda s: s > radius) if radius > 0 else center

    def __contains__(self, y: QPoint) -> bool:
        return q_distance(self.center, y) <= self.radius

    def __eq__(self, other) -> bool:
        return isinstance(other, Ball) and self.radius == other.radius and self.center == other.center

    def __hash__(self) -> int:
        return hash((self.center, self.radius))

    def __repr__(self) -> str:
        return f"Ball({self.center!r}, {format_rational(self.radius)})"

    def contains_ball(self, other: "Ball") -> bool:
        return other.radius <= self.radius and other.center in self

    def disjoint(self, other: "Ball") -> bool:
        # In an ultrametric space two balls are nested or disjoint.
        return not (self.contains_ball(other) or other.contains_ball(self))

    def to_json(self) -> dict:
        return {"center": self.center.to_json(), "radius": format_rational(self.radius)}


def ball_contains(b: Ball, y: QPoint) -> bool:
    return y in b


def child_balls(b: Ball, S: DistanceSet, width: int, singletons: bool = False) -> list[Ball]:
    """The sub-balls of radius ``b.radius^-`` got by setting the coordinate at
    ``b.radius`` to ``0 .. width-1``.

    When ``b.radius`` is the minimum of a finite ``S`` the children are the
    radius-0 singletons, but only if ``singletons=True``.
    """
    if width <= 0:
        return []
    r = b.radius
    if r == 0:
        raise ValueError("a radius-0 ball has no children")
    try:
        child_r = S.pred(r)
    except NoPredecessorError:
        if not singletons:
            raise
        child_r = Fraction(0)
    return [Ball(b.center.with_coord(r, v), child_r) for v in range(width)]


def enumerate_qpoints(S: DistanceSet, depth: int, width: int) -> list[QPoint]:
    """All points supported on the first ``depth`` values of ``S`` with
    entries below ``width``, in lexicographic order (first coordinate most
    significant); ``width ** depth`` points."""
    coords = S.window(depth)
    return [QPoint(dict(zip(coords, vals))) for vals in itertools.product(range(width), repeat=depth)]


def enumerate_qspace(S: DistanceSet) -> Iterator[QPoint]:
    """An enumeration of the whole of ``Q_S``.

    Stage ``m`` lists, in lexicographic order, the points of the
    ``m``-coordinate window with entries below ``m`` that no earlier stage
    listed.  For finite ``S`` the depth is capped at ``|S|``.
    """
    yield QPoint()
    cap = len(S) if S.is_finite else None
    if cap == 0:
        return
    prev_depth, prev_width = 0, 1
    for m in itertools.count(2):
        depth = m if cap is None else min(m, cap)
        coords = S.window(depth)
        for vals in itertools.product(range(m), repeat=depth):
            old = all(v < prev_width for v in vals) and all(v == 0 for v in vals[prev_depth:])
            if not old:
                yield QPoint(dict(zip(coords, vals)))
        prev_depth, prev_width = depth, m


class Region:
    """A finite window of ``Q_S``: the ``width ** depth`` points of
    :func:`enumerate_qpoints` together with the balls of its ball tree.

    The window coordinates must be the top values of ``S`` in decreasing
    order, so that a radius-``c_i`` ball splits into ``width`` children of
    radius ``c_{i+1}`` (radius 0 below the last coordinate).
    """

    def __init__(self, S: DistanceSet, depth: int, width: int):
        self.S = S
        self.depth = depth
        self.width = width
        self.coords = S.window(depth)
        if any(a <= b for a, b in zip(self.coords, self.coords[1:])):
            raise ValueError("region coordinates must be decreasing")
        self._points: list[QPoint] | None = None

    def points(self) -> list[QPoint]:
        if self._points is None:
            self._points = enumerate_qpoints(self.S, self.depth, self.width)
        return self._points

    def __len__(self) -> int:
        return self.width**self.depth

    def __contains__(self, x: QPoint) -> bool:
        sup = x.support
        coords = set(self.coords)
        return all(s in coords and v < self.width for s, v in sup.items())

    def radii(self) -> tuple[Fraction, ...]:
        return self.coords + (Fraction(0),)

    def child_radius(self, r: Fraction) -> Fraction:
        i = self.coords.index(r)
        return self.coords[i + 1] if i + 1 < self.depth else Fraction(0)

    def true_child_radius(self, r: Fraction) -> Fraction:
        """``r^-`` in ``S`` itself (0 at the minimum of a finite ``S``)."""
        return _pred_or_zero(r, self.S)

    def root(self) -> Ball:
        if not self.depth:
            return Ball(QPoint(), 0)
        return Ball(QPoint(), self.coords[0])

    def children(self, b: Ball) -> list[Ball]:
        if b.radius == 0:
            return []
        r = b.radius
        cr = self.child_radius(r)
        return [Ball(b.center.with_coord(r, v), cr) for v in range(self.width)]

    def balls(self) -> list[Ball]:
        """Every region ball, top-down and level by level."""
        out, level = [], [self.root()]
        while level:
            out.extend(level)
            level = [c for b in level for c in self.children(b)]
        return out

    def points_in(self, b: Ball) -> list[QPoint]:
        """Region points of ``b``, in lexicographic order."""
        r = b.radius
        if r == 0:
            return [b.center] if b.center in self else []
        if r not in self.coords:
            raise ValueError(f"radius {r} is not a region coordinate")
        if b.center not in self:
            return []
        i = self.coords.index(r)
        lower = self.coords[i:]
        base = b.center.support
        out = []
        for vals in itertools.product(range(self.width), repeat=len(lower)):
            d = dict(base)
            d.update(zip(lower, vals))
            out.append(QPoint(d))
        return out
