"""Command-line front end.  Every verb prints one JSON report::

    {"command": ..., "result": ..., "witness": ..., "verification": ..., "timing": ...}

Exit status: 0 verified success, 1 invalid input, 2 unknown (budget spent
or verification not passed).
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import core, divlab, partition, treecodec
from .core import DistanceSet, FiniteSpace, QPoint, format_rational, q_distance

EXIT_OK, EXIT_INVALID, EXIT_UNKNOWN = 0, 1, 2


class InputError(Exception):
    """Bad input; the message names the file and the position."""

    def __init__(self, message: str, details: list | None = None):
        super().__init__(message)
        self.details = details or []


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


# -- file formats -----------------------------------------------------------


def _load_json(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _rational(value, where: str) -> Fraction:
    try:
        return core.parse_rational(value)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_values(text: str, where: str = "--values") -> DistanceSet:
    """A comma-separated list of rationals."""
    items = [t for t in text.split(",") if t.strip()]
    try:
        return DistanceSet([_rational(t, f"{where}[{i}]") for i, t in enumerate(items)])
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from None


def _space_parts(path):
    obj = _load_json(path)
    if not isinstance(obj, dict):
        raise InputError(f"{path}: $: expected an object with keys S and matrix")
    for key in ("S", "matrix"):
        if key not in obj:
            raise InputError(f"{path}: $: missing key {key!r}")
    if not isinstance(obj["S"], list):
        raise InputError(f"{path}: $.S: expected an array")
    try:
        S = DistanceSet([_rational(v, f"{path}: $.S[{i}]") for i, v in enumerate(obj["S"])])
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"{path}: $.S: {exc}") from None
    m = obj["matrix"]
    if not isinstance(m, list):
        raise InputError(f"{path}: $.matrix: expected an array")
    rows = []
    for i, row in enumerate(m):
        if not isinstance(row, list):
            raise InputError(f"{path}: $.matrix[{i}]: expected an array")
        if len(row) != len(m):
            raise InputError(f"{path}: $.matrix[{i}]: row has {len(row)} entries, expected {len(m)}")
        rows.append([_rational(v, f"{path}: $.matrix[{i}][{j}]") for j, v in enumerate(row)])
    labels = obj.get("labels")
    if labels is None:
        labels = [f"x{i}" for i in range(len(rows))]
    if not isinstance(labels, list) or len(labels) != len(rows):
        raise InputError(f"{path}: $.labels: expected {len(rows)} labels")
    if len(set(map(str, labels))) != len(labels):
        raise InputError(f"{path}: $.labels: labels must be distinct")
    return S, labels, rows


def parse_space(path) -> FiniteSpace:
    """Load and validate a space file; violations are listed with their triples."""
    S, labels, rows = _space_parts(path)
    verdict = core.validate_space(rows, S, labels)
    if not verdict:
        raise InputError(
            f"{path}: not an ultrametric space over S: " + "; ".join(v.detail for v in verdict.violations[:3]),
            [v.to_json() for v in verdict.violations],
        )
    return FiniteSpace(tuple(labels), tuple(map(tuple, rows)), S)


def parse_tree(path) -> treecodec.RootedTree:
    """Load a nested-array tree file."""
    obj = _load_json(path)

    def check(node, where):
        if not isinstance(node, list):
            raise InputError(f"{path}: {where}: expected an array, got {type(node).__name__}")
        for i, c in enumerate(node):
            check(c, f"{where}[{i}]")

    check(obj, "$")
    return treecodec.RootedTree.from_nested(obj)


def parse_coloring_table(path) -> divlab.OracleColoring:
    """``{"k": 3, "default": 0, "entries": [{"point": {"support": {...}}, "color": 1}, ...]}``."""
    obj = _load_json(path)
    if not isinstance(obj, dict) or "k" not in obj or "entries" not in obj:
        raise InputError(f"{path}: $: expected an object with keys k and entries")
    k, default = obj["k"], obj.get("default", 0)
    if not isinstance(k, int) or k < 1:
        raise InputError(f"{path}: $.k: expected a positive integer")
    if not isinstance(default, int) or not 0 <= default < k:
        raise InputError(f"{path}: $.default: expected a colour below k")
    entries = {}
    for i, e in enumerate(obj["entries"]):
        where = f"{path}: $.entries[{i}]"
        if not isinstance(e, dict) or "point" not in e or "color" not in e:
            raise InputError(f"{where}: expected an object with keys point and color")
        try:
            p = QPoint.from_json(e["point"])
        except (TypeError, ValueError, KeyError, AttributeError) as exc:
            raise InputError(f"{where}.point: {exc}") from None
        c = e["color"]
        if not isinstance(c, int) or not 0 <= c < k:
            raise InputError(f"{where}.color: expected an integer in 0..{k - 1}")
        entries[p] = c
    return divlab.OracleColoring.table(entries, k, default)


# -- verbs ------------------------------------------------------------------
# Each returns (result, witness, verification, status) where status is
# "ok" or "unknown".


def _check(ok: bool, method: str, **extra) -> dict:
    return {"ok": bool(ok), "method": method, **extra}


def _clean_tree_check(T) -> dict:
    n = T.size
    count = treecodec.count_linear_extensions(T)
    aut = treecodec.count_automorphisms(T)
    if n <= 9:
        brute = treecodec.brute_force_extensions(T)
        isos = sum(1 for _ in treecodec.tree_isomorphisms(T, T))
        return _check(brute == count and isos == aut, "permutation enumeration", nodes=n)
    return _check(count % aut == 0, "divisibility only (tree too large to enumerate)", nodes=n)


def cmd_validate(a):
    S, labels, rows = _space_parts(a.space)
    verdict = core.validate_space(rows, S, labels)
    result = {"valid": verdict.valid, "points": len(rows), "violations": [v.to_json() for v in verdict.violations]}
    if not verdict:
        return result, None, _check(True, "triple scan"), "invalid"
    X = FiniteSpace(tuple(labels), tuple(map(tuple, rows)), S)
    back = treecodec.space_of_leaves(treecodec.tree_of_space(X), S)
    return result, None, _check(core.is_isometric(X, back), "tree round trip"), "ok"


def cmd_tree(a):
    X = parse_space(a.space)
    T = treecodec.tree_of_space(X)
    back = treecodec.space_of_leaves(T, X.S)
    result = {"tree": T.to_nested(), "nodes": T.size, "leaf_labels": [t.label for t in T.leaf_nodes()]}
    return result, None, _check(core.is_isometric(X, back), "leaf space isometric to input"), "ok"


def cmd_space(a):
    T = parse_tree(a.tree)
    S = parse_values(a.values)
    try:
        X = treecodec.space_of_leaves(T, S)
    except ValueError as exc:
        raise InputError(f"{a.tree}: {exc}") from None
    U = treecodec.tree_of_space(X)
    return X.to_json(), None, _check(treecodec.is_isomorphic(U, T.unlabeled()), "tree of result isomorphic to input"), "ok"


def cmd_degree(a):
    X = parse_space(a.space)
    rep = treecodec.big_ramsey_degree(X)
    return rep.to_json(), None, _clean_tree_check(rep.tree), "ok"


def cmd_extensions(a):
    T = parse_tree(a.tree)
    result = {"extension_count": str(treecodec.count_linear_extensions(T)), "nodes": T.size}
    return result, None, _clean_tree_check(T), "ok"


def cmd_auts(a):
    T = parse_tree(a.tree)
    result = {"automorphisms": str(treecodec.count_automorphisms(T)), "nodes": T.size}
    return result, None, _clean_tree_check(T), "ok"


def cmd_copies(a):
    Z, X = parse_space(a.z), parse_space(a.x)
    cps = partition.enumerate_copies(Z, X)
    ok = all(Z.d(c.bijection[i], c.bijection[j]) == X.d(i, j) for c in cps for i in range(len(X)) for j in range(len(X)))
    ok = ok and len({c.points for c in cps}) == len(cps)
    result = {"count": len(cps)}
    return result, {"copies": [c.to_json(Z) for c in cps]}, _check(ok, "pairwise distances recomputed"), "ok"


def cmd_arrow(a):
    Z, Y, X = parse_space(a.z), parse_space(a.y), parse_space(a.x)
    if a.colors < 1 or a.values < 1:
        raise InputError("--colors and --values must be positive")
    v = partition.check_arrow(Z, Y, X, a.colors, a.values, budget=a.budget)
    out = v.to_json(Z)
    witness = out.pop("witness", None)
    if v.status == "fails":
        cont = partition._containment(v.x_copies, v.y_copies)
        ok = partition.counterexample_is_valid(v.counterexample, v.x_copies, v.y_copies, a.values)
        ver = _check(ok, "every copy of Y sees more than l colours", y_copies=len(cont))
    elif v.status == "holds" and a.colors ** len(v.x_copies) <= 2 * 10**5:
        ver = _check(partition.exhaustive_arrow(Z, Y, X, a.colors, a.values), "exhaustive colouring enumeration")
    elif v.status == "holds":
        ver = _check(True, "search completed; instance too large to re-enumerate", rechecked=False)
    else:
        return out, witness, _check(False, "budget exhausted"), "unknown"
    return out, witness, ver, "ok"


def _ladder(name: str):
    if name == "converging":
        return divlab.Ladder(lambda i: 1 - Fraction(1, 2**i), sup=1), DistanceSet(rule=lambda j: 1 - Fraction(1, 2 ** (j + 1)), sup=1)
    return divlab.Ladder(lambda i: Fraction(i)), DistanceSet(rule=lambda j: Fraction(j + 1))


def cmd_divide_demo(a):
    L, S = _ladder(a.ladder)
    classes = divlab.ModClasses(a.classes) if a.classes > 0 else divlab.PairingClasses()
    J = a.classes if a.classes > 0 else 4
    C = divlab.sphere_coloring(S, L, classes, a.region_depth, a.region_width)
    pts = core.enumerate_qpoints(S, a.region_depth, a.region_width)[: a.probes]
    copy = divlab.Embedding.identity()
    table, witnesses, ok = [], [], True
    for y in pts:
        e, i = divlab.locate(y, C)
        col = classes.class_of(i)
        d = q_distance(e, y)
        ok &= L[i] <= d < L[i + 1]
        table.append({"point": y.to_json(), "net_point": e.to_json(), "shell": i, "color": col})
        row = []
        for j in range(J):
            w = divlab.range_witness(copy, y, j, C)
            e2, i2 = divlab.locate(w, C)
            ok &= classes.class_of(i2) == j and q_distance(e2, w) == q_distance(y, w)
            row.append({"color": j, "point": w.to_json(), "distance": format_rational(q_distance(y, w))})
        witnesses.append({"from": y.to_json(), "witnesses": row})
    result = {
        "ladder": a.ladder,
        "sup": None if L.sup is None else format_rational(L.sup),
        "classes": J if a.classes > 0 else "cantor-pairing",
        "net_size": len(C.net),
        "table": table,
    }
    return result, {"range": witnesses}, _check(ok, "shells and witness colours recomputed"), "ok"


def _builtin_coloring(a, S):
    if a.rule == "table":
        if not a.table:
            raise InputError("--rule table needs --table FILE")
        return parse_coloring_table(a.table)
    if a.rule == "constant":
        return divlab.OracleColoring.constant(max(a.colors, 1))
    s = _rational(a.coordinate, "--coordinate") if a.coordinate else S.values[0]
    if s not in S:
        raise InputError(f"--coordinate: {s} is not in S")
    return divlab.OracleColoring.coordinate_mod(s, a.colors)


def _target(a, S, side: int):
    if a.target:
        X = parse_space(a.target)
        if not all(d in S for d in X.distances()):
            raise InputError(f"{a.target}: target distances must lie in S")
        return X
    return FiniteSpace.from_points(core.enumerate_qpoints(S, len(S), side), S)


def _region(a, S, default_width: int):
    depth = a.region_depth if a.region_depth is not None else len(S)
    width = a.region_width if a.region_width is not None else default_width
    try:
        return core.Region(S, depth, width)
    except ValueError as exc:
        raise InputError(f"--region-depth: {exc}") from None


def _isometric_to(points, X) -> bool:
    n = len(X)
    return len(points) == n and all(q_distance(points[i], points[j]) == X.d(i, j) for i in range(n) for j in range(n))


def cmd_embed_mono(a):
    S = parse_values(a.values)
    chi = _builtin_coloring(a, S)
    X = _target(a, S, 2)
    R = _region(a, S, 4)
    try:
        res = divlab.monochromatic_copy(chi, chi.k, X, R, width=a.width, budget=a.budget)
    except divlab.RegionTooSmall as exc:
        return {"status": "unknown", "reason": str(exc)}, None, _check(False, "no surviving class"), "unknown"
    out = res.to_json()
    emb = out.pop("embedding")
    if res.status != "complete":
        return out, emb, _check(False, "greedy embedding did not finish"), "unknown"
    pts = res.state.points
    ok = _isometric_to(pts, X) and len({chi(p) for p in pts}) == 1
    return out, emb, _check(ok, "distances and colours recomputed"), "ok"


def cmd_cover(a):
    S = DistanceSet(rule=lambda j: Fraction(1, 2**j))
    cov = divlab.build_ball_cover(S, a.count)
    sample = list(itertools.islice(core.enumerate_qspace(S), a.probes))
    covered = all(cov(x) is not None for x in sample)
    hits = [[n for n, b in enumerate(cov.balls) if x in b] for x in sample]
    radii = cov.radii
    ok = (
        all(len(h) == 1 for h in hits)
        and all(r1 > r2 for r1, r2 in zip(radii, radii[1:]))
        and all(b1.disjoint(b2) for b1, b2 in itertools.combinations(cov.balls, 2))
    )
    result = {
        "balls": len(cov.balls),
        "radii": [format_rational(r) for r in radii],
        "probed_points": len(sample),
        "covered": covered,
    }
    return result, cov.to_json(), _check(ok, "each probed point lies in exactly one ball"), "ok"


def cmd_inject(a):
    S = parse_values(a.values)
    if a.rule == "constant":
        f = divlab.OracleColoring.constant(1)
    else:
        s = _rational(a.coordinate, "--coordinate") if a.coordinate else S.values[-1]
        if s not in S:
            raise InputError(f"--coordinate: {s} is not in S")
        f = lambda x, s=s: x.get(s)
    X = _target(a, S, 2)
    R = _region(a, S, 9)
    st = divlab.injective_copy(f, lambda x: True, X, R, budget=a.budget)
    out = {"status": st.status, "values": [f(p) for p in st.points]}
    if st.status == "complete":
        pts = st.points
        ok = _isometric_to(pts, X) and len({f(p) for p in pts}) == len(pts)
        return out, st.to_json(), _check(ok, "distances and injectivity recomputed"), "ok"
    if st.status == "unknown":
        return out, st.to_json(), _check(False, "budget exhausted"), "unknown"
    blk = st.blocked
    rest = [y for y in R.points_in(blk.ball) if not any(y in c for c in blk.covering)]
    if blk.kind == "small":
        ok = not rest
    else:
        ok = {f(y) for y in rest} <= set(blk.values)
    afr = divlab.almost_finite_range(f, blk.ball, lambda x: True, R, width=len(blk.covering), range_bound=len(blk.values))
    out["almost_finite_range"] = afr.to_json()
    return out, st.to_json(), _check(ok, "certificate recomputed over the blocking ball"), "ok"


def cmd_monotonic(a):
    X = parse_space(a.space)
    chain = [parse_values(t, f"--chain[{i}]") for i, t in enumerate(a.chain)]
    try:
        rep = treecodec.degree_monotonicity_report(X, *chain)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    ok = True
    for S, c in zip(chain, rep.extension_counts):
        T = treecodec.tree_of_space(X.over(S))
        if T.size <= 9:
            ok &= treecodec.brute_force_extensions(T) == c
    ok &= rep.strictly_increasing == all(x < y for x, y in zip(rep.extension_counts, rep.extension_counts[1:]))
    return rep.to_json(), None, _check(ok, "extension counts re-enumerated where small"), "ok"


# -- dispatch -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ultraramsey", description="Ramsey computations on ultrametric spaces Q_S.")
    p.add_argument("--pretty", action="store_true", help="indent the JSON report")
    p.add_argument("--output", help="write the report here instead of standard output")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def verb(name, func, *files, help=None):
        sp = sub.add_parser(name, help=help)
        for f in files:
            sp.add_argument(f)
        sp.set_defaults(func=func)
        return sp

    verb("validate", cmd_validate, "space", help="check a space file")
    verb("tree", cmd_tree, "space", help="tree encoding of a space")
    sp = verb("space", cmd_space, "tree", help="space of the leaves of a tree")
    sp.add_argument("--values", required=True, help="S as comma-separated rationals")
    verb("degree", cmd_degree, "space", help="big Ramsey degree candidates")
    verb("extensions", cmd_extensions, "tree", help="number of linear extensions")
    verb("auts", cmd_auts, "tree", help="number of automorphisms")
    verb("copies", cmd_copies, "z", "x", help="copies of X inside Z")
    sp = verb("arrow", cmd_arrow, "z", "y", "x", help="decide Z -> (Y)^X_{k,l}")
    sp.add_argument("--colors", type=int, default=2)
    sp.add_argument("--values", type=int, default=1)
    sp.add_argument("--budget", type=int, default=10**7)

    sp = verb("divide-demo", cmd_divide_demo, help="sphere colouring table with range witnesses")
    sp.add_argument("--ladder", choices=["converging", "unbounded"], default="converging")
    sp.add_argument("--classes", type=int, default=4, help="J classes i mod J; 0 for infinitely many")
    sp.add_argument("--region-depth", type=int, default=3)
    sp.add_argument("--region-width", type=int, default=2)
    sp.add_argument("--probes", type=int, default=64, help="table rows")

    def mono_flags(sp, values, rules, colors):
        sp.add_argument("--values", default=values, help="finite S")
        sp.add_argument("--rule", choices=rules, default=rules[0])
        sp.add_argument("--coordinate", help="coordinate s read by the rule")
        sp.add_argument("--colors", type=int, default=colors)
        sp.add_argument("--target", help="space file to embed (default: binary window)")
        sp.add_argument("--region-depth", type=int)
        sp.add_argument("--region-width", type=int)
        sp.add_argument("--budget", type=int, default=10**6)

    sp = verb("embed-mono", cmd_embed_mono, help="monochromatic copy for a well-ordered S")
    mono_flags(sp, "1,1/2,1/4", ["coordinate-mod", "constant", "table"], 2)
    sp.add_argument("--table", help="colouring table file")
    sp.add_argument("--width", type=int, help="smallness threshold (default: target branching)")

    sp = verb("cover", cmd_cover, help="disjoint ball cover with radii 2^-n")
    sp.add_argument("--count", type=int, default=20)
    sp.add_argument("--probes", type=int, default=1000, help="enumerated points checked for coverage")

    sp = verb("inject", cmd_inject, help="greedy copy on which a map is injective")
    mono_flags(sp, "1,1/2", ["coordinate", "constant"], 1)

    sp = verb("monotonic", cmd_monotonic, "space", help="degrees along a chain of distance sets")
    sp.add_argument("--chain", nargs="+", required=True, help="distance sets, each comma-separated")
    return p


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    started = time.perf_counter()
    parser = build_parser()
    pretty = "--pretty" in argv
    output = None
    try:
        a = parser.parse_args(argv)
        pretty, output = a.pretty, a.output
        result, witness, verification, status = a.func(a)
        if status == "invalid":
            code = EXIT_INVALID
        elif status == "unknown" or not verification.get("ok"):
            code = EXIT_UNKNOWN
        else:
            code = EXIT_OK
        args = {k: v for k, v in vars(a).items() if k not in ("func", "pretty", "output", "verb")}
        report = {
            "command": {"verb": a.verb, "args": args},
            "result": result,
            "witness": witness,
            "verification": verification,
            "timing": {"seconds": round(time.perf_counter() - started, 6)},
        }
    except InputError as exc:
        code = EXIT_INVALID
        report = {
            "command": {"argv": argv},
            "error": {"message": str(exc), "details": exc.details},
            "timing": {"seconds": round(time.perf_counter() - started, 6)},
        }
    text = json.dumps(report, indent=2 if pretty else None, default=str)
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text, file=stdout)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
