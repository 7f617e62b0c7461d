"""Command line interface.

Exit codes: 0 on success, 1 on invalid input, 2 when a computed result
violates an invariant (for example a nonzero Riemann-Roch residual).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from troprank import kernels
from troprank.cli_io import Document, divisor_data, parse, rank_data, to_json
from troprank.divisor import Divisor
from troprank.permutation import nu_divisor
from troprank.plfunc import describe
from troprank.rank import EnumerationBudget, check_rr_conditions, rank_metric, riemann_roch_check
from troprank.reduction import equivalent, reduce_metric
from troprank.topology import InvariantViolation, Point, TropicalCurve, ValidationError, canonical_divisor, retract

EXIT_OK, EXIT_INVALID, EXIT_INVARIANT = 0, 1, 2


def _load(path: str) -> Document:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from None
    return parse(text)


def _emit(args, lines: list[str], payload: dict):
    if args.json:
        print(to_json(payload))
    else:
        print("\n".join(lines))


def cmd_info(args) -> int:
    doc = _load(args.file)
    names = [args.graph] if args.graph else list(doc.hosts)
    lines, data = [], {}
    for name in names:
        if name not in doc.hosts:
            raise ValidationError(f"unknown host {name!r}")
        g = doc.hosts[name]
        K = canonical_divisor(g)
        nv = len(g.vertices)
        ne = len(g.metric.edges) + len(g.infinite) if isinstance(g, TropicalCurve) else len(g.edges)
        lines += [f"graph {name}", f"genus {g.genus}", f"vertices {nv}", f"edges {ne}", f"canonical {K}"]
        data[name] = {"genus": g.genus, "vertices": nv, "edges": ne, "canonical": divisor_data(K)}
    _emit(args, lines, {"graphs": data})
    return EXIT_OK


def cmd_reduce(args) -> int:
    doc = _load(args.file)
    d = doc.divisor(args.divisor)
    g = doc.host_of(args.divisor)
    metric, dd = retract(g, d)
    base = Point.parse(args.base) if args.base else None
    res = reduce_metric(metric, dd, base)
    lines = [f"reduced {res.reduced}", f"base {res.base}"]
    _emit(args, lines, {"reduced": divisor_data(res.reduced), "base": str(res.base), "certificate": describe(res.certificate)})
    return EXIT_OK


def cmd_rank(args) -> int:
    doc = _load(args.file)
    d = doc.divisor(args.divisor)
    g = doc.host_of(args.divisor)
    method = args.method
    budget = None
    if args.slope_bound is not None:
        if method == "subdivision":
            raise ValidationError("--slope-bound applies to the enumeration method")
        method = "enumeration"
        budget = EnumerationBudget(slope_bound=args.slope_bound)
    res = rank_metric(g, d, method, budget)
    lines = [f"rank {res.rank}"]
    if not res.exact:
        lines.append("exact false (upper bound)")
    _emit(args, lines, rank_data(res))
    return EXIT_OK


def cmd_equiv(args) -> int:
    doc = _load(args.file)
    d1, d2 = doc.divisor(args.first), doc.divisor(args.second)
    g = doc.host_of(args.first)
    if doc.host_of(args.second) is not g:
        raise ValidationError("divisors live on different hosts")
    metric, a = retract(g, d1)
    _, b = retract(g, d2)
    same, f = equivalent(metric, a, b, witness=True)
    _emit(args, [f"equivalent {'true' if same else 'false'}"], {"equivalent": same, "witness": describe(f) if f else None})
    return EXIT_OK


def cmd_nu(args) -> int:
    doc = _load(args.file)
    p = doc.perm(args.perm)
    nu = nu_divisor(p)
    _emit(args, [f"nu {nu}", f"degree {nu.degree}"], {"nu": divisor_data(nu), "degree": nu.degree})
    return EXIT_OK


def cmd_rrcheck(args) -> int:
    doc = _load(args.file)
    names = args.divisors or list(doc.divisors)
    lines, data, failed = [], {}, False
    for name in names:
        d = doc.divisor(name)
        g = doc.host_of(name)
        residual = riemann_roch_check(g, d)
        metric, dd = retract(g, d)
        rep = check_rr_conditions(metric, dd)
        ok = residual == 0 and rep.rr1 and rep.rr2 is not False
        failed |= not ok
        rr2 = "n/a" if rep.rr2 is None else ("ok" if rep.rr2 else "FAIL")
        lines.append(f"{name} residual {residual} rr1 {'ok' if rep.rr1 else 'FAIL'} rr2 {rr2}")
        data[name] = {"residual": residual, "rr1": rep.rr1, "rr2": rep.rr2}
    _emit(args, lines, {"divisors": data, "ok": not failed})
    return EXIT_INVARIANT if failed else EXIT_OK


def _selftest_checks():
    from troprank.corpus import banana, cycle, multigraphs, vertex_divisors
    from troprank.rank import rank_enumeration, rank_graph
    from troprank.topology import MetricGraph

    ban = banana(3)
    yield "banana reduce", str(reduce_metric(ban, Divisor(ban, {"v1": 3})).reduced) == "3(v0)"
    mb = MetricGraph.build(("v0", "v1"), (("e1", "v0", "v1", 2), ("e2", "v0", "v1", 3), ("e3", "v0", "v1", 4)))
    red = reduce_metric(mb, Divisor(mb, {"v1": 3})).reduced
    yield "metric banana reduce", str(red) == "(v0) + (e2@1) + (e3@2)"
    yield "banana rank", rank_graph(ban, Divisor(ban, {"v1": 3})).rank == 1
    c = cycle(3)
    yield "cycle riemann-roch", riemann_roch_check(c, Divisor(c, {"v0": 1})) == 0
    agree = True
    for g in multigraphs(2, 2):
        for d in vertex_divisors(g, -1, 2):
            agree &= rank_graph(g, d).rank == rank_enumeration(g, d).rank
    yield "oracle agreement", agree


def cmd_selftest(args) -> int:
    results = list(_selftest_checks())
    bad = [name for name, ok in results if not ok]
    lines = [f"{name}: {'ok' if ok else 'FAIL'}" for name, ok in results]
    lines.append(f"backend {kernels.BACKEND}")
    lines.append("selftest ok" if not bad else "selftest FAILED")
    _emit(args, lines, {"checks": dict(results), "backend": kernels.BACKEND, "ok": not bad})
    return EXIT_INVARIANT if bad else EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are invalid input, not invariant violations
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="troprank", description="Ranks of divisors on metric graphs and tropical curves.")
    parser.add_argument("--json", action="store_true", help="print JSON instead of text")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="print JSON instead of text")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("info", parents=[common], help="genus, sizes and canonical divisor")
    p.add_argument("file")
    p.add_argument("graph", nargs="?")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("reduce", parents=[common], help="reduced form of a divisor")
    p.add_argument("file")
    p.add_argument("divisor")
    p.add_argument("--base", help="base point (default: smallest vertex id)")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("rank", parents=[common], help="rank of a divisor")
    p.add_argument("file")
    p.add_argument("divisor")
    p.add_argument("--method", choices=("auto", "subdivision", "enumeration"), default="auto")
    p.add_argument("--slope-bound", type=int, help="truncate the enumeration at this slope")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("equiv", parents=[common], help="linear equivalence of two divisors")
    p.add_argument("file")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("nu", parents=[common], help="the divisor of a permutation")
    p.add_argument("file")
    p.add_argument("--perm", required=True)
    p.set_defaults(func=cmd_nu)

    p = sub.add_parser("rrcheck", parents=[common], help="Riemann-Roch residual and RR1/RR2 for divisors")
    p.add_argument("file")
    p.add_argument("divisors", nargs="*")
    p.set_defaults(func=cmd_rrcheck)

    p = sub.add_parser("selftest", parents=[common], help="run a small built-in consistency battery")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
