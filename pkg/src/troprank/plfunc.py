"""Continuous piecewise-linear functions with integer slopes on metric graphs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from troprank.divisor import Divisor
from troprank.topology import (
    Graph,
    MetricGraph,
    Point,
    Refinement,
    TropicalCurve,
    ValidationError,
    as_rational,
    format_rational,
)

__all__ = ["PLFunction", "make_pl", "evaluate", "order_at", "divisor_of", "pull_back"]


@dataclass(frozen=True, eq=False)
class PLFunction:
    """Values at vertices plus, per edge, the interior points where the slope changes.

    Build instances with :func:`make_pl`; it validates integrality of slopes
    and drops breakpoints across which the slope does not change.
    """

    host: MetricGraph
    vertex_values: Mapping[str, Fraction]
    breakpoints: Mapping[str, tuple[tuple[Fraction, Fraction], ...]]

    def knots(self, eid: str) -> list[tuple[Fraction, Fraction]]:
        """``(offset, value)`` pairs along ``eid`` including both endpoints."""
        e = self.host.graph.edge_map[eid]
        ell = self.host.length(eid)
        return (
            [(Fraction(0), self.vertex_values[e.u])]
            + list(self.breakpoints.get(eid, ()))
            + [(ell, self.vertex_values[e.v])]
        )

    def slopes(self, eid: str) -> list[int]:
        ks = self.knots(eid)
        return [int((b[1] - a[1]) / (b[0] - a[0])) for a, b in zip(ks, ks[1:])]

    def __call__(self, p) -> Fraction:
        return evaluate(self, p)

    def __add__(self, other: "PLFunction") -> "PLFunction":
        return _combine(self, other, 1)

    def __sub__(self, other: "PLFunction") -> "PLFunction":
        return _combine(self, other, -1)

    def __neg__(self) -> "PLFunction":
        return make_pl(
            self.host,
            {v: -x for v, x in self.vertex_values.items()},
            {e: [(o, -x) for o, x in bps] for e, bps in self.breakpoints.items()},
        )

    def scaled_values(self, factor) -> "PLFunction":
        """Divide all values by ``factor`` (used after a homothety)."""
        factor = as_rational(factor)
        return make_pl(
            self.host,
            {v: x / factor for v, x in self.vertex_values.items()},
            {e: [(o, x / factor) for o, x in bps] for e, bps in self.breakpoints.items()},
        )


def make_pl(g: MetricGraph | Graph, vertex_values: Mapping, breakpoints: Mapping | None = None) -> PLFunction:
    """Validate and normalize a piecewise-linear function.

    ``breakpoints`` maps an edge id to ``(offset, value)`` pairs with offsets
    in ``[0, length]``; pairs at an endpoint must agree with the vertex value.
    """
    if isinstance(g, TropicalCurve):
        raise ValidationError("functions on tropical curves are handled after retraction")
    if isinstance(g, Graph):
        g = MetricGraph.unit(g)
    values = {}
    for v in g.vertices:
        if v not in vertex_values:
            raise ValidationError(f"missing value at vertex {v!r}")
        values[v] = as_rational(vertex_values[v])
    extra = set(vertex_values) - set(values)
    if extra:
        raise ValidationError(f"values given for unknown vertices {sorted(extra)}")
    breakpoints = dict(breakpoints or {})
    unknown = set(breakpoints) - set(g.graph.edge_map)
    if unknown:
        raise ValidationError(f"breakpoints on unknown edges {sorted(unknown)}")
    canon: dict[str, tuple[tuple[Fraction, Fraction], ...]] = {}
    for e in g.edges:
        ell = g.length(e.id)
        raw = sorted((as_rational(o), as_rational(x)) for o, x in breakpoints.get(e.id, ()))
        pts: list[tuple[Fraction, Fraction]] = [(Fraction(0), values[e.u])]
        for o, x in raw:
            if o < 0 or o > ell:
                raise ValidationError(f"breakpoint offset out of range on edge {e.id!r}")
            if o == pts[-1][0]:
                if x != pts[-1][1]:
                    raise ValidationError(f"discontinuous at point {g.canonical(Point(e.id, o))}")
                continue
            pts.append((o, x))
        if pts[-1][0] == ell:
            if pts[-1][1] != values[e.v]:
                raise ValidationError(f"discontinuous at point {e.v}")
        else:
            pts.append((ell, values[e.v]))
        slopes = []
        for k, (a, b) in enumerate(zip(pts, pts[1:])):
            s = (b[1] - a[1]) / (b[0] - a[0])
            if s.denominator != 1:
                raise ValidationError(f"non-integer slope on edge {e.id} piece {k}")
            slopes.append(s)
        kept = [pts[i] for i in range(1, len(pts) - 1) if slopes[i - 1] != slopes[i]]
        if kept:
            canon[e.id] = tuple(kept)
    return PLFunction(g, values, canon)


def evaluate(f: PLFunction, p) -> Fraction:
    p = f.host.canonical(p)
    if p.offset is None:
        return f.vertex_values[p.ref]
    ks = f.knots(p.ref)
    for a, b in zip(ks, ks[1:]):
        if a[0] <= p.offset <= b[0]:
            return a[1] + (b[1] - a[1]) * (p.offset - a[0]) / (b[0] - a[0])
    raise AssertionError("offset not covered by pieces")


def order_at(f: PLFunction, p) -> int:
    """Sum of outgoing slopes at ``p``."""
    p = f.host.canonical(p)
    if p.offset is None:
        total = 0
        for e in f.host.graph.incident[p.ref]:
            sl = f.slopes(e.id)
            if e.u == p.ref:
                total += sl[0]
            if e.v == p.ref:
                total -= sl[-1]
        return total
    ks = f.knots(p.ref)
    sl = f.slopes(p.ref)
    for i in range(1, len(ks) - 1):
        if ks[i][0] == p.offset:
            return sl[i] - sl[i - 1]
    return 0


def divisor_of(f: PLFunction) -> Divisor:
    """The principal divisor ``D_f``: order at every vertex and breakpoint."""
    chips: dict[Point, int] = {}
    for v in f.host.vertices:
        chips[Point(v)] = 0
    for e in f.host.edges:
        sl = f.slopes(e.id)
        chips[Point(e.u)] += sl[0]
        chips[Point(e.v)] -= sl[-1]
        for i, (o, _) in enumerate(f.breakpoints.get(e.id, ()), start=1):
            chips[Point(e.id, o)] = sl[i] - sl[i - 1]
    return Divisor._raw(f.host, {p: k for p, k in chips.items() if k})


def _combine(f: PLFunction, g: PLFunction, sign: int) -> PLFunction:
    if f.host is not g.host and f.host != g.host:
        raise ValidationError("functions live on different hosts")
    values = {v: f.vertex_values[v] + sign * g.vertex_values[v] for v in f.host.vertices}
    bps = {}
    for e in f.host.edges:
        offs = sorted({o for o, _ in f.breakpoints.get(e.id, ())} | {o for o, _ in g.breakpoints.get(e.id, ())})
        if offs:
            bps[e.id] = [(o, evaluate(f, Point(e.id, o)) + sign * evaluate(g, Point(e.id, o))) for o in offs]
    return make_pl(f.host, values, bps)


def pull_back(f: PLFunction, ref: Refinement) -> PLFunction:
    """Transport a function on ``ref.graph`` back to ``ref.original``.

    Values are divided by the refinement's scale so slopes (and therefore
    the associated divisor) are unchanged.
    """
    orig = ref.original
    scale = ref.scale
    values = {v: f.vertex_values[v] / scale for v in orig.vertices}
    bps: dict[str, list] = {}
    for e in orig.edges:
        out = []
        for pid in ref.edge_pieces(e.id):
            _, start, _ = ref.pieces[pid]
            ks = f.knots(pid)
            for o, x in ks[1:-1]:
                out.append((start + o / scale, x / scale))
            if pid != ref.edge_pieces(e.id)[-1]:
                out.append((start + ks[-1][0] / scale, ks[-1][1] / scale))
        if out:
            bps[e.id] = out
    return make_pl(orig, values, bps)


def describe(f: PLFunction) -> dict:
    """Plain-data view used by the JSON serializer."""
    return {
        "vertex_values": {v: format_rational(x) for v, x in sorted(f.vertex_values.items())},
        "breakpoints": {
            e: [[format_rational(o), format_rational(x)] for o, x in bps] for e, bps in sorted(f.breakpoints.items())
        },
    }
