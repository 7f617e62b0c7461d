"""Reduced divisors, linear equivalence and the emptiness indicator ``epsilon``.

Graph reduction is chip-firing with Dhar's burning test.  Metric graphs
with rational lengths are handled by subdividing into unit edges, reducing
there and mapping the result back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from troprank import kernels
from troprank.divisor import Divisor
from troprank.permutation import Permutation
from troprank.plfunc import PLFunction, make_pl, pull_back
from troprank.topology import (
    Graph,
    InvariantViolation,
    MetricGraph,
    Point,
    TropicalCurve,
    ValidationError,
    loop_midpoints,
    refine,
    retract,
    unit_subdivision,
)

__all__ = [
    "ReductionResult",
    "SaturationReport",
    "RANK_NONNEGATIVE",
    "base_point",
    "saturation",
    "reduce_graph",
    "is_reduced_graph",
    "reduce_metric",
    "reduce",
    "equivalent",
    "epsilon",
    "nonspecial_witness",
]

RANK_NONNEGATIVE = "rank >= 0"
EXHAUSTIVE_LIMIT = 12


@dataclass(frozen=True)
class ReductionResult:
    """``reduced = input + D_c`` where ``c`` is :attr:`certificate`.

    On a :class:`Graph` the certificate is a firing script (vertex to
    integer); on a metric graph it is a :class:`PLFunction`.
    """

    reduced: Divisor
    certificate: Mapping[str, int] | PLFunction
    base: Point


@dataclass(frozen=True)
class SaturationReport:
    vertex: str
    edges_leaving: int
    chips: int

    @property
    def saturated(self) -> bool:
        return self.edges_leaving <= self.chips


def base_point(g) -> Point:
    """Deterministic base: the smallest vertex id."""
    return Point(min(g.vertices))


def saturation(g: Graph, closed: set[str], v: str, d: Divisor) -> SaturationReport:
    """Edges from ``v`` to vertices outside the vertex set ``closed``."""
    leaving = sum(1 for e in g.incident[v] if not e.is_loop and (e.v if e.u == v else e.u) not in closed)
    return SaturationReport(v, leaving, d[Point(v)])


def _chips(g: Graph, d: Divisor) -> np.ndarray:
    if not d.is_vertex_supported():
        raise ValidationError("divisor must be supported on vertices")
    c = np.zeros(len(g.vertices), dtype=np.int64)
    idx = g.index
    for p, k in d.items():
        c[idx[p.ref]] = k
    return c


def _from_chips(g: Graph, c) -> Divisor:
    return Divisor._raw(g, {Point(v): int(k) for v, k in zip(g.vertices, c) if k})


def _vertex(g, v0) -> str:
    if v0 is None:
        return base_point(g).ref
    p = g.canonical(v0)
    if p.offset is not None:
        raise ValidationError("base point must be a vertex")
    return p.ref


def reduce_graph(g: Graph, d: Divisor, v0=None) -> ReductionResult:
    """The ``v0``-reduced divisor equivalent to ``d`` and a firing script."""
    d = d if d.host == g else d.rehost(g)
    v0 = _vertex(g, v0)
    c = _chips(g, d)
    red, script = kernels.reduce_chips(g.adjacency, g.bfs_distances(v0), c, g.index[v0])
    cert = {v: int(s) for v, s in zip(g.vertices, script)}
    return ReductionResult(_from_chips(g, red), cert, Point(v0))


def _reduced_by_subsets(g: Graph, c, i0: int) -> bool:
    n = len(c)
    adj = g.adjacency
    others = [i for i in range(n) if i != i0]
    if any(c[i] < 0 for i in others):
        return False
    for r in range(1, len(others) + 1):
        for A in itertools.combinations(others, r):
            inside = np.zeros(n, dtype=bool)
            inside[list(A)] = True
            if not any(c[v] < adj[v][~inside].sum() for v in A):
                return False
    return True


def is_reduced_graph(g: Graph, d: Divisor, v0=None, exhaustive: bool = False) -> bool:
    """Dhar's test; with ``exhaustive`` also check every vertex subset."""
    d = d if d.host == g else d.rehost(g)
    v0 = _vertex(g, v0)
    c = _chips(g, d)
    i0 = g.index[v0]
    ok = all(c[i] >= 0 for i in range(len(c)) if i != i0) and len(kernels.unburnt(g.adjacency, c, i0)) == 0
    if exhaustive:
        if len(c) > EXHAUSTIVE_LIMIT:
            raise ValidationError(f"exhaustive check limited to {EXHAUSTIVE_LIMIT} vertices")
        if _reduced_by_subsets(g, c, i0) != ok:
            raise InvariantViolation("burning test disagrees with subset enumeration")
    return ok


def _as_metric(g, d: Divisor):
    if isinstance(g, TropicalCurve):
        return retract(g, d)
    if isinstance(g, Graph):
        g = MetricGraph.unit(g)
    return g, (d if d.host == g else d.rehost(g))


def reduce_metric(g: MetricGraph, d: Divisor, v0=None) -> ReductionResult:
    """Reduce on the unit subdivision marking ``supp d`` and ``v0``.

    The certificate is a PL function on ``g`` with ``D_f = reduced - d``.
    """
    g, d = _as_metric(g, d)
    v0 = base_point(g) if v0 is None else g.canonical(v0)
    sub = unit_subdivision(g, list(d.support) + [v0])
    res = reduce_graph(sub.graph, sub.push(d), Point(sub.forward(v0)))
    f = make_pl(sub.metric, res.certificate)
    return ReductionResult(sub.pull(res.reduced), pull_back(f, sub.refinement), v0)


def reduce(g, d: Divisor, v0=None) -> ReductionResult:
    """Dispatch on the host type."""
    if isinstance(g, Graph):
        return reduce_graph(g, d, v0)
    return reduce_metric(g, d, v0)


def equivalent(g, d1: Divisor, d2: Divisor, witness: bool = False):
    """Whether ``d1 ~ d2``; with ``witness`` also return ``c`` with ``D_c = d1 - d2``.

    The witness is a firing script on a :class:`Graph` host and a PL
    function otherwise; it is ``None`` when the divisors are not equivalent.
    """
    d1._check_host(d2)
    if d1.degree != d2.degree:
        return (False, None) if witness else False
    r1 = reduce(g, d1)
    r2 = reduce(g, d2)
    same = r1.reduced == r2.reduced
    if not witness:
        return same
    if not same:
        return False, None
    c1, c2 = r1.certificate, r2.certificate
    if isinstance(c1, PLFunction):
        return True, c2 - c1
    return True, {v: c2[v] - c1[v] for v in c1}


def epsilon(g, d: Divisor) -> int:
    """0 if ``|d|`` is nonempty, 1 otherwise."""
    if d.degree < 0:
        return 1
    res = reduce(g, d)
    return 0 if res.reduced[res.base] >= 0 else 1


def nonspecial_witness(g, d: Divisor):
    """Either :data:`RANK_NONNEGATIVE` or a permutation ``P`` with ``nu_P >= D0``.

    ``D0`` is the reduced form of ``d``.  The points of ``Q`` (vertices,
    loop midpoints and ``supp D0``) are ordered greedily: after ``v0``,
    always append the first unordered point that is not saturated with
    respect to the unordered remainder.
    """
    g, d = _as_metric(g, d)
    res = reduce_metric(g, d)
    d0, v0 = res.reduced, res.base
    if d0[v0] >= 0:
        return RANK_NONNEGATIVE
    ref = refine(g, list(loop_midpoints(g)) + list(d0.support))
    h = ref.graph.graph
    d0r = d0.map(ref.forward, ref.graph).rehost(h)
    order = [v0.ref]
    rest = set(h.vertices) - {v0.ref}
    while rest:
        for v in sorted(rest, key=lambda x: ref.inverse(Point(x)).sort_key()):
            rep = saturation(h, rest, v, d0r)
            if rep.edges_leaving and not rep.saturated:
                break
        else:
            raise InvariantViolation("reduced divisor has a fully saturated closed set")
        order.append(v)
        rest.discard(v)
    return Permutation(g, tuple(ref.inverse(Point(v)) for v in order))
