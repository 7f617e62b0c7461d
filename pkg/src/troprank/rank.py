"""Ranks of divisors on graphs, metric graphs and tropical curves.

Two independent routes are provided.  The default reduces to a finite
graph by unit subdivision and runs a memoized chip-firing search.  The
enumeration route minimizes ``deg+(D + D_f - nu_P) - 1`` over functions
``f`` built from spanning trees and integer slopes, and over orderings
``P`` of the resulting support.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

import numpy as np

from troprank import kernels
from troprank.divisor import Divisor
from troprank.permutation import Permutation, nu_divisor
from troprank.plfunc import PLFunction, divisor_of, make_pl, pull_back
from troprank.reduction import (
    RANK_NONNEGATIVE,
    _as_metric,
    _chips,
    base_point,
    epsilon,
    nonspecial_witness,
)
from troprank.topology import (
    Graph,
    InvariantViolation,
    MetricGraph,
    Point,
    TropicalCurve,
    ValidationError,
    _UnionFind,
    canonical_divisor,
    eliminate_loops,
    loop_midpoints,
    retract,
    unit_subdivision,
)

__all__ = [
    "EnumerationBudget",
    "RankCertificate",
    "RankResult",
    "RRReport",
    "slope_bound",
    "certified_slope_bound",
    "spanning_trees",
    "extend_tree_function",
    "rank_graph",
    "rank_metric",
    "rank_enumeration",
    "rank_tropical",
    "rank",
    "enumeration_terms",
    "riemann_roch_check",
    "check_rr1",
    "check_rr2",
    "check_rr_conditions",
]

METHODS = ("auto", "subdivision", "enumeration")


@dataclass(frozen=True)
class EnumerationBudget:
    """Limits for the enumeration route.

    Parameters
    ----------
    slope_bound : int, optional
        Largest absolute tree slope tried.  ``None`` means the exact bound.
    prune : bool
        Restrict to the certified slope cap and skip functions whose
        ``deg+(D_f)`` exceeds it.  Both restrictions keep the optimum.
    max_scan : int, optional
        Stop after this many slope vectors; the result is then flagged
        inexact.
    """

    slope_bound: int | None = None
    prune: bool = True
    max_scan: int | None = None


@dataclass(frozen=True)
class RankCertificate:
    """``divisor = D + D_f`` with ``deg+(divisor - nu_P) - 1`` equal to the rank found."""

    divisor: Divisor
    permutation: Permutation
    function: PLFunction

    @property
    def term(self) -> int:
        return (self.divisor - nu_divisor(self.permutation)).deg_plus - 1


@dataclass(frozen=True)
class RankResult:
    """Rank together with an effective ``E`` of degree ``rank + 1`` and ``|D - E|`` empty.

    ``exact`` is false when a truncated enumeration only certifies an upper
    bound.  ``witness_unreachable`` is ``None`` when the rank came from the
    Riemann-Roch shortcut.
    """

    rank: int
    witness_unreachable: Divisor | None
    certificate: RankCertificate | None = None
    exact: bool = True
    method: str = "subdivision"
    stats: Mapping[str, int] = field(default_factory=dict)


# ---------------------------------------------------------------- bounds


def slope_bound(g: MetricGraph | Graph, p: int) -> int:
    """``(Delta + p) ** e`` with ``Delta`` the maximum degree and ``e`` the edge count."""
    if p < 0:
        raise ValidationError("p must be non-negative")
    graph = g.graph if isinstance(g, MetricGraph) else g
    delta = max(graph.degrees.values())
    return (delta + p) ** len(graph.edges)


def certified_slope_bound(g: MetricGraph, d: Divisor) -> int:
    """Upper bound on ``deg+(D_f)`` for an optimal tree function.

    Valid on a loopless graph whose vertices carry ``supp d`` and whose
    lengths are integers, when ``deg d >= 0``.  Every slope of a function
    is at most ``deg+(D_f)``, so this also caps the tree slopes.
    """
    n, m = len(g.vertices), len(g.edges)
    total = sum(abs(k) for _, k in d.items())
    return (d.degree + total + 6 * m - 4 * n + 4) // 2


# ------------------------------------------------------ spanning trees


def spanning_trees(g: Graph | MetricGraph) -> list[tuple[str, ...]]:
    """Every spanning tree once, as sorted-by-declaration edge id tuples."""
    graph = g.graph if isinstance(g, MetricGraph) else g
    n = len(graph.vertices)
    cand = [e for e in graph.edges if not e.is_loop]
    out = []
    for combo in itertools.combinations(cand, n - 1):
        uf = _UnionFind(graph.vertices)
        if all(uf.union(e.u, e.v) for e in combo):
            out.append(tuple(e.id for e in combo))
    return out


def _tree_layout(g: Graph, tree: tuple[str, ...], root: str):
    """BFS order, parent index and tree-edge slot for every vertex."""
    idx = g.index
    n = len(g.vertices)
    tset = set(tree)
    slot_of = {eid: k for k, eid in enumerate(tree)}
    parent = [-1] * n
    slot = [-1] * n
    via = [None] * n
    order = [idx[root]]
    seen = {root}
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for e in g.incident[v]:
            if e.id not in tset:
                continue
            w = e.v if e.u == v else e.u
            if w in seen:
                continue
            seen.add(w)
            parent[idx[w]] = idx[v]
            slot[idx[w]] = slot_of[e.id]
            via[idx[w]] = e.id
            order.append(idx[w])
            queue.append(w)
    if len(order) != n:
        raise ValidationError("edge set is not a spanning tree")
    non_tree = [e for e in g.edges if e.id not in tset and not e.is_loop]
    return order, parent, slot, via, non_tree


def _break_value(A, B, ell, t):
    """Value at the break at offset ``t`` from the end with value ``A``."""
    if B >= A:
        s = (B - A) // ell
        return A + s * t
    s = (A - B) // ell
    return B + s * (ell - t)


def extend_tree_function(g: MetricGraph, tree, F: Mapping[str, int], root=None) -> PLFunction:
    """The function with slope ``F[e]`` away from ``root`` on each tree edge.

    Each non-tree edge is linear when the end difference is an integer
    multiple of its length; otherwise it gets one break of order ``+1``.
    """
    if isinstance(g, Graph):
        g = MetricGraph.unit(g)
    graph = g.graph
    root = base_point(g).ref if root is None else g.canonical(root).ref
    order, parent, _, via, non_tree = _tree_layout(graph, tuple(tree), root)
    verts = graph.vertices
    f = {root: Fraction(0)}
    for i in order[1:]:
        e = via[i]
        f[verts[i]] = f[verts[parent[i]]] + int(F[e]) * g.length(e)
    bps = {}
    for e in non_tree:
        A, B, ell = f[e.u], f[e.v], g.length(e.id)
        diff = abs(B - A)
        s = diff // ell
        rem = diff - s * ell
        if rem:
            t = ell - rem if B >= A else rem
            bps[e.id] = [(t, _break_value(A, B, ell, t))]
    return make_pl(g, f, bps)


# ------------------------------------------------------------ graph rank


def _zero(host) -> Divisor:
    return Divisor._raw(host, {})


def rank_graph(g: Graph, d: Divisor, shortcut: bool = False, exhaustive: bool = False) -> RankResult:
    """Rank of a vertex divisor on a finite graph.

    A graph with loops is treated as its unit-length metric graph (so loops
    contribute to the genus); the witness then lives on that metric graph.
    ``exhaustive`` runs the literal search over effective ``E`` of
    increasing degree instead of the memoized recursion.
    """
    d = d if d.host == g else d.rehost(g)
    if not d.is_vertex_supported():
        raise ValidationError("divisor must be supported on vertices")
    if g.has_loops:
        return _rank_subdivision(MetricGraph.unit(g), d.rehost(MetricGraph.unit(g)), shortcut)
    if d.degree < 0:
        return RankResult(-1, _zero(g), method="graph")
    if shortcut and d.degree > 2 * g.genus - 2:
        return RankResult(d.degree - g.genus, None, method="riemann-roch")
    v0 = base_point(g).ref
    c = _chips(g, d)
    adj, dist, i0 = g.adjacency, g.bfs_distances(v0), g.index[v0]
    if exhaustive:
        return _rank_graph_exhaustive(g, d, c, adj, dist, i0)
    r, w = kernels.graph_rank(adj, dist, c, i0)
    chips: dict[Point, int] = {}
    for i in w:
        p = Point(g.vertices[i])
        chips[p] = chips.get(p, 0) + 1
    return RankResult(int(r), Divisor._raw(g, chips), method="graph")


def _rank_graph_exhaustive(g, d, c, adj, dist, i0) -> RankResult:
    n = len(c)
    for k in itertools.count():
        for combo in itertools.combinations_with_replacement(range(n), k):
            cc = c.copy()
            for i in combo:
                cc[i] -= 1
            red, _ = kernels.reduce_chips(adj, dist, cc, i0)
            if red[i0] < 0:
                chips: dict[Point, int] = {}
                for i in combo:
                    p = Point(g.vertices[i])
                    chips[p] = chips.get(p, 0) + 1
                return RankResult(k - 1, Divisor._raw(g, chips), method="graph-exhaustive")
    raise AssertionError("unreachable")


def _rank_subdivision(g: MetricGraph, d: Divisor, shortcut: bool = False) -> RankResult:
    sub = unit_subdivision(g, list(d.support) + list(loop_midpoints(g)))
    res = rank_graph(sub.graph, sub.push(d), shortcut=shortcut)
    w = None if res.witness_unreachable is None else sub.pull(res.witness_unreachable)
    return RankResult(res.rank, w, method="subdivision" if res.witness_unreachable is not None else res.method)


# ------------------------------------------------------------ enumeration


@dataclass
class _Prepared:
    """Loop-free, support-promoted, integer-length copy of the input."""

    ref: object
    host: MetricGraph
    divisor: Divisor
    chips: np.ndarray
    root: str


def _prepare(g: MetricGraph, d: Divisor) -> _Prepared:
    ref = eliminate_loops(g, d.support, integral=True)
    h = ref.graph
    dh = d.map(ref.forward, h)
    chips = _chips(h.graph, dh.rehost(h.graph))
    return _Prepared(ref, h, dh, chips, base_point(h).ref)


def _tree_arrays(prep: _Prepared, tree):
    h = prep.host
    graph = h.graph
    order, parent, slot, via, non_tree = _tree_layout(graph, tree, prep.root)
    n = len(graph.vertices)
    plen = [0] * n
    for i in order[1:]:
        plen[i] = int(h.length(via[i]))
    idx = graph.index
    nt = [(idx[e.u], idx[e.v], int(h.length(e.id))) for e in non_tree]
    return order, parent, plen, slot, non_tree, nt


def _certificate(prep: _Prepared, g: MetricGraph, d: Divisor, tree, F, ids, expect: int) -> RankCertificate:
    h = prep.host
    graph = h.graph
    order, parent, plen, slot, non_tree, nt = _tree_arrays(prep, tree)
    fv = kernels._pykernels.tree_values(order, parent, plen, slot, list(F))
    _, breaks = kernels._pykernels.extend_orders(order, parent, slot, nt, fv, list(F))
    verts = graph.vertices
    n = len(verts)
    bps = {}
    for j, (e, (a, b, ell)) in enumerate(zip(non_tree, nt)):
        if breaks[j]:
            bps[e.id] = [(breaks[j], _break_value(fv[a], fv[b], ell, breaks[j]))]
    f = make_pl(h, {verts[i]: fv[i] for i in range(n)}, bps)
    pts = [Point(verts[i]) if i < n else Point(non_tree[i - n].id, breaks[i - n]) for i in ids]
    dprime = prep.divisor + divisor_of(f)
    perm = Permutation(h, tuple(pts))
    if (dprime - nu_divisor(perm)).deg_plus != expect:
        raise InvariantViolation("enumeration certificate does not reproduce its term")
    ref = prep.ref
    f0 = pull_back(f, ref)
    cert = RankCertificate(dprime.map(ref.inverse, g), Permutation(g, tuple(ref.inverse(p) for p in pts)), f0)
    if cert.divisor != d + divisor_of(f0) or cert.term != expect - 1:
        raise InvariantViolation("certificate does not survive the pull back")
    return cert


def rank_enumeration(g, d: Divisor, budget: EnumerationBudget | None = None) -> RankResult:
    """Minimize ``deg+(D + D_f - nu_P) - 1`` over trees, slopes and orderings.

    Orderings are handled by a dynamic program over subsets of the
    support, which returns the same minimum as trying every ordering.
    """
    budget = budget or EnumerationBudget()
    g, d = _as_metric(g, d)
    if d.degree < 0:
        return RankResult(-1, _zero(g), method="enumeration")
    prep = _prepare(g, d)
    h = prep.host
    w0 = Point(prep.root)
    if prep.divisor.is_zero():
        return RankResult(0, Divisor(g, {prep.ref.inverse(w0): 1}), method="enumeration")
    if len(h.vertices) == 1:
        r = max(prep.divisor[w0], -1)
        return RankResult(r, Divisor(g, {prep.ref.inverse(w0): r + 1}), method="enumeration")

    n, m = len(h.vertices), len(h.edges)
    M = max(abs(k) for _, k in prep.divisor.items())
    p = 2 * (n * M + m)
    U = slope_bound(h, p)
    S = certified_slope_bound(h, prep.divisor)
    if budget.slope_bound is None:
        cap = min(U, S) if budget.prune else U
    else:
        if budget.slope_bound < 0:
            raise ValidationError("slope bound must be non-negative")
        cap = budget.slope_bound
    exact = cap >= S or cap >= U
    prune_limit = S if budget.prune else -1
    if m + 1 > kernels.MAX_PERM_POINTS:
        raise ValidationError("support too large for the ordering search")

    best = kernels.NO_TERM
    best_arg = None
    scanned = kept = 0
    complete = True
    trees = spanning_trees(h)
    for tree in trees:
        order, parent, plen, slot, _, nt = _tree_arrays(prep, tree)
        remaining = -1 if budget.max_scan is None else budget.max_scan - scanned
        if remaining == 0:
            complete = False
            break
        val, bf, bo, sc, kp, done = kernels.scan_tree(
            np.array(order, dtype=np.int64),
            np.array(parent, dtype=np.int64),
            np.array(plen, dtype=np.int64),
            np.array(slot, dtype=np.int64),
            np.array(nt, dtype=np.int64).reshape(-1, 3),
            prep.chips,
            cap,
            prune_limit,
            remaining,
        )
        scanned += int(sc)
        kept += int(kp)
        if val < best:
            best = int(val)
            best_arg = (tree, [int(x) for x in bf], [int(x) for x in bo])
        if not done:
            complete = False
            break
    stats = {"trees": len(trees), "scanned": scanned, "kept": kept, "cap": cap, "p": p}
    if best_arg is None:
        # nothing evaluated: fall back to the trivial bound r(D) <= deg D
        w = Divisor(g, {prep.ref.inverse(w0): d.degree + 1})
        return RankResult(d.degree, w, None, False, "enumeration", stats)
    cert = _certificate(prep, g, d, *best_arg, best)
    witness = (cert.divisor - nu_divisor(cert.permutation)).positive_part()
    return RankResult(best - 1, witness, cert, exact and complete, "enumeration", stats)


def enumeration_terms(g, d: Divisor, cap: int) -> Iterator[tuple[tuple[str, ...], tuple[int, ...], int]]:
    """Yield ``(tree, F, deg+(D' - nu_P) - 1)`` for every ordering ``P`` literally.

    Intended for tiny inputs in tests; no pruning, no dynamic program.
    """
    g, d = _as_metric(g, d)
    prep = _prepare(g, d)
    n = len(prep.host.vertices)
    py = kernels._pykernels
    for tree in spanning_trees(prep.host):
        order, parent, plen, slot, _, nt = _tree_arrays(prep, tree)
        for F in itertools.product(range(-cap, cap + 1), repeat=n - 1):
            fv = py.tree_values(order, parent, plen, slot, F)
            ordf, breaks = py.extend_orders(order, parent, slot, nt, fv, F)
            _, adj, vals = py.segment_problem(order, parent, nt, prep.chips.tolist(), ordf, breaks)
            k = len(vals)
            for perm in itertools.permutations(range(k)):
                total = 0
                for i, x in enumerate(perm):
                    nu = sum(adj[x][y] for y in perm[:i]) - 1
                    total += max(0, vals[x] - nu)
                yield tree, tuple(F), total - 1


# ---------------------------------------------------------------- dispatch


def rank_metric(
    g,
    d: Divisor,
    method: str = "auto",
    budget: EnumerationBudget | None = None,
    shortcut: bool = False,
) -> RankResult:
    """Rank on a metric graph; ``auto`` means ``subdivision``."""
    if method not in METHODS:
        raise ValidationError(f"unknown method {method!r}")
    if isinstance(g, TropicalCurve):
        return rank_tropical(g, d, method, budget, shortcut)
    g, d = _as_metric(g, d)
    if method == "enumeration":
        return rank_enumeration(g, d, budget)
    if d.degree < 0:
        return RankResult(-1, _zero(g))
    return _rank_subdivision(g, d, shortcut)


def rank_tropical(c: TropicalCurve, d: Divisor, method: str = "auto", budget=None, shortcut: bool = False) -> RankResult:
    """Retract the infinite edges, then compute the rank on the finite part."""
    metric, dd = retract(c, d)
    res = rank_metric(metric, dd, method, budget, shortcut)
    w = None if res.witness_unreachable is None else res.witness_unreachable.rehost(c)
    return RankResult(res.rank, w, res.certificate, res.exact, res.method, res.stats)


def rank(g, d: Divisor, method: str = "auto", budget=None, shortcut: bool = False) -> RankResult:
    """Dispatch on the host: graphs use :func:`rank_graph` unless enumeration is asked for."""
    if isinstance(g, Graph) and method != "enumeration":
        return rank_graph(g, d, shortcut=shortcut)
    return rank_metric(g, d, method, budget, shortcut)


# ---------------------------------------------------------- Riemann-Roch


def riemann_roch_check(g, d: Divisor, method: str = "auto") -> int:
    """``r(D) - r(K - D) - deg(D) - 1 + g``; zero when Riemann-Roch holds."""
    K = canonical_divisor(g)
    r1 = rank(g, d, method).rank
    r2 = rank(g, K - d, method).rank
    return r1 - r2 - d.degree - 1 + g.genus


@dataclass(frozen=True)
class RRReport:
    epsilon: int
    witness: Permutation | None
    rr1: bool
    rr2: bool | None = None


def check_rr1(g, d: Divisor) -> RRReport:
    """Exactly one of ``|D|`` nonempty, or a ``P`` with ``|nu_P - D|`` nonempty."""
    eps = epsilon(g, d)
    w = nonspecial_witness(g, d)
    if w == RANK_NONNEGATIVE:
        return RRReport(eps, None, eps == 0)
    nu = nu_divisor(w)
    mg, dd = _as_metric(g, d)
    ok = eps == 1 and epsilon(mg, nu - dd) == 0
    return RRReport(eps, w, ok)


def check_rr2(g, d: Divisor) -> bool:
    """``epsilon(D) == epsilon(K - D)`` for ``deg D = g - 1``."""
    if d.degree != g.genus - 1:
        raise ValidationError("RR2 needs a divisor of degree g - 1")
    K = canonical_divisor(g)
    return epsilon(g, d) == epsilon(g, K - d)


def check_rr_conditions(g, d: Divisor) -> RRReport:
    rep = check_rr1(g, d)
    rr2 = check_rr2(g, d) if d.degree == g.genus - 1 else None
    return RRReport(rep.epsilon, rep.witness, rep.rr1, rr2)
