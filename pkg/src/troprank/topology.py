"""Graphs, metric graphs, tropical curves and the maps between them.

All lengths and offsets are exact :class:`fractions.Fraction` values.  A
point of a metric graph is either a vertex or an interior position on an
edge, with the offset measured from the edge's first declared endpoint.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import lcm
from typing import Iterable, Union

import numpy as np

__all__ = [
    "ValidationError",
    "InvariantViolation",
    "Edge",
    "InfiniteEdge",
    "Point",
    "Graph",
    "MetricGraph",
    "TropicalCurve",
    "Refinement",
    "Subdivision",
    "as_rational",
    "format_rational",
    "genus",
    "canonical_divisor",
    "branch_set",
    "refine",
    "insert_point",
    "scale_lengths",
    "eliminate_loops",
    "unit_subdivision",
    "subdivide",
    "retract",
]


class ValidationError(ValueError):
    """Raised when a graph, point or divisor violates its invariants."""


class InvariantViolation(AssertionError):
    """Raised when a computed result fails one of its own consistency checks."""


_RATIONAL = re.compile(r"[+-]?[0-9]+(/[0-9]+)?")


def as_rational(x) -> Fraction:
    """Convert ``x`` to an exact rational, refusing floats."""
    if isinstance(x, bool):
        raise ValidationError(f"not a rational number: {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        # integers and p/q only; decimals and exponents are not exact input
        if not _RATIONAL.fullmatch(x.strip()):
            raise ValidationError(f"not a rational number: {x!r}")
        try:
            return Fraction(x.strip())
        except ZeroDivisionError:
            raise ValidationError(f"not a rational number: {x!r}") from None
    raise ValidationError(f"inexact or unsupported number type: {x!r}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class InfiniteEdge:
    """An unbounded leaf edge ``attach -- end`` of a tropical curve."""

    id: str
    attach: str
    end: str


@dataclass(frozen=True)
class Point:
    """A vertex (``offset is None``) or an interior point ``ref@offset``.

    Points built by hand are not necessarily canonical; hosts provide
    :meth:`Graph.canonical` and friends for that.
    """

    ref: str
    offset: Fraction | None = None

    @classmethod
    def vertex(cls, vid: str) -> "Point":
        return cls(vid)

    @classmethod
    def on(cls, edge: str, offset) -> "Point":
        return cls(edge, as_rational(offset))

    @classmethod
    def parse(cls, text: str) -> "Point":
        text = text.strip()
        if "@" in text:
            ref, _, off = text.partition("@")
            if not ref:
                raise ValidationError(f"malformed point {text!r}")
            return cls(ref, as_rational(off))
        if not text:
            raise ValidationError("empty point")
        return cls(text)

    @property
    def is_vertex(self) -> bool:
        return self.offset is None

    def sort_key(self):
        if self.offset is None:
            return (0, self.ref, Fraction(0))
        return (1, self.ref, self.offset)

    def __lt__(self, other: "Point") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        if self.offset is None:
            return self.ref
        return f"{self.ref}@{format_rational(self.offset)}"


PointLike = Union[Point, str]


def _coerce_point(p: PointLike) -> Point:
    if isinstance(p, Point):
        return p
    if isinstance(p, str):
        return Point.parse(p)
    raise ValidationError(f"not a point: {p!r}")


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


@dataclass(frozen=True)
class Graph:
    """A finite connected multigraph; loops are allowed."""

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        verts = tuple(self.vertices)
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        if not verts:
            raise ValidationError("graph has no vertices")
        if len(set(verts)) != len(verts):
            raise ValidationError("duplicate vertex id")
        vset = set(verts)
        seen = set()
        for e in edges:
            if e.id in seen:
                raise ValidationError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            for end in (e.u, e.v):
                if end not in vset:
                    raise ValidationError(f"edge {e.id!r} uses unknown vertex {end!r}")
        uf = _UnionFind(verts)
        comps = len(verts)
        for e in edges:
            if uf.union(e.u, e.v):
                comps -= 1
        if comps != 1:
            raise ValidationError("graph is disconnected")

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def edge_map(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def degrees(self) -> dict[str, int]:
        deg = dict.fromkeys(self.vertices, 0)
        for e in self.edges:
            deg[e.u] += 1
            deg[e.v] += 1
        return deg

    def degree(self, v: str) -> int:
        return self.degrees[v]

    @cached_property
    def incident(self) -> dict[str, tuple[Edge, ...]]:
        inc: dict[str, list[Edge]] = {v: [] for v in self.vertices}
        for e in self.edges:
            inc[e.u].append(e)
            if not e.is_loop:
                inc[e.v].append(e)
        return {v: tuple(es) for v, es in inc.items()}

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Edge multiplicity matrix with loops dropped (they never move chips)."""
        n = len(self.vertices)
        adj = np.zeros((n, n), dtype=np.int64)
        idx = self.index
        for e in self.edges:
            if not e.is_loop:
                i, j = idx[e.u], idx[e.v]
                adj[i, j] += 1
                adj[j, i] += 1
        adj.setflags(write=False)
        return adj

    @property
    def has_loops(self) -> bool:
        return any(e.is_loop for e in self.edges)

    @property
    def genus(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def bfs_distances(self, root: str) -> np.ndarray:
        cache = self.__dict__.setdefault("_bfs_cache", {})
        if root not in cache:
            idx = self.index
            dist = np.full(len(self.vertices), -1, dtype=np.int64)
            dist[idx[root]] = 0
            frontier = [root]
            while frontier:
                nxt = []
                for v in frontier:
                    for e in self.incident[v]:
                        w = e.v if e.u == v else e.u
                        if dist[idx[w]] < 0:
                            dist[idx[w]] = dist[idx[v]] + 1
                            nxt.append(w)
                frontier = nxt
            dist.setflags(write=False)
            cache[root] = dist
        return cache[root]

    def canonical(self, p: PointLike) -> Point:
        p = _coerce_point(p)
        if p.offset is not None or p.ref not in self.index:
            raise ValidationError(f"{p} is not a vertex of the graph")
        return p


@dataclass(frozen=True)
class MetricGraph:
    """A graph with an exact positive rational length on every edge."""

    graph: Graph
    lengths: tuple[Fraction, ...]

    def __post_init__(self):
        lengths = tuple(as_rational(x) for x in self.lengths)
        object.__setattr__(self, "lengths", lengths)
        if len(lengths) != len(self.graph.edges):
            raise ValidationError("one length per edge required")
        for e, ell in zip(self.graph.edges, lengths):
            if ell <= 0:
                raise ValidationError(f"edge {e.id!r} has non-positive length")

    @classmethod
    def build(cls, vertices: Iterable[str], edges: Iterable[tuple]) -> "MetricGraph":
        """Build from ``(id, u, v, length)`` tuples."""
        edges = list(edges)
        g = Graph(tuple(vertices), tuple(Edge(e[0], e[1], e[2]) for e in edges))
        return cls(g, tuple(e[3] for e in edges))

    @classmethod
    def unit(cls, graph: Graph) -> "MetricGraph":
        return cls(graph, (Fraction(1),) * len(graph.edges))

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.graph.vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self.graph.edges

    @cached_property
    def length_map(self) -> dict[str, Fraction]:
        return {e.id: ell for e, ell in zip(self.graph.edges, self.lengths)}

    def length(self, eid: str) -> Fraction:
        return self.length_map[eid]

    @property
    def genus(self) -> int:
        return self.graph.genus

    def degree(self, v: str) -> int:
        return self.graph.degree(v)

    def canonical(self, p: PointLike) -> Point:
        p = _coerce_point(p)
        if p.offset is None:
            if p.ref not in self.graph.index:
                raise ValidationError(f"unknown vertex {p.ref!r}")
            return p
        e = self.graph.edge_map.get(p.ref)
        if e is None:
            raise ValidationError(f"unknown edge {p.ref!r}")
        off = as_rational(p.offset)
        ell = self.length_map[e.id]
        if off < 0 or off > ell:
            raise ValidationError(f"offset out of range on edge {e.id!r}: {format_rational(off)}")
        if off == 0:
            return Point(e.u)
        if off == ell:
            return Point(e.v)
        return Point(e.id, off)


@dataclass(frozen=True)
class TropicalCurve:
    """A metric graph with unbounded leaf edges attached."""

    metric: MetricGraph
    infinite: tuple[InfiniteEdge, ...]

    def __post_init__(self):
        inf = tuple(x if isinstance(x, InfiniteEdge) else InfiniteEdge(*x) for x in self.infinite)
        object.__setattr__(self, "infinite", inf)
        ids = {e.id for e in self.metric.edges}
        verts = set(self.metric.vertices)
        ends = set()
        for x in inf:
            if x.id in ids:
                raise ValidationError(f"duplicate edge id {x.id!r}")
            ids.add(x.id)
            if x.attach not in verts:
                raise ValidationError(f"infinite edge {x.id!r} attaches to unknown vertex {x.attach!r}")
            if x.end in verts or x.end in ends:
                raise ValidationError(f"unbounded end {x.end!r} must have degree 1")
            ends.add(x.end)

    @cached_property
    def infinite_map(self) -> dict[str, InfiniteEdge]:
        return {x.id: x for x in self.infinite}

    @cached_property
    def end_map(self) -> dict[str, InfiniteEdge]:
        return {x.end: x for x in self.infinite}

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.metric.vertices + tuple(x.end for x in self.infinite)

    @property
    def genus(self) -> int:
        return self.metric.genus

    def degree(self, v: str) -> int:
        if v in self.end_map:
            return 1
        return self.metric.degree(v) + sum(1 for x in self.infinite if x.attach == v)

    def canonical(self, p: PointLike) -> Point:
        p = _coerce_point(p)
        if p.offset is None and p.ref in self.end_map:
            return p
        x = self.infinite_map.get(p.ref) if p.offset is not None else None
        if x is None:
            return self.metric.canonical(p)
        off = as_rational(p.offset)
        if off < 0:
            raise ValidationError(f"offset out of range on edge {x.id!r}: {format_rational(off)}")
        if off == 0:
            return Point(x.attach)
        return Point(x.id, off)


Host = Union[Graph, MetricGraph, TropicalCurve]


def genus(g: Host) -> int:
    """Cyclomatic number of the finite part."""
    return g.genus


def canonical_divisor(g: Host):
    """``sum (deg(v) - 2)(v)``; unbounded ends of a tropical curve get ``-1``."""
    from troprank.divisor import Divisor

    return Divisor(g, {Point(v): g.degree(v) - 2 for v in g.vertices})


def branch_set(g: Graph | MetricGraph, extended: bool = True) -> tuple[Point, ...]:
    """Branching points.

    With ``extended`` (the default used by every enumeration) all vertices
    count, including degree-2 ones.  Otherwise vertices of degree other than
    two, or the single vertex of a lone loop.
    """
    graph = g.graph if isinstance(g, MetricGraph) else g
    if extended:
        return tuple(Point(v) for v in sorted(graph.vertices))
    if len(graph.vertices) == 1 and len(graph.edges) == 1:
        return (Point(graph.vertices[0]),)
    return tuple(Point(v) for v in sorted(graph.vertices) if graph.degree(v) != 2)


@dataclass(frozen=True, eq=False)
class Refinement:
    """A metric graph with extra vertices inserted and lengths rescaled.

    ``graph`` is the refined metric graph; original vertices keep their ids,
    a cut at offset ``c`` on edge ``e`` becomes vertex ``e#k`` and the pieces
    of ``e`` become ``e:0 .. e:k`` (``e`` itself if uncut), oriented like
    ``e``.  Lengths in ``graph`` are ``scale`` times the original ones.
    """

    original: MetricGraph
    graph: MetricGraph
    scale: Fraction
    cuts: dict[str, tuple[Fraction, ...]]
    inserted: dict[str, Point]
    pieces: dict[str, tuple[str, Fraction, Fraction]]

    def forward(self, p: PointLike) -> Point:
        p = self.original.canonical(p)
        if p.offset is None:
            return p
        cuts = self.cuts[p.ref]
        if not cuts:
            return Point(p.ref, p.offset * self.scale)
        k = bisect.bisect_left(cuts, p.offset)
        if k < len(cuts) and cuts[k] == p.offset:
            return Point(f"{p.ref}#{k + 1}")
        start = cuts[k - 1] if k > 0 else Fraction(0)
        return Point(f"{p.ref}:{k}", (p.offset - start) * self.scale)

    def inverse(self, p: PointLike) -> Point:
        p = self.graph.canonical(p)
        if p.offset is None:
            return self.inserted.get(p.ref, p)
        orig, start, _ = self.pieces[p.ref]
        return Point(orig, start + p.offset / self.scale)

    def edge_pieces(self, eid: str) -> list[str]:
        """Refined edge ids covering original edge ``eid`` in order."""
        cuts = self.cuts[eid]
        if not cuts:
            return [eid]
        return [f"{eid}:{k}" for k in range(len(cuts) + 1)]


def refine(g: MetricGraph, points: Iterable[PointLike] = (), scale=1) -> Refinement:
    """Insert ``points`` as degree-2 vertices and multiply lengths by ``scale``."""
    scale = as_rational(scale)
    if scale <= 0:
        raise ValidationError("scale factor must be positive")
    cutsets: dict[str, set] = {e.id: set() for e in g.edges}
    for p in points:
        p = g.canonical(p)
        if p.offset is not None:
            cutsets[p.ref].add(p.offset)
    cuts = {eid: tuple(sorted(s)) for eid, s in cutsets.items()}
    vertices = list(g.vertices)
    edges = []
    inserted: dict[str, Point] = {}
    pieces: dict[str, tuple[str, Fraction, Fraction]] = {}
    for e in g.edges:
        ell = g.length(e.id)
        cs = cuts[e.id]
        if not cs:
            edges.append((e.id, e.u, e.v, ell * scale))
            pieces[e.id] = (e.id, Fraction(0), ell)
            continue
        names = [f"{e.id}#{k + 1}" for k in range(len(cs))]
        for name, c in zip(names, cs):
            vertices.append(name)
            inserted[name] = Point(e.id, c)
        stops = [e.u] + names + [e.v]
        offs = [Fraction(0)] + list(cs) + [ell]
        for k in range(len(cs) + 1):
            pid = f"{e.id}:{k}"
            edges.append((pid, stops[k], stops[k + 1], (offs[k + 1] - offs[k]) * scale))
            pieces[pid] = (e.id, offs[k], offs[k + 1])
    refined = MetricGraph.build(vertices, edges)
    return Refinement(g, refined, scale, cuts, inserted, pieces)


def insert_point(g: MetricGraph, p: PointLike) -> Refinement:
    """Promote an interior point to a degree-2 vertex (identity on vertices)."""
    return refine(g, [p])


def scale_lengths(g: MetricGraph, alpha) -> Refinement:
    """Homothety multiplying every length (and offset) by ``alpha > 0``."""
    alpha = as_rational(alpha)
    if alpha <= 0:
        raise ValidationError("scale factor must be positive")
    return refine(g, [], alpha)


def loop_midpoints(g: MetricGraph) -> tuple[Point, ...]:
    return tuple(Point(e.id, g.length(e.id) / 2) for e in g.edges if e.is_loop)


def eliminate_loops(g: MetricGraph, extra: Iterable[PointLike] = (), integral: bool = False) -> Refinement:
    """Insert loop midpoints (the loop transversal) plus ``extra`` points.

    With ``integral`` the result is rescaled so every length is an integer
    (hence at least one).
    """
    pts = list(loop_midpoints(g)) + list(extra)
    ref = refine(g, pts)
    if not integral:
        return ref
    q = lcm(*(ell.denominator for ell in ref.graph.lengths)) if ref.graph.lengths else 1
    return refine(g, pts, q)


@dataclass(frozen=True, eq=False)
class Subdivision:
    """Unit subdivision of a rational metric graph.

    ``graph`` is a combinatorial graph in which every edge stands for a
    segment of length ``1/factor`` of the original metric graph.
    """

    refinement: Refinement
    factor: int

    @property
    def original(self) -> MetricGraph:
        return self.refinement.original

    @property
    def metric(self) -> MetricGraph:
        return self.refinement.graph

    @property
    def graph(self) -> Graph:
        return self.refinement.graph.graph

    def forward(self, p: PointLike) -> str:
        q = self.refinement.forward(p)
        if q.offset is not None:
            raise ValidationError(f"{p} is not on the subdivision grid")
        return q.ref

    def inverse(self, v: str) -> Point:
        return self.refinement.inverse(Point(v))

    @cached_property
    def forward_map(self) -> dict[Point, str]:
        return {self.inverse(v): v for v in self.graph.vertices}

    @cached_property
    def inverse_map(self) -> dict[str, Point]:
        return {v: self.inverse(v) for v in self.graph.vertices}

    def push(self, d):
        """Transport a divisor supported on grid points to :attr:`graph`."""
        from troprank.divisor import Divisor

        return Divisor(self.graph, {Point(self.forward(p)): c for p, c in d.items()})

    def pull(self, d):
        from troprank.divisor import Divisor

        return Divisor(self.original, {self.inverse(p.ref): c for p, c in d.items()})


@lru_cache(maxsize=256)
def _unit_subdivision(g: MetricGraph, marked: frozenset) -> Subdivision:
    offsets = [p.offset for p in marked if p.offset is not None]
    q = lcm(*(x.denominator for x in list(g.lengths) + offsets)) if (g.lengths or offsets) else 1
    grid = []
    for e in g.edges:
        steps = g.length(e.id) * q
        grid.extend(Point(e.id, Fraction(k, q)) for k in range(1, int(steps)))
    ref = refine(g, grid, q)
    return Subdivision(ref, q)


def unit_subdivision(g: MetricGraph | Graph, marked: Iterable[PointLike] = ()) -> Subdivision:
    """Scale by the lcm ``q`` of all denominators and split into unit edges.

    Every vertex and every marked point lands on a vertex of the output.
    """
    if isinstance(g, Graph):
        g = MetricGraph.unit(g)
    marks = frozenset(g.canonical(p) for p in marked)
    return _unit_subdivision(g, marks)


def subdivide(g: Graph, k: int) -> Graph:
    """The graph ``G^k``: every edge replaced by a path with ``k`` inner vertices."""
    if k < 0:
        raise ValidationError("k must be non-negative")
    if k == 0:
        return g
    metric = MetricGraph(g, (Fraction(k + 1),) * len(g.edges))
    return unit_subdivision(metric).graph


def retract(c: TropicalCurve, d):
    """Collapse infinite edges onto their attachment vertices.

    Returns the finite metric graph and the retracted divisor.
    """
    from troprank.divisor import Divisor

    if isinstance(c, MetricGraph):
        return c, d.rehost(c)
    chips: dict[Point, int] = {}
    for p, k in d.items():
        if p.offset is None and p.ref in c.end_map:
            q = Point(c.end_map[p.ref].attach)
        elif p.offset is not None and p.ref in c.infinite_map:
            q = Point(c.infinite_map[p.ref].attach)
        else:
            q = p
        chips[q] = chips.get(q, 0) + k
    return c.metric, Divisor(c.metric, chips)
