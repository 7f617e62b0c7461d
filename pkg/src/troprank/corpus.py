"""Small graphs and divisors for tests, benchmarks and the ``selftest`` command."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Iterator

from troprank.divisor import Divisor
from troprank.topology import Graph, MetricGraph, Point, _UnionFind

__all__ = [
    "multigraphs",
    "banana",
    "cycle",
    "path",
    "complete",
    "bouquet",
    "vertex_divisors",
    "random_divisor",
    "with_lengths",
    "random_permutation",
]


def _connected(n: int, pairs) -> bool:
    uf = _UnionFind(range(n))
    comps = n
    for a, b in pairs:
        if uf.union(a, b):
            comps -= 1
    return comps == 1


def _canonical_form(n: int, pairs) -> tuple:
    best = None
    for perm in itertools.permutations(range(n)):
        form = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in pairs))
        if best is None or form < best:
            best = form
    return best


def _build(n: int, pairs) -> Graph:
    verts = tuple(f"v{i}" for i in range(n))
    edges = tuple((f"e{k + 1}", f"v{a}", f"v{b}") for k, (a, b) in enumerate(pairs))
    return Graph(verts, edges)


def multigraphs(max_vertices: int, max_edges: int, loops: bool = False, min_vertices: int = 1) -> list[Graph]:
    """Connected multigraphs up to isomorphism, in a fixed order.

    Sorted by vertex count, then edge count, then canonical edge list.
    """
    out = []
    for n in range(min_vertices, max_vertices + 1):
        kinds = [(a, b) for a in range(n) for b in range(a, n) if loops or a != b]
        for m in range(n - 1, max_edges + 1):
            seen = set()
            for pairs in itertools.combinations_with_replacement(kinds, m):
                if not _connected(n, pairs):
                    continue
                form = _canonical_form(n, pairs)
                if form in seen:
                    continue
                seen.add(form)
            out.extend(_build(n, form) for form in sorted(seen))
    return out


def banana(k: int = 3) -> Graph:
    return Graph(("v0", "v1"), tuple((f"e{i + 1}", "v0", "v1") for i in range(k)))


def cycle(n: int) -> Graph:
    verts = tuple(f"v{i}" for i in range(n))
    if n == 1:
        return Graph(verts, (("e1", "v0", "v0"),))
    return Graph(verts, tuple((f"e{i + 1}", f"v{i}", f"v{(i + 1) % n}") for i in range(n)))


def path(n: int) -> Graph:
    verts = tuple(f"v{i}" for i in range(n))
    return Graph(verts, tuple((f"e{i + 1}", f"v{i}", f"v{i + 1}") for i in range(n - 1)))


def complete(n: int) -> Graph:
    verts = tuple(f"v{i}" for i in range(n))
    pairs = itertools.combinations(range(n), 2)
    return Graph(verts, tuple((f"e{k + 1}", f"v{a}", f"v{b}") for k, (a, b) in enumerate(pairs)))


def bouquet(k: int) -> Graph:
    return Graph(("v0",), tuple((f"e{i + 1}", "v0", "v0") for i in range(k)))


def vertex_divisors(g: Graph, low: int, high: int) -> Iterator[Divisor]:
    """All vertex divisors with values in ``[low, high]``."""
    for vals in itertools.product(range(low, high + 1), repeat=len(g.vertices)):
        yield Divisor(g, {Point(v): k for v, k in zip(g.vertices, vals)})


def random_divisor(g, rng: random.Random, low: int = -2, high: int = 3, interior: int = 0) -> Divisor:
    """Random values on the vertices plus ``interior`` random edge points.

    Interior offsets are multiples of a quarter of the edge length.
    """
    chips = {Point(v): rng.randint(low, high) for v in g.vertices}
    if interior and isinstance(g, MetricGraph) and g.edges:
        for _ in range(interior):
            e = rng.choice(g.edges)
            off = g.length(e.id) * Fraction(rng.randint(1, 3), 4)
            p = Point(e.id, off)
            chips[p] = chips.get(p, 0) + rng.randint(low, high)
    return Divisor(g, chips)


def with_lengths(g: Graph, lengths) -> MetricGraph:
    return MetricGraph(g, tuple(Fraction(x) for x in lengths))


def random_permutation(g, rng: random.Random, extra: int = 2):
    """A shuffled permutation of the vertices, one point per loop and ``extra`` edge points."""
    from troprank.permutation import Permutation

    m = MetricGraph.unit(g) if isinstance(g, Graph) else g
    pts = {Point(v) for v in m.vertices}
    for e in m.edges:
        if e.is_loop:
            pts.add(Point(e.id, m.length(e.id) * Fraction(rng.randint(1, 3), 4)))
    for _ in range(extra if m.edges else 0):
        e = rng.choice(m.edges)
        pts.add(Point(e.id, m.length(e.id) * Fraction(rng.randint(1, 7), 8)))
    order = sorted(pts, key=Point.sort_key)
    rng.shuffle(order)
    return Permutation(m, tuple(order))
