"""Permutations of points, their segments and the divisors ``nu_P``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable

from troprank.divisor import Divisor
from troprank.topology import Graph, MetricGraph, Point, ValidationError

__all__ = ["Permutation", "PSegment", "segments", "nu_divisor", "reverse_perm", "insert_into_perm"]


@dataclass(frozen=True)
class PSegment:
    """A piece of edge ``edge`` between consecutive support points ``a`` and ``b``.

    ``start`` and ``stop`` are the offsets of the ends along the edge.
    """

    edge: str
    a: Point
    b: Point
    start: Fraction
    stop: Fraction

    def contains(self, offset: Fraction) -> bool:
        return self.start < offset < self.stop


@dataclass(frozen=True, eq=False)
class Permutation:
    """An ordering of finitely many distinct points of a metric graph.

    The support must contain every vertex and at least one interior point
    of every loop.
    """

    host: MetricGraph
    points: tuple[Point, ...]

    def __post_init__(self):
        host = self.host
        if isinstance(host, Graph):
            host = MetricGraph.unit(host)
            object.__setattr__(self, "host", host)
        pts = tuple(host.canonical(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(set(pts)) != len(pts):
            raise ValidationError("permutation repeats a point")
        present = set(pts)
        missing = [v for v in host.vertices if Point(v) not in present]
        if missing:
            raise ValidationError(f"permutation misses branch point {missing[0]!r}")
        on_edge = {p.ref for p in pts if p.offset is not None}
        for e in host.edges:
            if e.is_loop and e.id not in on_edge:
                raise ValidationError(f"permutation has no transversal point on loop {e.id!r}")

    @cached_property
    def position(self) -> dict[Point, int]:
        return {p: i for i, p in enumerate(self.points)}

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.points == other.points and self.host == other.host

    def __hash__(self) -> int:
        return hash(self.points)

    def __str__(self) -> str:
        return " ".join(str(p) for p in self.points)


def segments(p: Permutation) -> list[PSegment]:
    """Cut every edge at the support points lying on it."""
    host = p.host
    cuts: dict[str, list[Fraction]] = {e.id: [] for e in host.edges}
    for q in p.points:
        if q.offset is not None:
            cuts[q.ref].append(q.offset)
    out = []
    for e in host.edges:
        ell = host.length(e.id)
        offs = [Fraction(0)] + sorted(cuts[e.id]) + [ell]
        stops = [Point(e.u)] + [Point(e.id, o) for o in offs[1:-1]] + [Point(e.v)]
        for k in range(len(offs) - 1):
            out.append(PSegment(e.id, stops[k], stops[k + 1], offs[k], offs[k + 1]))
    return out


def nu_divisor(p: Permutation) -> Divisor:
    """``nu_P(v)``: segments at ``v`` whose other end comes earlier, minus one."""
    pos = p.position
    chips = {q: -1 for q in p.points}
    for s in segments(p):
        if pos[s.a] < pos[s.b]:
            chips[s.b] += 1
        else:
            chips[s.a] += 1
    return Divisor._raw(p.host, {q: k for q, k in chips.items() if k})


def reverse_perm(p: Permutation) -> Permutation:
    return Permutation(p.host, p.points[::-1])


def insert_into_perm(p: Permutation, point, slot: int = 0) -> Permutation:
    """Insert a point outside the support without changing ``nu_P``.

    The new point goes strictly after the earlier end of its segment and no
    later than the other end; ``slot`` picks one of those positions.
    """
    q = p.host.canonical(point)
    if q in p.position:
        raise ValidationError(f"{q} is already in the permutation")
    if q.offset is None:
        raise ValidationError("every vertex is already in the permutation")
    seg = next(s for s in segments(p) if s.edge == q.ref and s.contains(q.offset))
    lo, hi = sorted((p.position[seg.a], p.position[seg.b]))
    gap = hi - lo
    if not 0 <= slot < gap:
        raise ValidationError(f"slot must lie in [0, {gap})")
    pts = list(p.points)
    pts.insert(lo + 1 + slot, q)
    return Permutation(p.host, tuple(pts))


def permutation_from(host, points: Iterable) -> Permutation:
    return Permutation(host, tuple(points))
