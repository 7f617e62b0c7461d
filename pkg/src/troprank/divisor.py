"""Divisors: finitely supported integer combinations of points."""

from __future__ import annotations

from typing import Iterable, Mapping

from troprank.topology import Point, ValidationError

__all__ = ["Divisor", "degree", "deg_plus", "combine"]


class Divisor:
    """An element of the free abelian group on the points of ``host``.

    Chips are stored sparsely, keyed by canonical points, with zero values
    dropped.  Iteration is sorted (vertices by id, then interior points by
    edge id and offset) so that printing and serialization are stable.
    """

    __slots__ = ("host", "_chips")

    def __init__(self, host, chips: Mapping | Iterable = ()):
        self.host = host
        acc: dict[Point, int] = {}
        items = chips.items() if isinstance(chips, Mapping) else chips
        for p, k in items:
            if isinstance(k, bool) or not isinstance(k, int):
                try:
                    if int(k) != k:
                        raise ValueError
                    k = int(k)
                except (TypeError, ValueError):
                    raise ValidationError(f"chip count must be an integer, got {k!r}") from None
            q = host.canonical(p)
            acc[q] = acc.get(q, 0) + k
        self._chips = {p: acc[p] for p in sorted(acc) if acc[p] != 0}

    @classmethod
    def _raw(cls, host, chips: dict[Point, int]) -> "Divisor":
        # trusted constructor: canonical points, no zeros
        d = cls.__new__(cls)
        d.host = host
        d._chips = {p: chips[p] for p in sorted(chips)}
        return d

    def __getitem__(self, p) -> int:
        return self._chips.get(self.host.canonical(p), 0)

    def items(self):
        return self._chips.items()

    def __iter__(self):
        return iter(self._chips)

    def __len__(self) -> int:
        return len(self._chips)

    @property
    def support(self) -> tuple[Point, ...]:
        return tuple(self._chips)

    @property
    def degree(self) -> int:
        return sum(self._chips.values())

    @property
    def deg_plus(self) -> int:
        return sum(k for k in self._chips.values() if k > 0)

    def is_effective(self) -> bool:
        return all(k >= 0 for k in self._chips.values())

    def is_zero(self) -> bool:
        return not self._chips

    def is_vertex_supported(self) -> bool:
        return all(p.offset is None for p in self._chips)

    def positive_part(self) -> "Divisor":
        return Divisor._raw(self.host, {p: k for p, k in self._chips.items() if k > 0})

    def _check_host(self, other: "Divisor"):
        if self.host is not other.host and self.host != other.host:
            raise ValidationError("divisors live on different hosts")

    def __add__(self, other: "Divisor") -> "Divisor":
        return combine(1, self, 1, other)

    def __sub__(self, other: "Divisor") -> "Divisor":
        return combine(1, self, -1, other)

    def __neg__(self) -> "Divisor":
        return Divisor._raw(self.host, {p: -k for p, k in self._chips.items()})

    def __rmul__(self, a: int) -> "Divisor":
        if a == 0:
            return Divisor._raw(self.host, {})
        return Divisor._raw(self.host, {p: a * k for p, k in self._chips.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, Divisor):
            return NotImplemented
        return self._chips == other._chips and (self.host is other.host or self.host == other.host)

    def __hash__(self) -> int:
        return hash(tuple(self._chips.items()))

    def rehost(self, host) -> "Divisor":
        """The same chips viewed on another host that has these points."""
        return Divisor(host, self._chips)

    def map(self, fn, host) -> "Divisor":
        """Push the chips forward along a point map into ``host``."""
        return Divisor(host, ((fn(p), k) for p, k in self._chips.items()))

    def __str__(self) -> str:
        if not self._chips:
            return "0"
        parts = []
        for p, k in self._chips.items():
            mag = abs(k)
            term = f"({p})" if mag == 1 else f"{mag}({p})"
            if not parts:
                parts.append(term if k > 0 else f"-{term}")
            else:
                parts.append(("+ " if k > 0 else "- ") + term)
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Divisor({self})"


def degree(d: Divisor) -> int:
    return d.degree


def deg_plus(d: Divisor) -> int:
    return d.deg_plus


def combine(a: int, d1: Divisor, b: int, d2: Divisor) -> Divisor:
    """``a*d1 + b*d2`` on a common host."""
    d1._check_host(d2)
    acc = {p: a * k for p, k in d1.items()} if a else {}
    if b:
        for p, k in d2.items():
            acc[p] = acc.get(p, 0) + b * k
    return Divisor._raw(d1.host, {p: k for p, k in acc.items() if k != 0})
