"""The ``.tg`` text format and JSON views of results.

A document is a sequence of blocks::

    metricgraph G
    vertex v0
    vertex v1
    edge e1 v0 v1 3/2
    edge r1 v1 end1 inf

    divisor D on G
    chip v1 3
    chip e1@1/2 -1

    perm P on G: v0 v1

``#`` starts a comment.  An ``inf`` edge makes its second endpoint an
unbounded end, which must not meet any other edge.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from troprank.divisor import Divisor
from troprank.permutation import Permutation
from troprank.plfunc import describe
from troprank.topology import (
    Edge,
    Graph,
    InfiniteEdge,
    MetricGraph,
    Point,
    TropicalCurve,
    ValidationError,
    as_rational,
    format_rational,
)

__all__ = ["ParseError", "Document", "parse", "serialize", "to_json", "divisor_data", "rank_data"]

FORMAT_VERSION = 1
_TOKEN = re.compile(r"\S+")
_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_.#\-]*$")


class ParseError(ValidationError):
    """A document error tagged with a 1-based line and column."""

    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


@dataclass
class Document:
    """Named hosts, divisors and permutations in declaration order."""

    hosts: dict[str, MetricGraph | TropicalCurve] = field(default_factory=dict)
    divisors: dict[str, tuple[str, Divisor]] = field(default_factory=dict)
    perms: dict[str, tuple[str, Permutation]] = field(default_factory=dict)
    order: list[tuple[str, str]] = field(default_factory=list)

    def host_of(self, name: str):
        if name in self.divisors:
            return self.hosts[self.divisors[name][0]]
        if name in self.perms:
            return self.hosts[self.perms[name][0]]
        raise ValidationError(f"unknown divisor or permutation {name!r}")

    def divisor(self, name: str) -> Divisor:
        if name not in self.divisors:
            raise ValidationError(f"unknown divisor {name!r}")
        return self.divisors[name][1]

    def perm(self, name: str) -> Permutation:
        if name not in self.perms:
            raise ValidationError(f"unknown permutation {name!r}")
        return self.perms[name][1]


# ------------------------------------------------------------------ parse


class _Line:
    def __init__(self, number: int, text: str):
        self.number = number
        # '#' opens a comment only at the start of a token, so ids like e#1 survive
        m = re.search(r"(^|\s)#", text)
        body = text if m is None else text[: m.start()]
        self.tokens = [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]

    def error(self, k: int, message: str) -> ParseError:
        col = self.tokens[k][1] if k < len(self.tokens) else (self.tokens[-1][1] if self.tokens else 1)
        return ParseError(self.number, col, message)


class _GraphBlock:
    def __init__(self, name: str, line: _Line):
        self.name = name
        self.line = line
        self.vertices: dict[str, _Line] = {}
        self.edges: list[tuple[_Line, str, str, str, Fraction | None]] = []


def _ident(line: _Line, k: int, what: str) -> str:
    if k >= len(line.tokens):
        raise line.error(k, f"missing {what}")
    tok = line.tokens[k][0]
    if not _ID.match(tok):
        raise line.error(k, f"invalid {what} {tok!r}")
    return tok


def _arity(line: _Line, n: int, usage: str):
    if len(line.tokens) != n:
        k = min(len(line.tokens), n)
        raise line.error(k, f"expected: {usage}")


def _finish_graph(doc: Document, blk: _GraphBlock):
    finite = [(ln, eid, u, v, ell) for ln, eid, u, v, ell in blk.edges if ell is not None]
    infinite = [(ln, eid, u, v) for ln, eid, u, v, ell in blk.edges if ell is None]
    ends = {}
    for ln, eid, u, v in infinite:
        if v in ends:
            raise ln.error(3, f"unbounded end {v!r} must have degree 1")
        ends[v] = ln
    for ln, eid, u, v, _ in finite:
        for k, x in ((2, u), (3, v)):
            if x in ends:
                raise ln.error(k, f"unbounded end {x!r} must have degree 1")
    verts = [v for v in blk.vertices if v not in ends]
    known = set(verts)
    for ln, eid, u, v, _ in finite:
        for k, x in ((2, u), (3, v)):
            if x not in known:
                raise ln.error(k, f"unknown vertex {x!r}")
    for ln, eid, u, v in infinite:
        if u not in known:
            raise ln.error(2, f"unknown vertex {u!r}")
        if u in ends:
            raise ln.error(2, f"unbounded end {u!r} must have degree 1")
    try:
        graph = Graph(tuple(verts), tuple(Edge(eid, u, v) for _, eid, u, v, _ in finite))
        metric = MetricGraph(graph, tuple(ell for *_, ell in finite))
        host = metric
        if infinite:
            host = TropicalCurve(metric, tuple(InfiniteEdge(eid, u, v) for _, eid, u, v in infinite))
    except ValidationError as exc:
        raise blk.line.error(1, str(exc)) from None
    doc.hosts[blk.name] = host


def _declare(doc: Document, line: _Line, name: str, kind: str):
    if name in doc.hosts or name in doc.divisors or name in doc.perms or any(n == name for _, n in doc.order):
        raise line.error(1, f"duplicate id {name!r}")
    doc.order.append((kind, name))


def _host_ref(doc: Document, line: _Line, k: int) -> str:
    name = _ident(line, k, "host name")
    if name not in doc.hosts:
        raise line.error(k, f"unknown host {name!r}")
    return name


def _point(host, line: _Line, k: int) -> Point:
    tok = line.tokens[k][0]
    try:
        p = Point.parse(tok)
    except ValidationError as exc:
        raise line.error(k, str(exc)) from None
    if p.offset is not None:
        ell = _edge_length(host, p.ref)
        if ell is False:
            raise line.error(k, f"unknown edge {p.ref!r}")
        if p.offset <= 0 or (ell is not None and p.offset >= ell):
            raise line.error(k, f"offset out of range on edge {p.ref!r}")
    try:
        return host.canonical(p)
    except ValidationError as exc:
        raise line.error(k, str(exc)) from None


def _edge_length(host, eid: str):
    """Length of ``eid``; ``None`` for an infinite edge, ``False`` if unknown."""
    metric = host.metric if isinstance(host, TropicalCurve) else host
    if eid in metric.length_map:
        return metric.length(eid)
    if isinstance(host, TropicalCurve) and eid in host.infinite_map:
        return None
    return False


def parse(text: str) -> Document:
    """Parse a ``.tg`` document; every error names a line and column."""
    doc = Document()
    graph: _GraphBlock | None = None
    div: tuple[str, str, dict] | None = None

    def close():
        nonlocal graph, div
        if graph is not None:
            _finish_graph(doc, graph)
            graph = None
        if div is not None:
            name, host_name, chips = div
            doc.divisors[name] = (host_name, Divisor(doc.hosts[host_name], chips))
            div = None

    for number, raw in enumerate(text.splitlines(), start=1):
        line = _Line(number, raw)
        if not line.tokens:
            continue
        kw = line.tokens[0][0]
        if kw == "metricgraph":
            close()
            _arity(line, 2, "metricgraph NAME")
            name = _ident(line, 1, "graph name")
            _declare(doc, line, name, "host")
            graph = _GraphBlock(name, line)
        elif kw == "vertex":
            if graph is None:
                raise line.error(0, "vertex outside a metricgraph block")
            _arity(line, 2, "vertex ID")
            vid = _ident(line, 1, "vertex id")
            if vid in graph.vertices:
                raise line.error(1, f"duplicate id {vid!r}")
            graph.vertices[vid] = line
        elif kw == "edge":
            if graph is None:
                raise line.error(0, "edge outside a metricgraph block")
            _arity(line, 5, "edge ID U V LENGTH")
            eid = _ident(line, 1, "edge id")
            if any(e[1] == eid for e in graph.edges) or eid in graph.vertices:
                raise line.error(1, f"duplicate id {eid!r}")
            u = _ident(line, 2, "vertex id")
            v = _ident(line, 3, "vertex id")
            tok = line.tokens[4][0]
            if tok == "inf":
                ell = None
            else:
                try:
                    ell = as_rational(tok)
                except ValidationError:
                    raise line.error(4, f"non-rational length {tok!r}") from None
                if ell <= 0:
                    raise line.error(4, f"length must be positive, got {tok!r}")
            graph.edges.append((line, eid, u, v, ell))
        elif kw == "divisor":
            close()
            if len(line.tokens) != 4 or line.tokens[2][0] != "on":
                raise line.error(min(len(line.tokens), 2), "expected: divisor NAME on GRAPH")
            name = _ident(line, 1, "divisor name")
            host_name = _host_ref(doc, line, 3)
            _declare(doc, line, name, "divisor")
            div = (name, host_name, {})
        elif kw == "chip":
            if div is None:
                raise line.error(0, "chip outside a divisor block")
            _arity(line, 3, "chip POINT INT")
            host = doc.hosts[div[1]]
            p = _point(host, line, 1)
            tok = line.tokens[2][0]
            if not re.fullmatch(r"[+-]?\d+", tok):
                raise line.error(2, f"chip count must be an integer, got {tok!r}")
            div[2][p] = div[2].get(p, 0) + int(tok)
        elif kw == "perm":
            close()
            usage = "expected: perm NAME on GRAPH: POINT ..."
            toks = [t for t, _ in line.tokens]
            if len(toks) >= 4 and toks[3].endswith(":") and toks[3] != ":":
                gname, first = toks[3][:-1], 4
            elif len(toks) >= 5 and toks[4] == ":":
                gname, first = toks[3], 5
            else:
                raise line.error(min(len(toks), 3), usage)
            if toks[2] != "on":
                raise line.error(2, usage)
            name = _ident(line, 1, "permutation name")
            if gname not in doc.hosts:
                raise line.error(3, f"unknown host {gname!r}")
            host = doc.hosts[gname]
            if isinstance(host, TropicalCurve):
                raise line.error(3, "permutations live on metric graphs")
            pts = [_point(host, line, k) for k in range(first, len(toks))]
            _declare(doc, line, name, "perm")
            try:
                doc.perms[name] = (gname, Permutation(host, tuple(pts)))
            except ValidationError as exc:
                raise line.error(first, str(exc)) from None
        else:
            raise line.error(0, f"unknown keyword {kw!r}")
    close()
    return doc


# -------------------------------------------------------------- serialize


def _graph_lines(name: str, host) -> list[str]:
    metric = host.metric if isinstance(host, TropicalCurve) else host
    out = [f"metricgraph {name}"]
    out += [f"vertex {v}" for v in sorted(metric.vertices)]
    edges = [(e.id, f"edge {e.id} {e.u} {e.v} {format_rational(metric.length(e.id))}") for e in metric.edges]
    if isinstance(host, TropicalCurve):
        edges += [(x.id, f"edge {x.id} {x.attach} {x.end} inf") for x in host.infinite]
    out += [text for _, text in sorted(edges)]
    return out


def _divisor_lines(name: str, host_name: str, d: Divisor) -> list[str]:
    return [f"divisor {name} on {host_name}"] + [f"chip {p} {k}" for p, k in d.items()]


def serialize(doc: Document) -> str:
    """Canonical text: declaration order, sorted vertices, edges and chips."""
    blocks = []
    for kind, name in doc.order:
        if kind == "host":
            blocks.append("\n".join(_graph_lines(name, doc.hosts[name])))
        elif kind == "divisor":
            host_name, d = doc.divisors[name]
            blocks.append("\n".join(_divisor_lines(name, host_name, d)))
        else:
            host_name, p = doc.perms[name]
            blocks.append(f"perm {name} on {host_name}: " + " ".join(str(q) for q in p.points))
    return "\n\n".join(blocks) + "\n" if blocks else ""


# ------------------------------------------------------------------- JSON


def divisor_data(d: Divisor | None):
    if d is None:
        return None
    return {str(p): k for p, k in d.items()}


def rank_data(res) -> dict:
    cert = None
    if res.certificate is not None:
        c = res.certificate
        cert = {
            "divisor": divisor_data(c.divisor),
            "permutation": [str(p) for p in c.permutation.points],
            "function": describe(c.function),
            "term": c.term,
        }
    return {
        "rank": res.rank,
        "exact": res.exact,
        "method": res.method,
        "witness": divisor_data(res.witness_unreachable),
        "certificate": cert,
        "stats": dict(res.stats),
    }


def to_json(payload: dict) -> str:
    """Byte-stable JSON with the format version attached."""
    body = dict(payload)
    body["format"] = FORMAT_VERSION
    return json.dumps(body, sort_keys=True, indent=2)
