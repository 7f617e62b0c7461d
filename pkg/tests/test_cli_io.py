import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from fuzzing import mutate
from troprank.cli_io import ParseError, parse, rank_data, serialize, to_json
from troprank.corpus import banana
from troprank.divisor import Divisor
from troprank.rank import rank_graph
from troprank.topology import Point, TropicalCurve

DATA = Path(__file__).parent / "data"
DOCS = sorted(DATA.glob("*.tg"))


@pytest.mark.parametrize("path", DOCS, ids=lambda p: p.name)
def test_round_trip_byte_identical(path):
    text = path.read_text()
    assert serialize(parse(text)) == text


def test_edge_length_and_chips():
    doc = parse("metricgraph g\nvertex v0\nvertex v1\nedge e1 v0 v1 3/2\ndivisor D on g\nchip e1@3/4 2\nchip v0 -1\n")
    g = doc.hosts["g"]
    assert g.length("e1") == Fraction(3, 2)
    assert doc.divisor("D") == Divisor(g, {Point("e1", Fraction(3, 4)): 2, "v0": -1})


def test_serialize_examples():
    doc = parse("metricgraph g\nvertex v0\ndivisor D on g\nchip v0 2\ndivisor Z on g\n")
    assert serialize(doc).split("\n\n")[1] == "divisor D on g\nchip v0 2"
    assert serialize(doc).split("\n\n")[2] == "divisor Z on g\n"
    doc = parse("metricgraph g\nvertex a\nvertex b\nedge e a b 4/8\n")
    assert "edge e a b 1/2" in serialize(doc)


def test_comments_and_hash_ids():
    doc = parse("# header\nmetricgraph g  # trailing\nvertex a\nvertex b\nedge e#1 a b 1\n")
    assert doc.hosts["g"].edges[0].id == "e#1"


def test_serialize_normalizes():
    messy = "metricgraph g\nvertex b\nvertex a\nedge e b a 2/4\ndivisor D on g\nchip a 1\nchip e@1/4 1\nchip a 1\n"
    once = serialize(parse(messy))
    assert serialize(parse(once)) == once
    assert "chip a 2" in once


def test_tropical_document():
    doc = parse((DATA / "tropical.tg").read_text())
    assert isinstance(doc.hosts["curve"], TropicalCurve)
    assert doc.divisor("D").degree == 2


@pytest.mark.parametrize(
    "text, line, needle",
    [
        ("metricgraph g\nvertex v0\nvertex v1\nedge e1 v0 v1 3/2\ndivisor D on g\nchip e1@5/2 1\n", 6, "offset out of range"),
        ("divisor D on nowhere\n", 1, "unknown host"),
        ("metricgraph g\nvertex a\nvertex b\nedge e a b 1.5\n", 4, "length"),
        ("metricgraph g\nvertex a\nvertex b\n", 1, "disconnected"),
        ("metricgraph g\nvertex a\nvertex a\n", 3, "duplicate"),
        ("metricgraph g\nvertex a\nvertex b\nedge e a b 1\nedge e a b 2\n", 5, "duplicate"),
        ("metricgraph g\nvertex a\nmetricgraph g\nvertex a\n", 3, "duplicate"),
        ("metricgraph g\nvertex a\nvertex b\nedge e a b 1\ndivisor D on g\nchip a x\n", 6, "integer"),
        ("metricgraph g\nvertex a\nvertex b\nedge e a b 1\nedge x a u inf\nedge y u b 1\n", 6, "degree 1"),
        ("bogus\n", 1, "unknown keyword"),
    ],
)
def test_errors_carry_position(text, line, needle):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.line == line
    assert info.value.column >= 1
    assert needle in str(info.value)
    assert str(info.value).startswith(f"line {line}, column ")


def test_fuzzed_documents_only_raise_parse_errors():
    rng = random.Random(0)
    texts = [p.read_text() for p in DOCS]
    for _ in range(300):
        bad = mutate(rng.choice(texts), rng)
        try:
            doc = parse(bad)
        except ParseError as exc:
            assert exc.line >= 1 and exc.column >= 1
        else:
            assert serialize(parse(serialize(doc))) == serialize(doc)


def test_json_is_stable_and_versioned():
    g = banana(3)
    res = rank_graph(g, Divisor(g, {"v0": 1, "v1": 1}))
    text = to_json(rank_data(res))
    data = json.loads(text)
    assert data["format"] == 1
    assert data["rank"] == 1 and data["exact"] is True
    assert text == to_json(rank_data(res))
    assert list(data) == sorted(data)
