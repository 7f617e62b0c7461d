from fractions import Fraction

import pytest

from troprank.corpus import banana, bouquet, cycle, path
from troprank.divisor import Divisor
from troprank.topology import (
    Graph,
    InfiniteEdge,
    MetricGraph,
    Point,
    TropicalCurve,
    ValidationError,
    as_rational,
    branch_set,
    canonical_divisor,
    eliminate_loops,
    format_rational,
    genus,
    insert_point,
    retract,
    scale_lengths,
    subdivide,
    unit_subdivision,
)


def test_as_rational_accepts_exact_inputs():
    assert as_rational(3) == 3
    assert as_rational("4/8") == Fraction(1, 2)
    assert as_rational(Fraction(3, 2)) == Fraction(3, 2)


@pytest.mark.parametrize("bad", [0.5, True, "x", "1/0", None, "1.5", "1e3", "1_0"])
def test_as_rational_rejects(bad):
    with pytest.raises(ValidationError):
        as_rational(bad)


def test_format_rational_lowest_terms():
    assert format_rational(Fraction(4, 8)) == "1/2"
    assert format_rational(Fraction(6, 3)) == "2"


def test_point_parse_and_str():
    p = Point.parse("e1@3/2")
    assert p == Point("e1", Fraction(3, 2))
    assert str(p) == "e1@3/2"
    assert str(Point.parse("v0")) == "v0"


def test_graph_validation():
    with pytest.raises(ValidationError, match="disconnected"):
        Graph(("a", "b"), ())
    with pytest.raises(ValidationError, match="duplicate"):
        Graph(("a", "a"), ())
    with pytest.raises(ValidationError, match="unknown vertex"):
        Graph(("a",), (("e", "a", "b"),))
    with pytest.raises(ValidationError):
        Graph((), ())


def test_genus_examples():
    assert genus(banana(3)) == 2
    assert genus(cycle(4)) == 1
    assert genus(path(5)) == 0
    assert genus(bouquet(3)) == 3


def test_degree_counts_loops_twice():
    g = bouquet(2)
    assert g.degree("v0") == 4
    assert canonical_divisor(g) == Divisor(g, {"v0": 2})


def test_canonical_divisor_degree():
    for g in (banana(3), cycle(3), path(3), bouquet(2)):
        assert canonical_divisor(g).degree == 2 * g.genus - 2


def test_metric_canonical_points():
    m = MetricGraph.build(("a", "b"), (("e", "a", "b", Fraction(3, 2)),))
    assert m.canonical(Point("e", 0)) == Point("a")
    assert m.canonical(Point("e", Fraction(3, 2))) == Point("b")
    with pytest.raises(ValidationError, match="offset out of range"):
        m.canonical(Point("e", Fraction(5, 2)))
    with pytest.raises(ValidationError, match="non-positive"):
        MetricGraph.build(("a", "b"), (("e", "a", "b", 0),))


def test_branch_set():
    g = path(3)
    assert branch_set(g, extended=False) == (Point("v0"), Point("v2"))
    assert branch_set(g) == tuple(Point(v) for v in g.vertices)
    assert branch_set(cycle(1), extended=False) == (Point("v0"),)


def test_insert_point_round_trip():
    m = MetricGraph.build(("a", "b"), (("e", "a", "b", 3),))
    ref = insert_point(m, Point("e", 1))
    assert len(ref.graph.vertices) == 3
    assert ref.forward(Point("e", 1)) == Point("e#1")
    q = Point("e", Fraction(5, 2))
    assert ref.inverse(ref.forward(q)) == q
    assert sorted(ref.graph.lengths) == [1, 2]


def test_scale_lengths():
    m = MetricGraph.build(("a", "b"), (("e", "a", "b", 3),))
    ref = scale_lengths(m, Fraction(1, 3))
    assert ref.graph.lengths == (Fraction(1),)
    assert ref.forward(Point("e", 1)) == Point("e", Fraction(1, 3))
    with pytest.raises(ValidationError):
        scale_lengths(m, 0)


def test_eliminate_loops_integral():
    m = MetricGraph.build(("a",), (("e", "a", "a", 1),))
    ref = eliminate_loops(m, integral=True)
    assert not ref.graph.graph.has_loops
    assert all(x.denominator == 1 for x in ref.graph.lengths)
    assert ref.graph.genus == 1


def test_unit_subdivision_marks_points():
    m = MetricGraph.build(("a", "b"), (("e", "a", "b", Fraction(3, 2)),))
    sub = unit_subdivision(m, [Point("e", Fraction(1, 4))])
    assert sub.factor == 4
    assert len(sub.graph.vertices) == 7
    v = sub.forward(Point("e", Fraction(1, 4)))
    assert sub.inverse(v) == Point("e", Fraction(1, 4))


def test_subdivide_counts():
    g = banana(3)
    for k in (1, 2, 3):
        h = subdivide(g, k)
        assert len(h.vertices) == 2 + 3 * k
        assert h.genus == g.genus


def test_tropical_curve_and_retract():
    m = MetricGraph.build(("a", "b"), (("e", "a", "b", 1),))
    c = TropicalCurve(m, (InfiniteEdge("x", "b", "end"),))
    assert c.genus == 0
    assert c.degree("b") == 2
    assert canonical_divisor(c) == Divisor(c, {"a": -1, "end": -1})
    d = Divisor(c, {"end": 2, Point("x", 5): 1, "a": 1})
    host, r = retract(c, d)
    assert host == m
    assert r == Divisor(m, {"b": 3, "a": 1})
    assert r.degree == d.degree
    with pytest.raises(ValidationError):
        TropicalCurve(m, (InfiniteEdge("y", "a", "b"),))


def test_genus_and_canonical_examples():
    from troprank.corpus import complete

    assert genus(complete(4)) == 3
    assert canonical_divisor(cycle(5)).is_zero()
    assert canonical_divisor(banana(3)) == Divisor(banana(3), {"v0": 1, "v1": 1})
    assert canonical_divisor(path(3)) == Divisor(path(3), {"v0": -1, "v2": -1})


def test_insert_point_examples():
    m = MetricGraph.build(("a", "b"), (("e", "a", "b", 2),))
    assert sorted(insert_point(m, Point("e", Fraction(1, 2))).graph.lengths) == [Fraction(1, 2), Fraction(3, 2)]
    same = insert_point(m, Point("e", 0))
    assert same.graph == m
    loop = MetricGraph.build(("a",), (("e", "a", "a", 1),))
    ref = insert_point(loop, Point("e", Fraction(1, 3)))
    assert sorted(ref.graph.lengths) == [Fraction(1, 3), Fraction(2, 3)]
    assert not ref.graph.graph.has_loops
    assert ref.graph.genus == 1


def test_scale_examples():
    m = MetricGraph.build(("a", "b"), (("e", "a", "b", Fraction(3, 2)), ("f", "a", "b", 1)))
    assert scale_lengths(m, 1).graph == m
    ref = scale_lengths(m, 2)
    assert ref.graph.lengths == (Fraction(3), Fraction(2))
    assert ref.forward(Point("e", Fraction(3, 4))) == Point("e", Fraction(3, 2))


def test_unit_subdivision_examples():
    m = MetricGraph.build(("a", "b"), (("e", "a", "b", Fraction(3, 2)),))
    sub = unit_subdivision(m)
    assert sub.factor == 2 and len(sub.graph.edges) == 3
    one = MetricGraph.build(("a", "b"), (("e", "a", "b", 1),))
    sub = unit_subdivision(one, [Point("e", Fraction(1, 3))])
    assert sub.factor == 3 and len(sub.graph.edges) == 3
    assert sub.inverse(sub.forward(Point("e", Fraction(1, 3)))) == Point("e", Fraction(1, 3))
    ban = MetricGraph.build(("v0", "v1"), (("e1", "v0", "v1", 2), ("e2", "v0", "v1", 3), ("e3", "v0", "v1", 4)))
    sub = unit_subdivision(ban)
    assert (len(sub.graph.edges), len(sub.graph.vertices), sub.graph.genus) == (9, 8, 2)


def test_genus_invariant_under_maps():
    ban = MetricGraph.build(("v0", "v1"), (("e1", "v0", "v1", 2), ("e2", "v0", "v1", 3), ("e3", "v1", "v1", 1)))
    assert insert_point(ban, Point("e2", Fraction(1, 3))).graph.genus == 2
    assert scale_lengths(ban, Fraction(5, 7)).graph.genus == 2
    assert unit_subdivision(ban, [Point("e3", Fraction(1, 2))]).graph.genus == 2


def test_retract_maps_canonical_divisor():
    m = MetricGraph.build(("a", "b"), (("e", "a", "b", 1), ("f", "a", "b", 2)))
    c = TropicalCurve(m, (InfiniteEdge("x", "b", "u"), InfiniteEdge("y", "b", "w")))
    host, k = retract(c, canonical_divisor(c))
    assert k == canonical_divisor(host)
    assert retract(c, Divisor(c, {"u": 1}))[1] == Divisor(m, {"b": 1})
