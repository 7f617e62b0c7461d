import random
from fractions import Fraction

import pytest

from oracles import laplacian, matrix_tree_count, rank_by_search
from troprank.corpus import banana, bouquet, complete, cycle, multigraphs, path, random_divisor, vertex_divisors, with_lengths
from troprank.divisor import Divisor
from troprank.plfunc import divisor_of
from troprank.rank import (
    EnumerationBudget,
    certified_slope_bound,
    check_rr2,
    check_rr_conditions,
    enumeration_terms,
    extend_tree_function,
    rank,
    rank_enumeration,
    rank_graph,
    rank_metric,
    rank_tropical,
    riemann_roch_check,
    slope_bound,
    spanning_trees,
)
from troprank.reduction import epsilon
from troprank.topology import InfiniteEdge, MetricGraph, Point, TropicalCurve, ValidationError, canonical_divisor


def _lap(g):
    return laplacian(g.vertices, [(e.u, e.v) for e in g.edges])


def test_slope_bound_examples():
    assert slope_bound(banana(3), 14) == 17**3 == 4913
    assert slope_bound(cycle(1), 0) == 2
    assert slope_bound(banana(3), 3) <= slope_bound(banana(3), 4)
    with pytest.raises(ValidationError):
        slope_bound(banana(3), -1)


def test_certified_slope_bound_value():
    g = MetricGraph.unit(banana(3))
    # (deg + sum|D| + 6m - 4n + 4) / 2 with deg = 2, sum = 2, m = 3, n = 2
    assert certified_slope_bound(g, Divisor(g, {"v0": 1, "v1": 1})) == 9


def test_spanning_trees():
    assert spanning_trees(path(4)) == [tuple(e.id for e in path(4).edges)]
    assert len(spanning_trees(cycle(3))) == 3
    assert len(spanning_trees(banana(3))) == 3
    for g in multigraphs(4, 5, loops=True):
        trees = spanning_trees(g)
        assert len(set(trees)) == len(trees) == matrix_tree_count(_lap(g))


def test_extend_tree_function():
    g = with_lengths(banana(2), (1, 2))
    f = extend_tree_function(g, ("e1",), {"e1": 0})
    assert divisor_of(f).is_zero()
    f = extend_tree_function(g, ("e1",), {"e1": 3})
    assert f.slopes("e2") == [1, 2]
    # break at distance 1 from the higher end
    assert list(f.breakpoints["e2"]) == [(Fraction(1), Fraction(1))]
    f = extend_tree_function(g, ("e1",), {"e1": 4})
    assert f.slopes("e2") == [2]


def test_extend_descending_edge():
    g = with_lengths(banana(2), (1, 2))
    f = extend_tree_function(g, ("e1",), {"e1": -3})
    assert f.slopes("e2") == [-2, -1]
    assert divisor_of(f)[Point("e2", 1)] == 1


@pytest.mark.parametrize(
    "g, chips, expected",
    [
        (path(2), {"v0": 2}, 2),
        (cycle(3), {"v0": 1}, 0),
        (banana(3), {"v0": 1, "v1": 1}, 1),
        (banana(3), {"v1": 3}, 1),
        (complete(4), {"v0": 1}, 0),
        (banana(3), {"v0": -1, "v1": 1}, -1),
    ],
)
def test_rank_graph_against_brute_force(g, chips, expected):
    d = Divisor(g, chips)
    vec = [d[Point(v)] for v in g.vertices]
    assert rank_by_search(_lap(g), vec, box=4) == expected
    res = rank_graph(g, d)
    assert res.rank == expected
    assert rank_graph(g, d, exhaustive=True).rank == expected
    w = res.witness_unreachable
    assert w.is_effective() and w.degree == expected + 1
    assert epsilon(g, d - w) == 1


def test_memoized_equals_literal_search():
    for g in multigraphs(3, 3):
        for d in vertex_divisors(g, -1, 2):
            assert rank_graph(g, d).rank == rank_graph(g, d, exhaustive=True).rank


def test_shortcut_agrees():
    g = banana(3)
    d = Divisor(g, {"v0": 3, "v1": 1})
    assert rank_graph(g, d, shortcut=True).rank == rank_graph(g, d).rank == 2
    assert rank_graph(g, d, shortcut=True).witness_unreachable is None


def test_loops_use_metric_genus():
    g = bouquet(1)
    assert rank_graph(g, Divisor(g, {"v0": 1})).rank == 0
    assert rank_graph(g, Divisor(g, {"v0": 2})).rank == 1


def test_rank_upper_bound_and_negative_degree():
    rng = random.Random(2)
    for g in multigraphs(3, 4):
        for _ in range(4):
            d = random_divisor(g, rng)
            r = rank(g, d).rank
            assert r <= max(d.degree, -1)
            if d.degree < 0:
                assert r == -1


def test_enumeration_matches_subdivision_on_banana():
    g = MetricGraph.unit(banana(3))
    d = Divisor(g, {"v0": 1, "v1": 1})
    res = rank_enumeration(g, d)
    assert res.exact
    assert res.rank == rank_metric(g, d).rank == 1
    assert res.certificate.term == 1
    assert res.certificate.divisor == d + divisor_of(res.certificate.function)


def test_enumeration_early_exits():
    g = MetricGraph.unit(banana(3))
    assert rank_enumeration(g, Divisor(g, {"v0": -1})).rank == -1
    zero = rank_enumeration(g, Divisor(g))
    assert zero.rank == 0 and zero.witness_unreachable.degree == 1
    pt = MetricGraph.build(("a",), ())
    assert rank_enumeration(pt, Divisor(pt, {"a": 3})).rank == 3


def test_terms_bound_rank_and_dp_matches_orderings():
    cases = [
        (banana(2), {"v0": 1, "v1": -1}),
        (banana(3), {"v1": 2}),
        (cycle(3), {"v1": 1, "v2": -1}),
        (path(3), {"v2": 1}),
    ]
    for g, chips in cases:
        d = Divisor(g, chips)
        r = rank_graph(g, d).rank
        for cap in (0, 1):
            terms = [t for _, _, t in enumeration_terms(g, d, cap)]
            assert min(terms) >= r
            res = rank_enumeration(g, d, EnumerationBudget(slope_bound=cap, prune=False))
            assert res.rank == min(terms)


def test_truncated_budget_is_flagged():
    g = MetricGraph.unit(banana(3))
    d = Divisor(g, {"v0": 2, "v1": 1})
    res = rank_enumeration(g, d, EnumerationBudget(slope_bound=0, prune=False))
    assert not res.exact
    assert res.rank >= rank_metric(g, d).rank
    capped = rank_enumeration(g, d, EnumerationBudget(max_scan=1))
    assert not capped.exact
    assert capped.rank >= 2 and epsilon(g, d - capped.witness_unreachable) == 1


def test_rational_lengths_rank():
    g = with_lengths(banana(3), (Fraction(1, 2), Fraction(3, 2), 2))
    d = Divisor(g, {"v0": 1, Point("e2", 1): 1})
    assert rank_metric(g, d).rank == rank_enumeration(g, d).rank


def test_tropical_rank():
    m = MetricGraph.build(("a", "b"), (("e", "a", "b", 1),))
    c = TropicalCurve(m, (InfiniteEdge("x", "b", "u"),))
    assert rank_tropical(c, Divisor(c, {"u": 1})).rank == 1
    d = Divisor(c, {"a": 2})
    assert rank_tropical(c, d).rank == rank_metric(m, Divisor(m, {"a": 2})).rank


def test_rank_is_class_function():
    rng = random.Random(9)
    g = with_lengths(cycle(3), (1, Fraction(1, 2), 2))
    from test_plfunc import _consistent

    for _ in range(5):
        d = random_divisor(g, rng, 0, 2)
        f = _consistent(g, rng)
        assert rank_metric(g, d).rank == rank_metric(g, d + divisor_of(f)).rank


def test_riemann_roch_examples():
    c = cycle(3)
    assert riemann_roch_check(c, Divisor(c, {"v0": 1})) == 0
    for g in (banana(3), complete(4), bouquet(2)):
        K = canonical_divisor(g)
        assert riemann_roch_check(g, K) == 0
        assert riemann_roch_check(g, Divisor(g)) == 0
        assert rank(g, K).rank == g.genus - 1


def test_rr_conditions():
    g = banana(3)
    rep = check_rr_conditions(g, Divisor(g, {"v0": 1}))
    assert rep.rr1 and rep.rr2
    rep = check_rr_conditions(g, Divisor(g, {"v0": 2, "v1": -1}))
    assert rep.rr1 and rep.rr2 and rep.epsilon == 1
    with pytest.raises(ValidationError):
        check_rr2(g, Divisor(g, {"v0": 2}))


def test_subadditivity_small():
    for g in multigraphs(3, 3):
        divs = list(vertex_divisors(g, 0, 1))
        ranks = {d: rank_graph(g, d).rank for d in divs}
        for a in divs:
            for b in divs:
                if ranks[a] >= 0 and ranks[b] >= 0:
                    assert rank_graph(g, a + b).rank >= ranks[a] + ranks[b]
