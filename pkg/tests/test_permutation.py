import random
from fractions import Fraction

import pytest

from troprank.corpus import banana, cycle, multigraphs, random_permutation
from troprank.divisor import Divisor
from troprank.permutation import Permutation, insert_into_perm, nu_divisor, reverse_perm, segments
from troprank.reduction import epsilon
from troprank.topology import MetricGraph, Point, ValidationError, canonical_divisor

BAN = MetricGraph.unit(banana(3))


def test_banana_nu():
    p = Permutation(BAN, (Point("v0"), Point("v1")))
    assert nu_divisor(p) == Divisor(BAN, {"v0": -1, "v1": 2})
    assert nu_divisor(p).degree == BAN.genus - 1


def test_cycle_with_transversal():
    c = MetricGraph.unit(cycle(1))
    p = Permutation(c, (Point("v0"), Point("e1", Fraction(1, 2))))
    assert nu_divisor(p) == Divisor(c, {"v0": -1, Point("e1", Fraction(1, 2)): 1})
    assert len(segments(p)) == 2


def test_validation():
    with pytest.raises(ValidationError, match="misses"):
        Permutation(BAN, (Point("v0"),))
    with pytest.raises(ValidationError, match="repeats"):
        Permutation(BAN, (Point("v0"), Point("v1"), Point("e1", 0)))
    with pytest.raises(ValidationError, match="loop"):
        Permutation(MetricGraph.unit(cycle(1)), (Point("v0"),))


def test_reverse():
    p = Permutation(BAN, (Point("v0"), Point("e2", Fraction(1, 3)), Point("v1")))
    assert reverse_perm(reverse_perm(p)) == p
    assert nu_divisor(p) + nu_divisor(reverse_perm(p)) == canonical_divisor(BAN)
    assert nu_divisor(reverse_perm(p)).degree == BAN.genus - 1


def test_insertion_keeps_nu():
    p = Permutation(BAN, (Point("v1"), Point("v0")))
    q = insert_into_perm(p, Point("e1", Fraction(1, 2)))
    assert q.points[1] == Point("e1", Fraction(1, 2))
    assert nu_divisor(q) == nu_divisor(p)
    with pytest.raises(ValidationError):
        insert_into_perm(p, "v0")
    with pytest.raises(ValidationError):
        insert_into_perm(p, Point("e1", Fraction(1, 2)), slot=1)


def test_graph_host_is_unit():
    p = Permutation(banana(3), (Point("v0"), Point("v1")))
    assert p.host == BAN
    assert str(p) == "v0 v1"


@pytest.mark.parametrize("seed", range(4))
def test_random_permutation_properties(seed):
    rng = random.Random(seed)
    for g in multigraphs(3, 4, loops=True):
        m = MetricGraph.unit(g)
        K = canonical_divisor(m)
        for _ in range(5):
            p = random_permutation(m, rng)
            nu = nu_divisor(p)
            assert nu.degree == m.genus - 1
            assert epsilon(m, nu) == 1
            assert nu + nu_divisor(reverse_perm(p)) == K
            if not m.edges:
                continue
            seg = rng.choice(segments(p))
            mid = Point(seg.edge, (seg.start + seg.stop) / 2)
            gap = abs(p.position[seg.a] - p.position[seg.b])
            q = insert_into_perm(p, mid, rng.randrange(gap))
            assert nu_divisor(q) == nu
