import itertools
import random

import numpy as np
import pytest

from troprank import _pykernels, kernels
from troprank.corpus import banana, multigraphs, random_divisor
from troprank.divisor import Divisor
from troprank.rank import _prepare, _tree_arrays, spanning_trees
from troprank.reduction import _chips
from troprank.topology import MetricGraph

try:
    from troprank import _ckernels
except ImportError:  # extension not built
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def _cases(seed=0, per_graph=3):
    rng = random.Random(seed)
    for g in multigraphs(4, 5):
        for _ in range(per_graph):
            d = random_divisor(g, rng)
            yield g, _chips(g, d)


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


def test_python_min_perm_excess_matches_orderings():
    rng = random.Random(1)
    for _ in range(40):
        k = rng.randint(1, 5)
        adj = [[0] * k for _ in range(k)]
        for a, b in itertools.combinations(range(k), 2):
            adj[a][b] = adj[b][a] = rng.randint(0, 2)
        vals = [rng.randint(-2, 3) for _ in range(k)]
        brute = min(
            sum(max(0, vals[x] - (sum(adj[x][y] for y in perm[:i]) - 1)) for i, x in enumerate(perm))
            for perm in itertools.permutations(range(k))
        )
        best, order = _pykernels.min_perm_excess(np.array(adj), np.array(vals))
        assert best == brute
        assert sorted(order) == list(range(k))
        again = sum(max(0, vals[x] - (sum(adj[x][y] for y in order[:i]) - 1)) for i, x in enumerate(order))
        assert again == brute


@needs_c
def test_reduce_and_burn_agree():
    for g, c in _cases():
        adj, dist = g.adjacency, g.bfs_distances(g.vertices[0])
        r1, s1 = _pykernels.reduce_chips(adj, dist, c, 0)
        r2, s2 = _ckernels.reduce_chips(adj, dist, c, 0)
        assert r1.tolist() == r2.tolist()
        assert s1.tolist() == s2.tolist()
        assert sorted(_pykernels.unburnt(adj, c, 0).tolist()) == sorted(_ckernels.unburnt(adj, c, 0).tolist())


@needs_c
def test_graph_rank_agrees():
    for g, c in _cases(2, 2):
        adj, dist = g.adjacency, g.bfs_distances(g.vertices[0])
        r1, _ = _pykernels.graph_rank(adj, dist, c, 0)
        r2, _ = _ckernels.graph_rank(adj, dist, c, 0)
        assert r1 == r2


@needs_c
def test_min_perm_excess_agrees():
    rng = random.Random(4)
    for _ in range(50):
        k = rng.randint(0, 7)
        adj = np.zeros((k, k), dtype=np.int64)
        for a, b in itertools.combinations(range(k), 2):
            adj[a, b] = adj[b, a] = rng.randint(0, 3)
        vals = np.array([rng.randint(-3, 4) for _ in range(k)], dtype=np.int64)
        assert _pykernels.min_perm_excess(adj, vals)[0] == _ckernels.min_perm_excess(adj, vals)[0]


@needs_c
@pytest.mark.parametrize("cap, prune", [(0, False), (1, False), (2, True)])
def test_scan_tree_agrees(cap, prune):
    g = MetricGraph.unit(banana(3))
    for chips in ({"v0": 1, "v1": 1}, {"v1": 2}, {"v0": 3, "v1": -1}):
        prep = _prepare(g, Divisor(g, chips))
        for tree in spanning_trees(prep.host):
            order, parent, plen, slot, _, nt = _tree_arrays(prep, tree)
            args = (
                np.array(order, dtype=np.int64),
                np.array(parent, dtype=np.int64),
                np.array(plen, dtype=np.int64),
                np.array(slot, dtype=np.int64),
                np.array(nt, dtype=np.int64).reshape(-1, 3),
                prep.chips,
                cap,
                20 if prune else -1,
                -1,
            )
            a = _pykernels.scan_tree(*args)
            b = _ckernels.scan_tree(*args)
            assert (a[0], list(a[1]), a[3], a[4], a[5]) == (b[0], list(b[1]), b[3], b[4], b[5])
