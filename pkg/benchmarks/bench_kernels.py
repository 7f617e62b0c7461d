"""Compare the compiled and pure-Python kernel backends.

Run after an editable install::

    python benchmarks/bench_kernels.py [--repeat N]

Each workload is timed with both backends on identical inputs and the
results are checked for equality before timings are reported.
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from troprank import _pykernels
from troprank.corpus import banana, complete, multigraphs, random_divisor
from troprank.divisor import Divisor
from troprank.rank import _prepare, _tree_arrays, spanning_trees
from troprank.reduction import _chips
from troprank.topology import MetricGraph, subdivide


def _reduce_inputs():
    rng = random.Random(1)
    out = []
    for g in multigraphs(4, 5) + [subdivide(complete(5), 2)]:
        for _ in range(20):
            d = random_divisor(g, rng, -4, 6)
            out.append((g.adjacency, g.bfs_distances(g.vertices[0]), _chips(g, d), 0))
    return out


def _rank_inputs():
    out = []
    for g, k in ((subdivide(banana(3), 2), 5), (complete(4), 6), (subdivide(complete(4), 2), 5)):
        d = Divisor(g, {g.vertices[0]: k, g.vertices[1]: 1})
        out.append((g.adjacency, g.bfs_distances(g.vertices[0]), _chips(g, d), 0))
    return out


def _scan_inputs():
    g = MetricGraph.unit(complete(4))
    prep = _prepare(g, Divisor(g, {"v0": 2, "v1": 1, "v3": -1}))
    out = []
    for tree in spanning_trees(prep.host):
        order, parent, plen, slot, _, nt = _tree_arrays(prep, tree)
        out.append(
            (
                np.array(order, dtype=np.int64),
                np.array(parent, dtype=np.int64),
                np.array(plen, dtype=np.int64),
                np.array(slot, dtype=np.int64),
                np.array(nt, dtype=np.int64).reshape(-1, 3),
                prep.chips,
                3,
                -1,
                -1,
            )
        )
    return out


WORKLOADS = {
    "reduce_chips": _reduce_inputs,
    "graph_rank": _rank_inputs,
    "scan_tree": _scan_inputs,
}


def _time(fn, inputs, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = [fn(*args) for args in inputs]
        best = min(best, time.perf_counter() - t0)
    return best, result


def _same(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    if isinstance(a, (tuple, list)):
        return len(a) == len(b) and all(_same(x, y) for x, y in zip(a, b))
    return a == b


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    try:
        from troprank import _ckernels
    except ImportError:
        print("compiled kernels are not built; only the Python backend is available")
        return 1
    print(f"{'workload':<14}{'python s':>10}{'cython s':>10}{'speedup':>9}")
    for name, make in WORKLOADS.items():
        inputs = make()
        tp, rp = _time(getattr(_pykernels, name), inputs, args.repeat)
        tc, rc = _time(getattr(_ckernels, name), inputs, args.repeat)
        if name == "graph_rank":
            rp, rc = [r[0] for r in rp], [r[0] for r in rc]
        if not _same(rp, rc):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<14}{tp:>10.3f}{tc:>10.3f}{tp / tc:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
