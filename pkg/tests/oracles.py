"""Brute-force reference computations that share no code with the package.

Everything here works on a plain Laplacian matrix and searches firing
scripts in a box, so it is only usable on tiny graphs.
"""

from __future__ import annotations

import itertools

import numpy as np


def laplacian(vertices, edges) -> np.ndarray:
    """Laplacian of a multigraph given as vertex ids and ``(u, v)`` pairs; loops ignored."""
    idx = {v: i for i, v in enumerate(vertices)}
    L = np.zeros((len(vertices), len(vertices)), dtype=np.int64)
    for u, v in edges:
        if u == v:
            continue
        a, b = idx[u], idx[v]
        L[a, a] += 1
        L[b, b] += 1
        L[a, b] -= 1
        L[b, a] -= 1
    return L


def scripts(n: int, box: int):
    """Firing scripts with first entry 0 and the rest in ``[-box, box]``."""
    for rest in itertools.product(range(-box, box + 1), repeat=n - 1):
        yield np.array((0,) + rest, dtype=np.int64)


def subsets_reduced(L: np.ndarray, chips, i0: int) -> bool:
    """Reducedness by checking every nonempty vertex set avoiding ``i0``."""
    n = len(chips)
    others = [i for i in range(n) if i != i0]
    if any(chips[i] < 0 for i in others):
        return False
    for r in range(1, len(others) + 1):
        for A in itertools.combinations(others, r):
            inside = set(A)
            ok = False
            for v in A:
                out = sum(-L[v, w] for w in range(n) if w not in inside and w != v)
                if chips[v] < out:
                    ok = True
                    break
            if not ok:
                return False
    return True


def reduced_by_search(L: np.ndarray, chips, i0: int = 0, box: int = 6):
    """All reduced divisors ``chips - L s`` found in the box (should be one)."""
    chips = np.asarray(chips, dtype=np.int64)
    found = set()
    for s in scripts(len(chips), box):
        cand = chips - L @ s
        if subsets_reduced(L, cand, i0):
            found.add(tuple(int(x) for x in cand))
    return found


def nonempty(L: np.ndarray, chips, box: int = 6) -> bool:
    chips = np.asarray(chips, dtype=np.int64)
    if chips.sum() < 0:
        return False
    return any((chips - L @ s >= 0).all() for s in scripts(len(chips), box))


def rank_by_search(L: np.ndarray, chips, box: int = 6) -> int:
    """Literal rank: least degree of an effective ``E`` with ``|D - E|`` empty, minus one."""
    chips = np.asarray(chips, dtype=np.int64)
    n = len(chips)
    for k in itertools.count():
        for combo in itertools.combinations_with_replacement(range(n), k):
            e = np.bincount(np.array(combo, dtype=np.int64), minlength=n) if combo else np.zeros(n, dtype=np.int64)
            if not nonempty(L, chips - e, box):
                return k - 1
    raise AssertionError("unreachable")


def matrix_tree_count(L: np.ndarray) -> int:
    """Number of spanning trees via a cofactor of the Laplacian (exact integer determinant)."""
    from fractions import Fraction

    M = [[Fraction(int(x)) for x in row[1:]] for row in L[1:]]
    n = len(M)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det *= M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            for k in range(c, n):
                M[r][k] -= f * M[c][k]
    return int(det)
