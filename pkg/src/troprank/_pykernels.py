"""Pure-Python chip-firing kernels.

Reference implementation of the routines in ``_ckernels.pyx``; used when
the compiled extension is unavailable and as a cross-check in the tests.
All functions take int64 numpy arrays and return numpy arrays or ints.
"""

from __future__ import annotations

import itertools

import numpy as np

MAX_PERM_POINTS = 20
NO_TERM = 1 << 62


def _fire(adj, c, script, members, t):
    inset = set(members)
    for u in members:
        row = adj[u]
        for w, k in enumerate(row):
            if k and w not in inset:
                c[u] -= t * k
                c[w] += t * k
        script[u] += t


def _unburnt(adj, c, v0):
    n = len(c)
    burnt = [False] * n
    burnt[v0] = True
    cnt = [0] * n
    stack = [v0]
    while stack:
        w = stack.pop()
        row = adj[w]
        for v in range(n):
            k = row[v]
            if k and not burnt[v]:
                cnt[v] += k
                if c[v] < cnt[v]:
                    burnt[v] = True
                    stack.append(v)
    return [v for v in range(n) if not burnt[v]]


def _reduce(adj, dist, c, v0):
    n = len(c)
    script = [0] * n
    dmax = max(dist) if n else 0
    for d in range(dmax, 0, -1):
        t = 0
        for u in range(n):
            if dist[u] == d and c[u] < 0:
                cross = sum(adj[u][w] for w in range(n) if dist[w] == d - 1)
                t = max(t, -(c[u] // cross))
        if t:
            _fire(adj, c, script, [u for u in range(n) if dist[u] < d], t)
    while True:
        rest = _unburnt(adj, c, v0)
        if not rest:
            return script
        _fire(adj, c, script, rest, 1)


def reduce_chips(adj, dist, chips, v0):
    """v0-reduce ``chips``; returns ``(reduced, firing_script)``.

    Phase 1 fires BFS balls around ``v0`` (farthest layer first) until every
    vertex other than ``v0`` is non-negative; phase 2 runs Dhar burning and
    fires the unburnt set until everything burns.
    """
    adj_l = np.asarray(adj).tolist()
    dist_l = np.asarray(dist).tolist()
    c = np.asarray(chips).tolist()
    script = _reduce(adj_l, dist_l, c, int(v0))
    return np.array(c, dtype=np.int64), np.array(script, dtype=np.int64)


def unburnt(adj, chips, v0):
    """Indices left unburnt by Dhar's fire started at ``v0``."""
    rest = _unburnt(np.asarray(adj).tolist(), np.asarray(chips).tolist(), int(v0))
    return np.array(rest, dtype=np.int64)


def graph_rank(adj, dist, chips, v0):
    """Rank via ``r(D) = 1 + min_v r(D - v)`` memoized on reduced forms.

    Returns ``(rank, witness)`` where ``witness`` lists vertex indices (with
    repetition) of an effective ``E`` of degree ``rank + 1`` with ``|D - E|``
    empty.
    """
    adj_l = np.asarray(adj).tolist()
    dist_l = np.asarray(dist).tolist()
    v0 = int(v0)
    n = len(dist_l)
    memo: dict[tuple, tuple[int, tuple]] = {}

    def rec(c):
        _reduce(adj_l, dist_l, c, v0)
        if c[v0] < 0:
            return -1, ()
        key = tuple(c)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best_r, best_w = None, ()
        for v in range(n):
            nxt = list(key)
            nxt[v] -= 1
            r, w = rec(nxt)
            if best_r is None or r < best_r:
                best_r, best_w = r, (v,) + w
                if r == -1:
                    break
        res = (best_r + 1, best_w)
        memo[key] = res
        return res

    r, w = rec(np.asarray(chips).tolist())
    return r, list(w)


def min_perm_excess(adj, values):
    """Minimum over orderings of ``sum max(0, values[x] - nu(x))``.

    ``nu(x)`` is the number of segments from ``x`` to earlier points minus
    one.  Dynamic programming over the set of already placed points; returns
    ``(minimum, order)``.
    """
    adj_l = np.asarray(adj).tolist()
    vals = np.asarray(values).tolist()
    return _min_perm_excess(adj_l, vals)


def _min_perm_excess(adj, vals):
    k = len(vals)
    if k == 0:
        return 0, []
    if k > MAX_PERM_POINTS:
        raise ValueError(f"too many points for permutation search: {k}")
    size = 1 << k
    dp = [NO_TERM] * size
    choice = [0] * size
    cnt = [None] * size
    dp[0] = 0
    cnt[0] = [0] * k
    for s in range(size):
        if s:
            low = s & -s
            row = adj[low.bit_length() - 1]
            prev = cnt[s ^ low]
            cnt[s] = [a + b for a, b in zip(prev, row)]
        c = cnt[s]
        base = dp[s]
        for x in range(k):
            if s >> x & 1:
                continue
            cost = vals[x] - c[x] + 1
            if cost < 0:
                cost = 0
            t = s | (1 << x)
            if base + cost < dp[t]:
                dp[t] = base + cost
                choice[t] = x
    order = []
    s = size - 1
    while s:
        x = choice[s]
        order.append(x)
        s ^= 1 << x
    order.reverse()
    return dp[size - 1], order


def tree_values(order, parent, plen, slot, F):
    """Vertex values ``f(v)`` from tree slopes ``F`` (root value 0)."""
    f = [0] * len(order)
    for v in order[1:]:
        f[v] = f[parent[v]] + F[slot[v]] * plen[v]
    return f


def extend_orders(order, parent, slot, nt, f, F):
    """Orders at vertices and the break (if any) on every non-tree edge.

    Returns ``(ordf, breaks)`` with ``breaks[j]`` the distance of the break
    on non-tree edge ``j`` from its first end ``a``, or 0 when linear.
    """
    n = len(order)
    ordf = [0] * n
    for v in order[1:]:
        s = F[slot[v]]
        ordf[parent[v]] += s
        ordf[v] -= s
    breaks = []
    for a, b, ell in nt:
        diff = f[b] - f[a]
        lo, hi = (a, b) if diff >= 0 else (b, a)
        diff = abs(diff)
        s, rem = divmod(diff, ell)
        if rem == 0:
            ordf[lo] += s
            ordf[hi] -= s
            breaks.append(0)
        else:
            # slope s from the low end, s + 1 over the last `rem` units
            ordf[lo] += s
            ordf[hi] -= s + 1
            breaks.append(ell - rem if lo == a else rem)
    return ordf, breaks


def segment_problem(order, parent, nt, base, ordf, breaks):
    """Segment adjacency and ``D' = D + D_f`` values over the support points."""
    n = len(order)
    ids = list(range(n))
    for j, br in enumerate(breaks):
        if br:
            ids.append(n + j)
    pos = {p: i for i, p in enumerate(ids)}
    k = len(ids)
    adj = [[0] * k for _ in range(k)]

    def link(x, y):
        adj[x][y] += 1
        adj[y][x] += 1

    for v in order[1:]:
        link(pos[parent[v]], pos[v])
    for j, (a, b, _) in enumerate(nt):
        if breaks[j]:
            x = pos[n + j]
            link(pos[a], x)
            link(x, pos[b])
        else:
            link(pos[a], pos[b])
    vals = [base[v] + ordf[v] for v in range(n)] + [1] * (k - n)
    return ids, adj, vals


def scan_tree(order, parent, plen, slot, nt, base, cap, prune_limit=-1, max_scan=-1):
    """Enumerate ``F: T -> [-cap, cap]`` for one spanning tree.

    For each ``F`` the function is extended to non-tree edges (at most one
    break of order +1 each), and the minimum over permutations of the
    support of ``deg+(D + D_f - nu_P)`` is computed.  ``F`` with
    ``deg+(D_f) > prune_limit`` are skipped when ``prune_limit >= 0``.

    Returns ``(best, best_F, best_order, scanned, kept, complete)``; ``best``
    is ``NO_TERM`` when nothing was kept.  ``best_order`` lists support
    point ids (``v`` for vertices, ``n + j`` for the break on edge ``j``).
    """
    order = np.asarray(order).tolist()
    parent = np.asarray(parent).tolist()
    plen = np.asarray(plen).tolist()
    slot = np.asarray(slot).tolist()
    nt = np.asarray(nt, dtype=np.int64).reshape(-1, 3).tolist()
    base = np.asarray(base).tolist()
    n = len(order)
    best, best_F, best_order = NO_TERM, [], []
    scanned = kept = 0
    cache: dict[tuple, tuple[int, list]] = {}
    for F in itertools.product(range(-cap, cap + 1), repeat=n - 1):
        if 0 <= max_scan <= scanned:
            return best, np.array(best_F, dtype=np.int64), np.array(best_order, dtype=np.int64), scanned, kept, False
        scanned += 1
        f = tree_values(order, parent, plen, slot, F)
        ordf, breaks = extend_orders(order, parent, slot, nt, f, F)
        if prune_limit >= 0:
            dplus = sum(x for x in ordf if x > 0) + sum(1 for br in breaks if br)
            if dplus > prune_limit:
                continue
        kept += 1
        vals_v = tuple(base[v] + ordf[v] for v in range(n))
        key = (vals_v, tuple(bool(br) for br in breaks))
        hit = cache.get(key)
        if hit is None:
            ids, adj, vals = segment_problem(order, parent, nt, base, ordf, breaks)
            val, perm = _min_perm_excess(adj, vals)
            hit = (val, [ids[i] for i in perm])
            cache[key] = hit
        if hit[0] < best:
            best, best_F, best_order = hit[0], list(F), hit[1]
    return best, np.array(best_F, dtype=np.int64), np.array(best_order, dtype=np.int64), scanned, kept, True
