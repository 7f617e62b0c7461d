# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled chip-firing kernels; same API as ``troprank._pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef long long i64

MAX_PERM_POINTS = 20
cdef int C_MAX_PERM_POINTS = 20
NO_TERM = 1 << 62
cdef i64 C_NO_TERM = 1LL << 62


cdef void _fire(const i64[:, ::1] adj, i64* c, i64* script, char* inset, int n, i64 t) noexcept nogil:
    cdef int u, w
    cdef i64 k
    for u in range(n):
        if not inset[u]:
            continue
        for w in range(n):
            k = adj[u, w]
            if k and not inset[w]:
                c[u] -= t * k
                c[w] += t * k
        script[u] += t


cdef int _burn(const i64[:, ::1] adj, i64* c, int n, int v0, char* burnt, i64* cnt, int* stack) noexcept nogil:
    """Fills ``burnt``; returns the number of unburnt vertices."""
    cdef int v, w, top = 0, left = n - 1
    cdef i64 k
    for v in range(n):
        burnt[v] = 0
        cnt[v] = 0
    burnt[v0] = 1
    stack[top] = v0
    top += 1
    while top:
        top -= 1
        w = stack[top]
        for v in range(n):
            k = adj[w, v]
            if k and not burnt[v]:
                cnt[v] += k
                if c[v] < cnt[v]:
                    burnt[v] = 1
                    left -= 1
                    stack[top] = v
                    top += 1
    return left


cdef void _reduce(const i64[:, ::1] adj, const i64[::1] dist, i64* c, i64* script, int n, int v0,
                  char* mark, i64* cnt, int* stack) noexcept nogil:
    cdef int u, w
    cdef i64 d, dmax = 0, t, need, cross
    for u in range(n):
        script[u] = 0
        if dist[u] > dmax:
            dmax = dist[u]
    d = dmax
    while d >= 1:
        t = 0
        for u in range(n):
            if dist[u] == d and c[u] < 0:
                cross = 0
                for w in range(n):
                    if dist[w] == d - 1:
                        cross += adj[u, w]
                need = (-c[u] + cross - 1) // cross
                if need > t:
                    t = need
        if t:
            for u in range(n):
                mark[u] = dist[u] < d
            _fire(adj, c, script, mark, n, t)
        d -= 1
    while _burn(adj, c, n, v0, mark, cnt, stack):
        for u in range(n):
            mark[u] = not mark[u]
        _fire(adj, c, script, mark, n, 1)


cdef class _Work:
    cdef int n
    cdef char* mark
    cdef i64* cnt
    cdef int* stack
    cdef i64* script

    def __cinit__(self, int n):
        self.n = n
        self.mark = <char*> malloc(max(n, 1) * sizeof(char))
        self.cnt = <i64*> malloc(max(n, 1) * sizeof(i64))
        self.stack = <int*> malloc(max(n, 1) * sizeof(int))
        self.script = <i64*> malloc(max(n, 1) * sizeof(i64))
        if not (self.mark and self.cnt and self.stack and self.script):
            raise MemoryError()

    def __dealloc__(self):
        free(self.mark)
        free(self.cnt)
        free(self.stack)
        free(self.script)


def reduce_chips(adj, dist, chips, v0):
    cdef const i64[:, ::1] a = np.ascontiguousarray(adj, dtype=np.int64)
    cdef const i64[::1] ds = np.ascontiguousarray(dist, dtype=np.int64)
    out = np.array(chips, dtype=np.int64, copy=True)
    script = np.zeros(len(out), dtype=np.int64)
    cdef i64[::1] c = out
    cdef i64[::1] s = script
    cdef int n = c.shape[0]
    cdef _Work wk = _Work(n)
    if n:
        _reduce(a, ds, &c[0], &s[0], n, v0, wk.mark, wk.cnt, wk.stack)
    return out, script


def unburnt(adj, chips, v0):
    cdef const i64[:, ::1] a = np.ascontiguousarray(adj, dtype=np.int64)
    buf = np.array(chips, dtype=np.int64, copy=True)
    cdef i64[::1] c = buf
    cdef int n = c.shape[0], v
    cdef _Work wk = _Work(n)
    _burn(a, &c[0], n, v0, wk.mark, wk.cnt, wk.stack)
    return np.array([v for v in range(n) if not wk.mark[v]], dtype=np.int64)


cdef class _RankSearch:
    cdef const i64[:, ::1] adj
    cdef const i64[::1] dist
    cdef int n, v0
    cdef _Work wk
    cdef dict memo

    def __init__(self, adj, dist, int v0):
        self.adj = np.ascontiguousarray(adj, dtype=np.int64)
        self.dist = np.ascontiguousarray(dist, dtype=np.int64)
        self.n = self.dist.shape[0]
        self.v0 = v0
        self.wk = _Work(self.n)
        self.memo = {}

    cdef tuple rec(self, cnp.ndarray arr):
        cdef int v
        cdef i64[::1] c = arr
        _reduce(self.adj, self.dist, &c[0], self.wk.script, self.n, self.v0,
                self.wk.mark, self.wk.cnt, self.wk.stack)
        if c[self.v0] < 0:
            return (-1, ())
        key = arr.tobytes()
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        best_r = None
        best_w = ()
        for v in range(self.n):
            nxt = arr.copy()
            nxt[v] -= 1
            r, w = self.rec(nxt)
            if best_r is None or r < best_r:
                best_r = r
                best_w = (v,) + w
                if r == -1:
                    break
        res = (best_r + 1, best_w)
        self.memo[key] = res
        return res


def graph_rank(adj, dist, chips, v0):
    search = _RankSearch(adj, dist, v0)
    c = np.array(chips, dtype=np.int64, copy=True)
    r, w = search.rec(c)
    return r, list(w)


cdef i64 _perm_dp(const i64* adj, const i64* vals, int k, int* order_out, i64* dp, int* choice, int* cnt) noexcept nogil:
    """DP over placed subsets; ``adj`` is k*k row-major, ``cnt`` has 2^k*k ints."""
    cdef Py_ssize_t size = (<Py_ssize_t> 1) << k
    cdef Py_ssize_t s, t, low
    cdef int x, i, lowi
    cdef i64 base, cost
    for s in range(size):
        dp[s] = C_NO_TERM
    dp[0] = 0
    for x in range(k):
        cnt[x] = 0
    for s in range(size):
        if s:
            low = s & (-s)
            lowi = 0
            while (low >> lowi) != 1:
                lowi += 1
            for x in range(k):
                cnt[s * k + x] = cnt[(s ^ low) * k + x] + <int> adj[lowi * k + x]
        base = dp[s]
        for x in range(k):
            if (s >> x) & 1:
                continue
            cost = vals[x] - cnt[s * k + x] + 1
            if cost < 0:
                cost = 0
            t = s | ((<Py_ssize_t> 1) << x)
            if base + cost < dp[t]:
                dp[t] = base + cost
                choice[t] = x
    s = size - 1
    i = k - 1
    while s:
        x = choice[s]
        order_out[i] = x
        i -= 1
        s ^= (<Py_ssize_t> 1) << x
    return dp[size - 1]


cdef class _PermWork:
    cdef int kmax
    cdef i64* dp
    cdef int* choice
    cdef int* cnt
    cdef int* order
    cdef i64* adj
    cdef i64* vals

    def __cinit__(self, int kmax):
        if kmax > C_MAX_PERM_POINTS:
            raise ValueError(f"too many points for permutation search: {kmax}")
        self.kmax = kmax
        cdef Py_ssize_t size = (<Py_ssize_t> 1) << max(kmax, 0)
        self.dp = <i64*> malloc(size * sizeof(i64))
        self.choice = <int*> malloc(size * sizeof(int))
        self.cnt = <int*> malloc(size * max(kmax, 1) * sizeof(int))
        self.order = <int*> malloc(max(kmax, 1) * sizeof(int))
        self.adj = <i64*> malloc(max(kmax * kmax, 1) * sizeof(i64))
        self.vals = <i64*> malloc(max(kmax, 1) * sizeof(i64))
        if not (self.dp and self.choice and self.cnt and self.order and self.adj and self.vals):
            raise MemoryError()

    def __dealloc__(self):
        free(self.dp)
        free(self.choice)
        free(self.cnt)
        free(self.order)
        free(self.adj)
        free(self.vals)


def min_perm_excess(adj, values):
    cdef const i64[:, ::1] a = np.ascontiguousarray(adj, dtype=np.int64).reshape(len(values), len(values))
    cdef const i64[::1] v = np.ascontiguousarray(values, dtype=np.int64)
    cdef int k = v.shape[0], i, j
    if k == 0:
        return 0, []
    cdef _PermWork wk = _PermWork(k)
    for i in range(k):
        wk.vals[i] = v[i]
        for j in range(k):
            wk.adj[i * k + j] = a[i, j]
    best = _perm_dp(wk.adj, wk.vals, k, wk.order, wk.dp, wk.choice, wk.cnt)
    return best, [wk.order[i] for i in range(k)]


def scan_tree(order, parent, plen, slot, nt, base, long long cap, long long prune_limit=-1, long long max_scan=-1):
    cdef const i64[::1] od = np.ascontiguousarray(order, dtype=np.int64)
    cdef const i64[::1] par = np.ascontiguousarray(parent, dtype=np.int64)
    cdef const i64[::1] pl = np.ascontiguousarray(plen, dtype=np.int64)
    cdef const i64[::1] sl = np.ascontiguousarray(slot, dtype=np.int64)
    cdef const i64[:, ::1] ntv = np.ascontiguousarray(nt, dtype=np.int64).reshape(-1, 3)
    cdef const i64[::1] bs = np.ascontiguousarray(base, dtype=np.int64)
    cdef int n = od.shape[0]
    cdef int m_nt = ntv.shape[0]
    cdef int nf = n - 1
    cdef int kmax = n + m_nt
    cdef _PermWork wk = _PermWork(kmax)

    F_arr = np.full(max(nf, 1), -cap, dtype=np.int64)
    f_arr = np.zeros(n, dtype=np.int64)
    ord_arr = np.zeros(n, dtype=np.int64)
    brk_arr = np.zeros(max(m_nt, 1), dtype=np.int64)
    pos_arr = np.zeros(n + max(m_nt, 1), dtype=np.int64)
    ids_arr = np.zeros(n + max(m_nt, 1), dtype=np.int64)
    bestF = np.zeros(max(nf, 1), dtype=np.int64)
    best_order = np.zeros(kmax, dtype=np.int64)
    cdef i64[::1] F = F_arr
    cdef i64[::1] f = f_arr
    cdef i64[::1] ordf = ord_arr
    cdef i64[::1] brk = brk_arr
    cdef i64[::1] pos = pos_arr
    cdef i64[::1] ids = ids_arr
    cdef i64[::1] bF = bestF
    cdef i64[::1] bO = best_order

    cdef i64 best = C_NO_TERM, scanned = 0, kept = 0, val, dplus, s, rem, diff, ell
    cdef int i, j, v, p, a, b, lo, hi, k, x, y, best_k = 0
    cdef bint complete = True, done = False, keep

    if cap < 0:
        return NO_TERM, bestF[:nf], best_order[:0], 0, 0, True
    while not done:
        if max_scan >= 0 and scanned >= max_scan:
            complete = False
            break
        scanned += 1
        # tree values and orders
        f[od[0]] = 0
        for v in range(n):
            ordf[v] = 0
        for i in range(1, n):
            v = od[i]
            p = par[v]
            s = F[sl[v]]
            f[v] = f[p] + s * pl[v]
            ordf[p] += s
            ordf[v] -= s
        dplus = 0
        for j in range(m_nt):
            a = ntv[j, 0]
            b = ntv[j, 1]
            ell = ntv[j, 2]
            diff = f[b] - f[a]
            if diff >= 0:
                lo = a
                hi = b
            else:
                lo = b
                hi = a
                diff = -diff
            s = diff // ell
            rem = diff - s * ell
            if rem == 0:
                ordf[lo] += s
                ordf[hi] -= s
                brk[j] = 0
            else:
                ordf[lo] += s
                ordf[hi] -= s + 1
                brk[j] = (ell - rem) if lo == a else rem
                dplus += 1
        keep = True
        if prune_limit >= 0:
            for v in range(n):
                if ordf[v] > 0:
                    dplus += ordf[v]
            if dplus > prune_limit:
                keep = False
        if keep:
            kept += 1
            k = 0
            for v in range(n):
                pos[v] = k
                ids[k] = v
                wk.vals[k] = bs[v] + ordf[v]
                k += 1
            for j in range(m_nt):
                if brk[j]:
                    pos[n + j] = k
                    ids[k] = n + j
                    wk.vals[k] = 1
                    k += 1
            for x in range(k * k):
                wk.adj[x] = 0
            for i in range(1, n):
                v = od[i]
                x = pos[par[v]]
                y = pos[v]
                wk.adj[x * k + y] += 1
                wk.adj[y * k + x] += 1
            for j in range(m_nt):
                x = pos[ntv[j, 0]]
                y = pos[ntv[j, 1]]
                if brk[j]:
                    p = pos[n + j]
                    wk.adj[x * k + p] += 1
                    wk.adj[p * k + x] += 1
                    wk.adj[y * k + p] += 1
                    wk.adj[p * k + y] += 1
                else:
                    wk.adj[x * k + y] += 1
                    wk.adj[y * k + x] += 1
            val = _perm_dp(wk.adj, wk.vals, k, wk.order, wk.dp, wk.choice, wk.cnt)
            if val < best:
                best = val
                best_k = k
                for i in range(nf):
                    bF[i] = F[i]
                for i in range(k):
                    bO[i] = ids[wk.order[i]]
        # odometer, last slot fastest (matches itertools.product)
        i = nf - 1
        while True:
            if i < 0:
                done = True
                break
            if F[i] < cap:
                F[i] += 1
                break
            F[i] = -cap
            i -= 1
    return (NO_TERM if best == C_NO_TERM else best), bestF[:nf].copy(), best_order[:best_k].copy(), scanned, kept, complete
