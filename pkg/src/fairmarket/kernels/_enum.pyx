# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled allocation enumerators.

Assignments are visited in lexicographic order of (owner of good 0, owner of
good 1, ...). All arithmetic is on 64-bit integers; callers guarantee the
magnitudes fit (see ``fairmarket.kernels``).
"""
from libc.stdlib cimport malloc, free

ctypedef long long i64


cdef int _dominate_dfs(const i64[:, ::1] v, const i64[::1] base, const i64[:, ::1] rest,
                       i64* util, int* assign, int j, int n, int m) noexcept nogil:
    cdef int i, h, strict
    if j == m:
        strict = 0
        for h in range(n):
            if util[h] < base[h]:
                return 0
            if util[h] > base[h]:
                strict = 1
        return strict
    for h in range(n):
        if util[h] + rest[h, j] < base[h]:
            return 0
    for i in range(n):
        util[i] += v[i, j]
        assign[j] = i
        if _dominate_dfs(v, base, rest, util, assign, j + 1, n, m):
            return 1
        util[i] -= v[i, j]
    return 0


def first_dominating(const i64[:, ::1] values, const i64[::1] base):
    """First assignment whose utility vector Pareto-dominates ``base``, or None."""
    cdef int n = values.shape[0]
    cdef int m = values.shape[1]
    cdef int i, j
    rest_py = [[0] * (m + 1) for _ in range(n)]
    for i in range(n):
        for j in range(m - 1, -1, -1):
            rest_py[i][j] = rest_py[i][j + 1] + values[i, j]
    import numpy as np
    cdef i64[:, ::1] rest = np.asarray(rest_py, dtype=np.int64)
    cdef i64* util = <i64*> malloc(n * sizeof(i64))
    cdef int* assign = <int*> malloc(m * sizeof(int))
    cdef int found
    try:
        for i in range(n):
            util[i] = 0
        with nogil:
            found = _dominate_dfs(values, base, rest, util, assign, 0, n, m)
        if found:
            return [assign[j] for j in range(m)]
        return None
    finally:
        free(util)
        free(assign)


cdef inline int _better(i64* a, i64* b, int n) noexcept nogil:
    # 1 if key a > key b, lexicographic over n entries
    cdef int t
    for t in range(n):
        if a[t] > b[t]:
            return 1
        if a[t] < b[t]:
            return 0
    return 0


cdef void _key(i64* util, i64* key, int n, int mode) noexcept nogil:
    cdef int t, s
    cdef i64 x, cnt, prod
    if mode == 0:
        cnt = 0
        prod = 1
        for t in range(n):
            if util[t] > 0:
                cnt += 1
                prod *= util[t]
        key[0] = cnt
        key[1] = prod
    else:
        for t in range(n):
            key[t] = util[t]
        for t in range(1, n):
            x = key[t]
            s = t - 1
            while s >= 0 and key[s] > x:
                key[s + 1] = key[s]
                s -= 1
            key[s + 1] = x


def best_assignment(const i64[:, ::1] values, int mode):
    """Maximise a key over all assignments; first maximiser in visiting order wins.

    mode 0: (number of agents with positive utility, product over them).
    mode 1: ascending-sorted utility vector (leximin).
    """
    cdef int n = values.shape[0]
    cdef int m = values.shape[1]
    cdef int klen = 2 if mode == 0 else n
    cdef i64* util = <i64*> malloc(n * sizeof(i64))
    cdef int* assign = <int*> malloc(m * sizeof(int))
    cdef int* best = <int*> malloc(m * sizeof(int))
    cdef i64* key = <i64*> malloc(klen * sizeof(i64))
    cdef i64* bkey = <i64*> malloc(klen * sizeof(i64))
    cdef int i, j, t, have = 0
    try:
        with nogil:
            for i in range(n):
                util[i] = 0
            for j in range(m):
                assign[j] = 0
                util[0] += values[0, j]
            while True:
                _key(util, key, n, mode)
                if not have or _better(key, bkey, klen):
                    have = 1
                    for t in range(klen):
                        bkey[t] = key[t]
                    for t in range(m):
                        best[t] = assign[t]
                # odometer step, last good fastest
                j = m - 1
                while j >= 0 and assign[j] == n - 1:
                    util[n - 1] -= values[n - 1, j]
                    assign[j] = 0
                    util[0] += values[0, j]
                    j -= 1
                if j < 0:
                    break
                util[assign[j]] -= values[assign[j], j]
                assign[j] += 1
                util[assign[j]] += values[assign[j], j]
        return [best[t] for t in range(m)], [bkey[t] for t in range(klen)]
    finally:
        free(util)
        free(assign)
        free(best)
        free(key)
        free(bkey)
