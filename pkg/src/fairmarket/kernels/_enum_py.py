"""Pure-Python twins of the compiled enumerators in ``_enum.pyx``.

Same visiting order and tie-breaking, so results are interchangeable.
"""
from __future__ import annotations

from itertools import product


def first_dominating(values, base):
    n, m = len(values), len(values[0])
    rest = [[0] * (m + 1) for _ in range(n)]
    for i in range(n):
        for j in range(m - 1, -1, -1):
            rest[i][j] = rest[i][j + 1] + values[i][j]
    util = [0] * n
    assign = [0] * m

    def dfs(j: int) -> bool:
        if j == m:
            return all(u >= b for u, b in zip(util, base)) and any(u > b for u, b in zip(util, base))
        for h in range(n):
            if util[h] + rest[h][j] < base[h]:
                return False
        for i in range(n):
            util[i] += values[i][j]
            assign[j] = i
            if dfs(j + 1):
                return True
            util[i] -= values[i][j]
        return False

    return list(assign) if dfs(0) else None


def _key(util, mode):
    if mode == 0:
        prod = 1
        cnt = 0
        for u in util:
            if u > 0:
                cnt += 1
                prod *= u
        return (cnt, prod)
    return tuple(sorted(util))


def best_assignment(values, mode):
    n, m = len(values), len(values[0])
    cols = [[values[i][j] for i in range(n)] for j in range(m)]
    best = None
    bkey = None
    for assign in product(range(n), repeat=m):
        util = [0] * n
        for j, i in enumerate(assign):
            util[i] += cols[j][i]
        key = _key(util, mode)
        if bkey is None or key > bkey:
            best, bkey = assign, key
    return list(best), list(bkey)
