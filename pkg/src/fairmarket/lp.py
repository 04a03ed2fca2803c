"""Dense two-phase simplex over Fractions (Bland's rule).

Desk-scale only: the tableau is a list of Fraction rows and every pivot is
exact, so termination follows from Bland's anti-cycling rule.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    value: Fraction | None = None
    x: list[Fraction] | None = None


def _pivot(T: list[list[Fraction]], basis: list[int], r: int, c: int) -> None:
    row = T[r]
    piv = row[c]
    if piv != 1:
        T[r] = row = [a / piv for a in row]
    for k, other in enumerate(T):
        if k != r:
            f = other[c]
            if f:
                T[k] = [a - f * b for a, b in zip(other, row)]
    basis[r] = c


def _run(T, basis, cost, allowed) -> str:
    ncols = len(T[0]) - 1
    while True:
        entering = -1
        for j in range(ncols):
            if not allowed[j]:
                continue
            rc = cost[j] - sum(cost[basis[r]] * T[r][j] for r in range(len(T)))
            if rc > 0:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        best_r = -1
        best_ratio = None
        for r, row in enumerate(T):
            a = row[entering]
            if a > 0:
                ratio = row[-1] / a
                if best_ratio is None or ratio < best_ratio or (ratio == best_ratio and basis[r] < basis[best_r]):
                    best_r, best_ratio = r, ratio
        if best_r < 0:
            return UNBOUNDED
        _pivot(T, basis, best_r, entering)


def maximize(c: Sequence, A_ub: Sequence[Sequence], b_ub: Sequence) -> LPResult:
    """Maximise c·x subject to A_ub x <= b_ub and x >= 0, exactly."""
    nv = len(c)
    rows = len(A_ub)
    neg = [Fraction(b_ub[r]) < 0 for r in range(rows)]
    n_art = sum(neg)
    ncols = nv + rows + n_art
    T: list[list[Fraction]] = []
    basis: list[int] = []
    art = nv + rows
    for r in range(rows):
        sign = -1 if neg[r] else 1
        row = [Fraction(sign * a) for a in A_ub[r]] + [Fraction(0)] * (rows + n_art) + [Fraction(sign * b_ub[r])]
        row[nv + r] = Fraction(sign)
        if neg[r]:
            row[art] = Fraction(1)
            basis.append(art)
            art += 1
        else:
            basis.append(nv + r)
        T.append(row)

    allowed = [True] * ncols
    if n_art:
        cost1 = [Fraction(0)] * (nv + rows) + [Fraction(-1)] * n_art
        _run(T, basis, cost1, allowed)
        if any(T[r][-1] != 0 for r in range(rows) if basis[r] >= nv + rows):
            return LPResult(INFEASIBLE)
        for r in range(len(T) - 1, -1, -1):
            if basis[r] >= nv + rows:
                for j in range(nv + rows):
                    if T[r][j] != 0:
                        _pivot(T, basis, r, j)
                        break
                else:
                    del T[r]
                    del basis[r]
        for j in range(nv + rows, ncols):
            allowed[j] = False

    cost = [Fraction(a) for a in c] + [Fraction(0)] * (rows + n_art)
    status = _run(T, basis, cost, allowed)
    if status != OPTIMAL:
        return LPResult(status)
    x = [Fraction(0)] * ncols
    for r, bcol in enumerate(basis):
        x[bcol] = T[r][-1]
    value = sum((cost[j] * x[j] for j in range(nv)), Fraction(0))
    return LPResult(OPTIMAL, value, x[:nv])
