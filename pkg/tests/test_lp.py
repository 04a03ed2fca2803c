from fractions import Fraction
from itertools import combinations

from hypothesis import given
from hypothesis import strategies as st

from fairmarket.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, maximize

F = Fraction


def _solve_square(M, b):
    """Gaussian elimination over Fractions; None if singular."""
    n = len(M)
    A = [list(map(F, row)) + [F(v)] for row, v in zip(M, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return None
        A[c], A[piv] = A[piv], A[c]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c] / A[c][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [A[r][n] / A[r][r] for r in range(n)]


def vertex_optimum(c, A, b):
    """Best objective over all basic feasible points (bounded LPs only)."""
    nv = len(c)
    rows = [list(r) for r in A] + [[-1 if k == j else 0 for k in range(nv)] for j in range(nv)]
    rhs = list(b) + [0] * nv
    best = None
    for tight in combinations(range(len(rows)), nv):
        x = _solve_square([rows[t] for t in tight], [rhs[t] for t in tight])
        if x is None:
            continue
        if all(sum(F(a) * xi for a, xi in zip(r, x)) <= v for r, v in zip(rows, rhs)):
            val = sum(F(ci) * xi for ci, xi in zip(c, x))
            best = val if best is None else max(best, val)
    return best


def test_textbook():
    res = maximize([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert res.status == OPTIMAL and res.value == 36 and res.x == [2, 6]


def test_fractional_optimum():
    res = maximize([1, 1], [[2, 1], [1, 2]], [1, 1])
    assert res.value == F(2, 3) and res.x == [F(1, 3), F(1, 3)]


def test_negative_rhs_phase_one():
    # x + y >= 2 written as -x - y <= -2
    res = maximize([-1, -2], [[-1, -1], [1, 0]], [-2, 5])
    assert res.status == OPTIMAL and res.value == -2 and res.x == [2, 0]


def test_infeasible():
    assert maximize([1], [[1], [-1]], [1, -2]).status == INFEASIBLE


def test_unbounded():
    assert maximize([1, 0], [[0, 1]], [3]).status == UNBOUNDED


def test_degenerate_cycling_guard():
    # Beale's classic cycling example; Bland's rule must terminate.
    c = [F(3, 4), -150, F(1, 50), -6]
    A = [[F(1, 4), -60, F(-1, 25), 9], [F(1, 2), -90, F(-1, 50), 3], [0, 0, 1, 0]]
    res = maximize(c, A, [0, 0, 1])
    assert res.status == OPTIMAL and res.value == F(1, 20)


coef = st.integers(-4, 6)


@given(st.integers(2, 3).flatmap(lambda nv: st.tuples(
    st.lists(coef, min_size=nv, max_size=nv),
    st.lists(st.lists(coef, min_size=nv, max_size=nv), min_size=1, max_size=3),
    st.lists(st.integers(-3, 8), min_size=3, max_size=3),
)))
def test_matches_vertex_enumeration(case):
    c, A, b = case
    nv = len(c)
    A = [list(r) for r in A] + [[1 if k == j else 0 for k in range(nv)] for j in range(nv)]
    b = list(b[: len(A) - nv]) + [5] * nv  # box keeps it bounded
    res = maximize(c, A, b)
    best = vertex_optimum(c, A, b)
    if best is None:
        assert res.status == INFEASIBLE
    else:
        assert res.status == OPTIMAL and res.value == best
        assert all(sum(F(a) * x for a, x in zip(r, res.x)) <= v for r, v in zip(A, b))
        assert all(x >= 0 for x in res.x)
