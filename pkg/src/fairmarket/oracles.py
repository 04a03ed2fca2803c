"""Independent checkers and exhaustive oracles.

Nothing here shares code with the solvers beyond the domain types, so the
solvers can be tested against these routines.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from . import config, kernels, lp
from .errors import InstanceTooLarge, NotFound
from .model import Allocation, Instance, MarketOutcome, bundle_price, utilities


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Any = None

    def __bool__(self) -> bool:
        return self.holds


HOLDS = Verdict(True)


def _up_to_one(n, own, bundle_value, bundles, removal):
    # own[i] >= bundle_value(i, h) - max removal(i, h, j) for all i, h with bundles[h] nonempty
    for i in range(n):
        for h in range(n):
            if h == i or not bundles[h]:
                continue
            best = max(removal(i, h, j) for j in bundles[h])
            if own(i) < bundle_value(i, h) - best:
                return Verdict(False, (i, h))
    return HOLDS


def check_ef1(instance: Instance, allocation: Allocation) -> Verdict:
    v = instance.values
    b = allocation.bundles
    u = utilities(instance, allocation)
    return _up_to_one(
        instance.n,
        lambda i: u[i],
        lambda i, h: sum(v[i][j] for j in b[h]),
        b,
        lambda i, h, j: v[i][j],
    )


def check_eq1(instance: Instance, allocation: Allocation) -> Verdict:
    v = instance.values
    b = allocation.bundles
    u = utilities(instance, allocation)
    return _up_to_one(instance.n, lambda i: u[i], lambda i, h: u[h], b, lambda i, h, j: v[h][j])


def check_pef1(outcome: MarketOutcome, epsilon: Fraction | int = 0) -> Verdict:
    """(1 + epsilon) * p(x_i) >= p(x_h minus one good) for every ordered pair."""
    p = outcome.prices
    b = outcome.bundles
    n = len(b)
    spend = [bundle_price(outcome, i) for i in range(n)]
    scale = 1 + Fraction(epsilon)
    return _up_to_one(n, lambda i: scale * spend[i], lambda i, h: spend[h], b, lambda i, h, j: p[j])


def _check_cap(instance: Instance, cap: int | None) -> None:
    cap = config.enum_cap() if cap is None else cap
    if instance.n ** instance.m > cap:
        raise InstanceTooLarge(f"{instance.n}^{instance.m} allocations exceed the cap {cap}")


def check_po_bruteforce(instance: Instance, allocation: Allocation, cap: int | None = None,
                        backend: str | None = None) -> Verdict:
    _check_cap(instance, cap)
    base = list(utilities(instance, allocation))
    found = kernels.first_dominating([list(r) for r in instance.values], base, backend=backend)
    if found is None:
        return HOLDS
    return Verdict(False, Allocation.from_assignment(found, instance.n))


def check_fpo_lp(instance: Instance, allocation: Allocation, cap: int | None = None) -> Verdict:
    """Exact LP test for fractional Pareto optimality.

    Maximises total utility gain over fractional y with sum_i y_ij <= 1 and
    every agent at least as well off as under ``allocation``. The allocation
    is fPO iff the optimal gain is exactly zero; otherwise the witness is the
    optimal fractional allocation as an n x m list of Fractions.
    """
    n, m = instance.n, instance.m
    cap = config.lp_cap() if cap is None else cap
    if n * m > cap:
        raise InstanceTooLarge(f"LP with {n * m} variables exceeds the cap {cap}")
    v = instance.values
    u = utilities(instance, allocation)
    idx = lambda i, j: i * m + j  # noqa: E731
    c = [v[i][j] for i in range(n) for j in range(m)]
    A, b = [], []
    for j in range(m):
        row = [0] * (n * m)
        for i in range(n):
            row[idx(i, j)] = 1
        A.append(row)
        b.append(1)
    for i in range(n):
        row = [0] * (n * m)
        for j in range(m):
            row[idx(i, j)] = -v[i][j]
        A.append(row)
        b.append(-u[i])
    res = lp.maximize(c, A, b)
    if res.status != lp.OPTIMAL:  # pragma: no cover - the LP is feasible and bounded
        raise RuntimeError(f"fPO LP unexpectedly {res.status}")
    gain = res.value - sum(u)
    if gain == 0:
        return HOLDS
    y = [[res.x[idx(i, j)] for j in range(m)] for i in range(n)]
    return Verdict(False, y)


def nash_welfare(instance: Instance, allocation: Allocation) -> int:
    """Product of utilities (monotone in the geometric mean)."""
    prod = 1
    for u in utilities(instance, allocation):
        prod *= u
    return prod


def mnw_key(utils) -> tuple[int, int]:
    """(agents with positive utility, product over them); larger is better."""
    prod, cnt = 1, 0
    for u in utils:
        if u > 0:
            cnt += 1
            prod *= u
    return cnt, prod


def leximin_key(utils) -> tuple[int, ...]:
    return tuple(sorted(utils))


@dataclass(frozen=True)
class Best:
    allocation: Allocation
    utilities: tuple[int, ...]
    score: Any


def _all_assignments(n, m):
    from itertools import product
    return product(range(n), repeat=m)


def bruteforce_best(instance: Instance, objective: str = "mnw",
                    predicate: Callable[[Instance, Allocation], bool] | None = None,
                    cap: int | None = None, backend: str | None = None) -> Best:
    """Exhaustive optimiser over all n**m allocations.

    ``objective`` is ``"mnw"`` (score: product of utilities), ``"leximin"``
    (score: sorted utility vector) or ``"predicate"`` (first allocation in
    lexicographic assignment order passing ``predicate``).
    """
    _check_cap(instance, cap)
    n = instance.n
    if objective == "predicate":
        if predicate is None:
            raise ValueError("predicate mode needs a predicate")
        for a in _all_assignments(n, instance.m):
            alloc = Allocation.from_assignment(a, n)
            if predicate(instance, alloc):
                u = utilities(instance, alloc)
                return Best(alloc, u, None)
        raise NotFound("no allocation satisfies the predicate")
    mode = {"mnw": kernels.MNW, "leximin": kernels.LEXIMIN}[objective]
    assign, _ = kernels.best_assignment([list(r) for r in instance.values], mode, backend=backend)
    alloc = Allocation.from_assignment(assign, n)
    u = utilities(instance, alloc)
    score = nash_welfare(instance, alloc) if objective == "mnw" else leximin_key(u)
    return Best(alloc, u, score)
