"""Solvers that exploit instance structure.

* achievable bundle utilities per agent (subset sums),
* goods grouped into labels by identical value columns, with an exact
  utility-vector feasibility search over label counts,
* exhaustive MNW / leximin / predicate search over feasible utility vectors,
* the perturb-then-solve EF1+PO pipeline for a small number of agents.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import lcm, prod
from typing import Callable

from . import config
from .errors import BudgetExceeded, CapExceeded, DegeneracyUnresolved, NotFound
from .market import solve_ef1_fpo
from .model import Allocation, Instance, MarketOutcome, build_mbb_graph, utilities, validate_instance
from .oracles import Verdict, check_ef1, check_fpo_lp, check_po_bruteforce, leximin_key, mnw_key

log = logging.getLogger(__name__)

SUBSET_SUM_CAP = 1_000_000


@dataclass(frozen=True)
class UtilityTargets:
    per_agent: tuple[frozenset[int], ...]

    @property
    def U(self) -> int:
        return max(len(t) for t in self.per_agent)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(t) for t in self.per_agent)


def achievable_utilities(instance: Instance, cap: int = SUBSET_SUM_CAP) -> UtilityTargets:
    """Every bundle utility each agent can reach (all subset sums of its row)."""
    out = []
    for row in instance.values:
        sums = {0}
        for v in row:
            if v:
                sums |= {s + v for s in sums}
                if len(sums) > cap:
                    raise CapExceeded(f"more than {cap} achievable utilities")
        out.append(frozenset(sums))
    return UtilityTargets(tuple(out))


@dataclass(frozen=True)
class LabelTable:
    labels: tuple[int, ...]            # good -> label id
    columns: tuple[tuple[int, ...], ...]  # label id -> value column
    counts: tuple[int, ...]            # label id -> number of goods

    @property
    def n(self) -> int:
        return len(self.columns[0])

    def value(self, agent: int, label: int) -> int:
        return self.columns[label][agent]

    def goods_of(self, label: int) -> list[int]:
        return [j for j, l in enumerate(self.labels) if l == label]


def label_goods(instance: Instance) -> LabelTable:
    cols = [instance.column(j) for j in range(instance.m)]
    distinct = sorted(set(cols))
    ids = {c: k for k, c in enumerate(distinct)}
    labels = tuple(ids[c] for c in cols)
    counts = tuple(labels.count(k) for k in range(len(distinct)))
    return LabelTable(labels, tuple(distinct), counts)


def _compositions(total: int, parts: int):
    """All (c_0, ..., c_{parts-1}) with nonnegative entries summing to total, c_0 ascending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _counts_to_allocation(table: LabelTable, counts: list[tuple[int, ...]]) -> Allocation:
    n = table.n
    bundles: list[set[int]] = [set() for _ in range(n)]
    for label, split in enumerate(counts):
        goods = table.goods_of(label)
        pos = 0
        for i in range(n):
            bundles[i].update(goods[pos:pos + split[i]])
            pos += split[i]
    return Allocation(tuple(frozenset(b) for b in bundles))


def feasible_for_target(table: LabelTable, targets) -> Allocation | None:
    """Allocation giving agent i exactly ``targets[i]``, or None when infeasible.

    Depth-first search over per-label count splits with memoised dead ends.
    Goods inside a label are handed out in ascending index order.
    """
    n = table.n
    L = len(table.counts)
    if len(targets) != n:
        raise ValueError(f"expected {n} targets")
    # suffix maxima: most utility agent i can still collect from labels >= l
    room = [[0] * (L + 1) for _ in range(n)]
    for i in range(n):
        for l in range(L - 1, -1, -1):
            room[i][l] = room[i][l + 1] + table.counts[l] * table.value(i, l)
    splits = [list(_compositions(c, n)) for c in table.counts]

    @lru_cache(maxsize=None)
    def search(l: int, rem: tuple[int, ...]):
        if l == L:
            return () if not any(rem) else None
        for split in splits[l]:
            nxt = tuple(rem[i] - split[i] * table.value(i, l) for i in range(n))
            if any(r < 0 or r > room[i][l + 1] for i, r in enumerate(nxt)):
                continue
            tail = search(l + 1, nxt)
            if tail is not None:
                return (split,) + tail
        return None

    start = tuple(targets)
    if any(t < 0 or t > room[i][0] for i, t in enumerate(start)):
        return None
    found = search(0, start)
    if found is None:
        return None
    return _counts_to_allocation(table, list(found))


def feasible_vectors(table: LabelTable, cap: int | None = None) -> set[tuple[int, ...]]:
    """All utility vectors some allocation achieves (joint search over label splits)."""
    cap = config.enum_cap() if cap is None else cap
    n = table.n
    states = {(0,) * n}
    for l, c in enumerate(table.counts):
        col = table.columns[l]
        gains = {tuple(s[i] * col[i] for i in range(n)) for s in _compositions(c, n)}
        states = {tuple(a + b for a, b in zip(st, g)) for st in states for g in gains}
        if len(states) > cap:
            raise CapExceeded(f"more than {cap} feasible utility vectors")
    return states


@dataclass(frozen=True)
class NKResult:
    allocation: Allocation
    utilities: tuple[int, ...]
    score: object


def solve_constant_nk(instance: Instance, objective: str = "mnw",
                      predicate: Callable[[Instance, Allocation], bool] | None = None,
                      method: str = "joint", cap: int | None = None) -> NKResult:
    """Optimise over feasible utility vectors of a constant-(n, k) instance.

    ``method="joint"`` builds the feasible set in one pass over labels;
    ``method="targets"`` enumerates T_1 x ... x T_n and calls
    :func:`feasible_for_target` on each vector. Both give the same set.
    """
    cap = config.enum_cap() if cap is None else cap
    table = label_goods(instance)
    T = achievable_utilities(instance)
    size = prod(T.sizes())
    if size > cap:
        raise CapExceeded(f"|T| = {size} exceeds the cap {cap}")
    if method == "joint":
        feasible = sorted(feasible_vectors(table, cap))
    elif method == "targets":
        feasible = [u for u in product(*(sorted(t) for t in T.per_agent))
                    if feasible_for_target(table, u) is not None]
    else:
        raise ValueError(f"unknown method {method!r}")

    if objective == "predicate":
        if predicate is None:
            raise ValueError("predicate mode needs a predicate")
        for u in feasible:
            alloc = feasible_for_target(table, u)
            if predicate(instance, alloc):
                return NKResult(alloc, u, None)
        raise NotFound("no feasible utility vector passes the predicate")
    if objective == "mnw":
        best = max(feasible, key=mnw_key)  # max() keeps the first (lexicographically smallest) maximiser
        score = prod(best)
    elif objective == "leximin":
        best = max(feasible, key=leximin_key)
        score = leximin_key(best)
    else:
        raise ValueError(f"unknown objective {objective!r}")
    alloc = feasible_for_target(table, best)
    return NKResult(alloc, tuple(best), score)


@dataclass(frozen=True)
class PerturbedInstance:
    base: Instance
    dbar: Fraction
    deltas: tuple[tuple[Fraction, ...], ...]
    values: tuple[tuple[Fraction, ...], ...]

    @property
    def delta(self) -> Fraction:
        return max(max(r) for r in self.deltas)

    @property
    def pmax(self) -> Fraction:
        b = self.base
        return 1 / (2 * b.m * b.vmax * self.delta)

    def integerized(self) -> tuple[Instance, int]:
        """Same instance scaled to integers; returns (instance, scale)."""
        scale = lcm(*(v.denominator for row in self.values for v in row))
        rows = [[int(v * scale) for v in row] for row in self.values]
        return validate_instance(rows), scale


def default_dbar(instance: Instance) -> Fraction:
    n, m = instance.n, instance.m
    return Fraction(1, 4 * m * m * instance.vmax * (n * m + m + 1))


def _degenerate(values) -> bool:
    n, m = len(values), len(values[0])
    for i in range(n):
        for i2 in range(i + 1, n):
            for j in range(m):
                for j2 in range(j + 1, m):
                    a, b, c, d = values[i][j], values[i][j2], values[i2][j], values[i2][j2]
                    if a and b and c and d and a * d == b * c:
                        return True
    return False


def perturb_instance(instance: Instance, seed_scale: Fraction | None = None,
                     retries: int = 20) -> PerturbedInstance:
    """Add delta_ij = dbar^((i+1)n) + dbar^(j+1) to every positive value.

    ``dbar`` halves until no two agents value any pair of goods in the same
    ratio, so the perturbed market has no degenerate 4-cycles.
    """
    n, m = instance.n, instance.m
    dbar = default_dbar(instance) if seed_scale is None else Fraction(seed_scale)
    bound = Fraction(1, 2 * m * instance.vmax)
    for _ in range(retries + 1):
        deltas = tuple(
            tuple(dbar ** ((i + 1) * n) + dbar ** (j + 1) if instance.values[i][j] > 0 else Fraction(0)
                  for j in range(m))
            for i in range(n)
        )
        values = tuple(tuple(instance.values[i][j] + deltas[i][j] for j in range(m)) for i in range(n))
        if max(max(r) for r in deltas) < bound and not _degenerate(values):
            return PerturbedInstance(instance, dbar, deltas, values)
        dbar /= 2
    raise DegeneracyUnresolved(f"could not perturb {instance.values} within {retries} retries")


def po_transfer_margin(pert: PerturbedInstance, outcome: MarketOutcome) -> Fraction:
    """max_h delta * alpha_h * p(M) / (1 + delta) with alpha under the base values.

    Below 1, the fPO certificate ``outcome`` for the perturbed instance
    implies the allocation is PO for the base instance. The quantity is
    invariant under scaling the prices.
    """
    base = pert.base
    p = outcome.prices
    total = sum(p, Fraction(0))
    alpha = max(Fraction(base.values[h][j]) / p[j] for h in range(base.n) for j in range(base.m))
    d = pert.delta
    return d * alpha * total / (1 + d)


@dataclass
class ConstantNResult:
    allocation: Allocation
    method: str
    perturbed: PerturbedInstance
    prices: tuple[Fraction, ...] | None
    certificate: dict[str, Verdict] = field(default_factory=dict)
    transfers: int = 0
    price_rises: int = 0


def solve_constant_n_ef1_po(instance: Instance, attempts: int = 8, verify: bool = True) -> ConstantNResult:
    """EF1+PO allocation via a perturbed, non-degenerate instance.

    Runs the EF1+fPO market solver on the integer-scaled perturbation; if the
    price certificate is too wide for the PO transfer bound, ``dbar`` shrinks
    and the run repeats. After ``attempts`` failures the perturbed instance
    is searched exhaustively for an EF1+fPO allocation instead.
    """
    if instance.n == 1:
        alloc = Allocation((frozenset(range(instance.m)),))
        pert = perturb_instance(instance)
        return ConstantNResult(alloc, "trivial", pert, None, _certify(instance, alloc) if verify else {})
    dbar = default_dbar(instance)
    pert = None
    for _ in range(attempts):
        pert = perturb_instance(instance, dbar)
        scaled, _scale = pert.integerized()
        try:
            res = solve_ef1_fpo(scaled)
        except BudgetExceeded:
            log.warning("market solver hit its budget on a perturbed instance; using brute force")
            break
        margin = po_transfer_margin(pert, res.outcome)
        if margin < 1:
            out = ConstantNResult(res.allocation, "market", pert, res.outcome.prices,
                                  transfers=res.trace.transfers, price_rises=res.trace.price_rises)
            if verify:
                out.certificate = _certify(instance, res.allocation)
            return out
        # shrink so the margin would drop below 1 if prices stayed put
        dbar = pert.dbar / (2 * (margin.numerator // margin.denominator + 1))
    pert = pert or perturb_instance(instance, dbar)
    scaled, _ = pert.integerized()
    for a in product(range(instance.n), repeat=instance.m):
        alloc = Allocation.from_assignment(a, instance.n)
        if check_ef1(scaled, alloc) and check_fpo_lp(scaled, alloc, cap=10 ** 9):
            out = ConstantNResult(alloc, "bruteforce", pert, None)
            if verify:
                out.certificate = _certify(instance, alloc)
            return out
    raise NotFound("no EF1+fPO allocation of the perturbed instance")  # pragma: no cover


def _certify(instance: Instance, alloc: Allocation) -> dict[str, Verdict]:
    cert = {"ef1": check_ef1(instance, alloc)}
    if instance.n ** instance.m <= config.enum_cap():
        cert["po-bruteforce"] = check_po_bruteforce(instance, alloc)
    return cert
