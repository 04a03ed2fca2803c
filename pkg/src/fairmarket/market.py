"""Price-rise market algorithms for EF1+fPO and EQ1+fPO allocations.

Both solvers keep an integral market outcome on MBB edges. They move goods
along alternating paths that start at the worst-off agents, and they raise
prices on the component of those agents when no path helps.

Path convention: an alternating path ``(i0, j1, i1, ..., jl, il)`` has
``j_t`` in the MBB set of ``i_{t-1}`` and owned by ``i_t``. The last good
``jl`` is moved from ``il`` to ``i_{l-1}``, which keeps the allocation on MBB.

Inert agents
------------
With zero values a least spender can be stuck at spending 0 inside a closed
component: every agent reachable from it holds at most one good, and nobody
in it values anything outside. No price rise can change its spending, and
price-EF1 can never hold for the whole market, yet every envy relation
involving the component already holds up to one good. Such components are
marked inert. Least spenders, the pEF1 stopping test and the second
price-rise factor then ignore them. Inert components never gain or lose
goods afterwards, so the final allocation is EF1 and stays on MBB.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from . import config
from .errors import IterationBudgetExceeded, NoFiniteFactor, NotPositiveInstance
from .model import (
    Allocation,
    Instance,
    MarketOutcome,
    MBBGraph,
    PriceRise,
    Snapshot,
    TraceLog,
    Transfer,
    build_mbb_graph,
    bundle_price,
    is_on_mbb,
    utilities,
)

log = logging.getLogger(__name__)

EF1 = "ef1"
EQ1 = "eq1"
WITH_GAMMA2 = "with_gamma2"
GAMMA1_ONLY = "gamma1_only"


@dataclass(frozen=True)
class Component:
    agents: frozenset[int]
    goods: frozenset[int]
    levels: dict[int, int]


@dataclass(frozen=True)
class ViolatingPath:
    agents: tuple[int, ...]
    goods: tuple[int, ...]

    @property
    def good(self) -> int:
        return self.goods[-1]

    @property
    def sender(self) -> int:
        return self.agents[-1]

    @property
    def receiver(self) -> int:
        return self.agents[-2]

    def __len__(self) -> int:
        return len(self.goods)


def initial_outcome(instance: Instance) -> MarketOutcome:
    """Welfare-maximising allocation priced at the owner's value (ties: lowest agent)."""
    n, m, v = instance.n, instance.m, instance.values
    assignment = []
    prices = []
    for j in range(m):
        owner = max(range(n), key=lambda i: (v[i][j], -i))
        assignment.append(owner)
        prices.append(Fraction(v[owner][j]))
    return MarketOutcome(Allocation.from_assignment(assignment, n), tuple(prices))


def _argmin(keys: dict[int, object]) -> frozenset[int]:
    if not keys:
        return frozenset()
    lo = min(keys.values())
    return frozenset(i for i, k in keys.items() if k == lo)


def least_spenders(outcome: MarketOutcome, among=None) -> frozenset[int]:
    agents = range(outcome.allocation.n) if among is None else among
    return _argmin({i: bundle_price(outcome, i) for i in agents})


def least_utility_agents(instance: Instance, allocation: Allocation, among=None) -> frozenset[int]:
    u = utilities(instance, allocation)
    agents = range(instance.n) if among is None else among
    return _argmin({i: u[i] for i in agents})


def component_of(outcome: MarketOutcome, graph: MBBGraph, sources) -> Component:
    """Closure of ``sources`` under MBB edges (agent to good) and ownership (good to owner)."""
    levels = {i: 0 for i in sources}
    goods: set[int] = set()
    frontier = sorted(levels)
    depth = 0
    while frontier:
        nxt = []
        for a in frontier:
            for j in sorted(graph.mbb[a]):
                if j in goods:
                    continue
                goods.add(j)
                o = graph.owner[j]
                if o not in levels:
                    levels[o] = depth + 1
                    nxt.append(o)
        frontier = sorted(nxt)
        depth += 1
    return Component(frozenset(levels), frozenset(goods), levels)


def _slack(instance: Instance, outcome: MarketOutcome, mode: str):
    """Per-agent 'own' score and per-(agent, good) removal score for the mode."""
    if mode == EF1:
        own = [bundle_price(outcome, i) for i in range(instance.n)]
        return own, lambda h, j: outcome.prices[j]
    own = list(utilities(instance, outcome.allocation))
    return own, lambda h, j: instance.values[h][j]


def find_violating_path(instance: Instance, outcome: MarketOutcome, graph: MBBGraph,
                        mode: str = EF1, sources=None, epsilon: Fraction | int = 0) -> ViolatingPath | None:
    """First alternating path whose last agent violates the up-to-one condition.

    Sources are scanned in index order. From each source the search is
    breadth-first; within a layer candidates are ordered by (agent, good) and
    the receiver is the lowest-index agent of the previous layer that has the
    good in its MBB set. ``epsilon`` scales the source's side by (1 + epsilon).
    """
    own, removal = _slack(instance, outcome, mode)
    slack = 1 + Fraction(epsilon)
    if sources is None:
        if mode == EF1:
            sources = least_spenders(outcome)
        else:
            sources = least_utility_agents(instance, outcome.allocation)
    for s in sorted(sources):
        target = own[s] * slack
        parent: dict[int, tuple[int, int]] = {}
        seen = {s}
        layer = [s]
        while layer:
            cands: dict[tuple[int, int], int] = {}
            for a in layer:
                for j in sorted(graph.mbb[a]):
                    h = graph.owner[j]
                    if h in seen:
                        continue
                    if (h, j) not in cands:
                        cands[(h, j)] = a
            for (h, j) in sorted(cands):
                if own[h] - removal(h, j) > target:
                    a = cands[(h, j)]
                    agents = [h, a]
                    goods_ = [j]
                    while agents[-1] != s:
                        pa, pj = parent[agents[-1]]
                        goods_.append(pj)
                        agents.append(pa)
                    return ViolatingPath(tuple(reversed(agents)), tuple(reversed(goods_)))
            nxt = []
            for (h, j) in sorted(cands):
                if h not in seen:
                    seen.add(h)
                    parent[h] = (cands[(h, j)], j)
                    nxt.append(h)
            layer = sorted(nxt)
    return None


def apply_transfer(outcome: MarketOutcome, path: ViolatingPath) -> MarketOutcome:
    alloc = outcome.allocation.moved(path.good, path.sender, path.receiver)
    return MarketOutcome(alloc, outcome.prices)


def _min_or_none(xs):
    xs = list(xs)
    return min(xs) if xs else None


def price_rise_factors(instance: Instance, outcome: MarketOutcome, component: Component,
                       mode: str = WITH_GAMMA2, sources=None, active=None):
    """Return (gamma1, gamma2, beta); ``None`` stands for an infinite factor.

    gamma1 is the factor at which a component agent first gets an MBB edge to
    an outside good. gamma2 is the factor at which an active outside agent's
    spending is matched by the least spenders. A zero least-spender spending
    makes gamma2 infinite.
    """
    graph = build_mbb_graph(instance, outcome)
    v = instance.values
    p = outcome.prices
    gamma1 = _min_or_none(
        graph.alpha[h] * p[j] / v[h][j]
        for h in component.agents
        for j in range(instance.m)
        if j not in component.goods and v[h][j] > 0
    )
    gamma2 = None
    if mode == WITH_GAMMA2:
        agents = range(instance.n) if active is None else active
        if sources is None:
            sources = least_spenders(outcome, agents)
        s = bundle_price(outcome, min(sources))
        if s > 0:
            gamma2 = _min_or_none(bundle_price(outcome, h) / s for h in agents if h not in component.agents)
    finite = [g for g in (gamma1, gamma2) if g is not None]
    if not finite:
        raise NoFiniteFactor(f"no finite price-rise factor for component {sorted(component.agents)}")
    return gamma1, gamma2, min(finite)


def apply_price_rise(outcome: MarketOutcome, component: Component, beta: Fraction) -> MarketOutcome:
    if beta <= 1:
        raise ValueError(f"price-rise factor must exceed 1, got {beta}")
    prices = tuple(p * beta if j in component.goods else p for j, p in enumerate(outcome.prices))
    return MarketOutcome(outcome.allocation, prices)


def inert_agents(instance: Instance, outcome: MarketOutcome, graph: MBBGraph) -> frozenset[int]:
    """Agents in closed, thin components of zero-spending agents (see module docs)."""
    v = instance.values
    bundles = outcome.bundles
    inert: set[int] = set()
    changed = True
    while changed:
        changed = False
        for i in range(instance.n):
            if i in inert or bundles[i]:
                continue
            comp = component_of(outcome, graph, {i})
            if any(len(bundles[h]) > 1 for h in comp.agents):
                continue
            if any(v[h][j] > 0 for h in comp.agents for j in range(instance.m) if j not in comp.goods):
                continue
            inert |= comp.agents
            changed = True
    return frozenset(inert)


def pef1_among(outcome: MarketOutcome, agents) -> bool:
    agents = sorted(agents)
    spend = {i: bundle_price(outcome, i) for i in agents}
    for h in agents:
        b = outcome.bundles[h]
        if not b:
            continue
        worst = spend[h] - max(outcome.prices[j] for j in b)
        if any(spend[i] < worst for i in agents if i != h):
            return False
    return True


def _eq1(instance: Instance, allocation: Allocation) -> bool:
    u = utilities(instance, allocation)
    lo = min(u)
    for h, b in enumerate(allocation.bundles):
        if b and u[h] - max(instance.values[h][j] for j in b) > lo:
            return False
    return True


def event_budget(instance: Instance, U: int | None = None) -> int:
    """Safety valve: multiplier * n^3 m * (n U + n) events."""
    if U is None:
        from .structured import achievable_utilities
        U = achievable_utilities(instance).U
    n, m = instance.n, instance.m
    return config.budget_multiplier() * (n ** 3 * m) * (n * U + n)


def _snapshot(instance, outcome, least, active) -> Snapshot:
    spend = tuple(bundle_price(outcome, i) for i in range(instance.n))
    u = utilities(instance, outcome.allocation)
    return Snapshot(
        min_spending=min((spend[i] for i in active), default=None),
        min_utility=min((u[i] for i in active), default=None),
        least_set=least,
        utilities=u,
        spendings=spend,
        on_mbb=is_on_mbb(instance, outcome),
    )


@dataclass
class SolveResult:
    outcome: MarketOutcome
    trace: TraceLog
    inert: frozenset[int] = frozenset()

    @property
    def allocation(self) -> Allocation:
        return self.outcome.allocation


def solve_ef1_fpo(instance: Instance, budget: int | None = None) -> SolveResult:
    """Compute an integral on-MBB outcome that is price-EF1 (hence EF1 and fPO)."""
    budget = event_budget(instance) if budget is None else budget
    everyone = frozenset(range(instance.n))
    outcome = initial_outcome(instance)
    trace = TraceLog()

    def state(out):
        g = build_mbb_graph(instance, out)
        inert = inert_agents(instance, out, g)
        active = everyone - inert
        return g, inert, active, least_spenders(out, active)

    graph, inert, active, least = state(outcome)
    trace.initial = _snapshot(instance, outcome, least, active)
    while True:
        if len(trace.events) >= budget:
            raise IterationBudgetExceeded(f"more than {budget} events on {instance.values}")
        path = find_violating_path(instance, outcome, graph, EF1, least) if least else None
        if path is not None:
            outcome = apply_transfer(outcome, path)
            event = Transfer(path.good, path.sender, path.receiver, len(path))
        elif pef1_among(outcome, active):
            return SolveResult(outcome, trace, inert)
        else:
            comp = component_of(outcome, graph, least)
            g1, g2, beta = price_rise_factors(instance, outcome, comp, WITH_GAMMA2, least, active)
            outcome = apply_price_rise(outcome, comp, beta)
            trigger = "gamma1" if beta == g1 else "gamma2"
            event = PriceRise(comp.agents, comp.goods, beta, trigger)
        before = least
        graph, inert, active, least = state(outcome)
        trace.record(event, _snapshot(instance, outcome, least, active), before)


def solve_eq1_fpo(instance: Instance, budget: int | None = None) -> SolveResult:
    """Compute an integral on-MBB outcome that is EQ1; needs strictly positive values."""
    if not instance.is_positive:
        raise NotPositiveInstance("EQ1 solver requires every value to be positive")
    budget = event_budget(instance) if budget is None else budget
    everyone = frozenset(range(instance.n))
    outcome = initial_outcome(instance)
    trace = TraceLog()
    graph = build_mbb_graph(instance, outcome)
    least = least_utility_agents(instance, outcome.allocation)
    trace.initial = _snapshot(instance, outcome, least, everyone)
    while True:
        if len(trace.events) >= budget:
            raise IterationBudgetExceeded(f"more than {budget} events on {instance.values}")
        path = find_violating_path(instance, outcome, graph, EQ1, least)
        if path is not None:
            outcome = apply_transfer(outcome, path)
            event = Transfer(path.good, path.sender, path.receiver, len(path))
        elif _eq1(instance, outcome.allocation):
            return SolveResult(outcome, trace)
        else:
            comp = component_of(outcome, graph, least)
            _, _, beta = price_rise_factors(instance, outcome, comp, GAMMA1_ONLY)
            outcome = apply_price_rise(outcome, comp, beta)
            event = PriceRise(comp.agents, comp.goods, beta, "gamma1")
        before = least
        graph = build_mbb_graph(instance, outcome)
        least = least_utility_agents(instance, outcome.allocation)
        trace.record(event, _snapshot(instance, outcome, least, everyone), before)
