"""EF1+PO as a local-search problem over (1+eps)-grid market configurations.

Values are rounded down to integral powers of ``r = 1 + eps`` and every price
is ``r**q`` for an integer exponent ``q``. A configuration is *valid* when the
allocation is on MBB under the rounded values and each exponent lies in
``[0, max_exponent]``. Because every ratio is a power of ``r``, MBB ratios
are tracked as integer exponents; only spending comparisons need Fractions.

The neighbour function runs the price-rise algorithm with a single least
spender (lowest index on ties) until the least spending strictly grows or the
configuration becomes eps-price-EF1. Zero-spending agents stuck in closed,
thin components are treated as inert, exactly as in :mod:`fairmarket.market`.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering

from .errors import StepBudgetExceeded
from .market import component_of, find_violating_path, inert_agents, pef1_among
from .model import Allocation, Instance, MarketOutcome, MBBGraph, bundle_price


@dataclass(frozen=True)
class EpsilonScheme:
    epsilon: Fraction
    vmax: int
    pmax: Fraction
    max_exponent: int

    @property
    def ratio(self) -> Fraction:
        return 1 + self.epsilon

    @classmethod
    def build(cls, instance: Instance, epsilon: Fraction) -> "EpsilonScheme":
        """Scheme with price ceiling p_max = 4 m^2 vmax^3 (rounded up to the grid)."""
        epsilon = Fraction(epsilon)
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        vmax = instance.vmax
        pmax = Fraction(4 * instance.m ** 2 * vmax ** 3)
        return cls(epsilon, vmax, pmax, _ceil_log(pmax, 1 + epsilon))

    @classmethod
    def strict(cls, instance: Instance) -> "EpsilonScheme":
        """eps = 1/(12 m^3 vmax^4): fine enough that EF1 follows from the rounding bound alone."""
        return cls.build(instance, Fraction(1, 12 * instance.m ** 3 * instance.vmax ** 4))

    @classmethod
    def test(cls, instance: Instance, epsilon: Fraction | None = None) -> "EpsilonScheme":
        """Coarse grid for desk-scale runs.

        The default 1/(3 m vmax) is the coarsest step for which an eps-pEF1
        fixpoint is EF1 on the original integers: the slack compounds to
        (1+eps)^2 - 1 < 1/(m vmax), below one unit of utility.
        """
        if epsilon is None:
            epsilon = Fraction(1, 3 * instance.m * instance.vmax)
        return cls.build(instance, epsilon)


def _floor_log(v, r: Fraction) -> int:
    """Largest e >= 0 with r**e <= v, for v >= 1, by exact integer comparisons.

    Binary lifting over the squares r, r^2, r^4, ... keeps both sides as
    integer numerator/denominator pairs, so no power is computed twice.
    """
    a, b = r.numerator, r.denominator
    v = Fraction(v)
    vn, vd = v.numerator, v.denominator
    squares = [(a, b)]  # (a^(2^k), b^(2^k))
    while squares[-1][0] * vd <= vn * squares[-1][1]:
        x, y = squares[-1]
        squares.append((x * x, y * y))
    e, pa, pb = 0, 1, 1  # r**e = pa / pb <= v
    for k in range(len(squares) - 1, -1, -1):
        x, y = squares[k]
        if pa * x * vd <= vn * pb * y:
            e += 1 << k
            pa, pb = pa * x, pb * y
    return e


def _ceil_log(v, r: Fraction) -> int:
    e = _floor_log(v, r)
    return e if r ** e == v else e + 1


def value_exponents(instance: Instance, scheme: EpsilonScheme) -> tuple[tuple[int | None, ...], ...]:
    """floor(log_r v_ij) per entry, None for zero values."""
    r = scheme.ratio
    cache: dict[int, int] = {}
    out = []
    for row in instance.values:
        cur = []
        for v in row:
            if v == 0:
                cur.append(None)
            else:
                if v not in cache:
                    cache[v] = _floor_log(v, r)
                cur.append(cache[v])
        out.append(tuple(cur))
    return tuple(out)


def round_valuations(instance: Instance, scheme: EpsilonScheme) -> list[list[Fraction]]:
    r = scheme.ratio
    return [[Fraction(0) if e is None else r ** e for e in row] for row in value_exponents(instance, scheme)]


@dataclass(frozen=True)
class Configuration:
    allocation: Allocation
    exponents: tuple[int, ...]


@total_ordering
@dataclass(frozen=True)
class LexCost:
    delta: int
    min_spending: Fraction

    def key(self):
        return (self.delta, self.min_spending)

    def __lt__(self, other: "LexCost") -> bool:
        return self.key() < other.key()


BOTTOM = LexCost(-1, Fraction(-1))


class _Market:
    """Per-instance helper: cached powers of r and exponent-based MBB data."""

    def __init__(self, instance: Instance, scheme: EpsilonScheme):
        self.instance = instance
        self.scheme = scheme
        self.r = scheme.ratio
        self.e = value_exponents(instance, scheme)
        self._pow: dict[int, Fraction] = {}

    def power(self, q: int) -> Fraction:
        p = self._pow.get(q)
        if p is None:
            p = self._pow[q] = self.r ** q
        return p

    def outcome(self, cfg: Configuration) -> MarketOutcome:
        return MarketOutcome(cfg.allocation, tuple(self.power(q) for q in cfg.exponents))

    def bang(self, q) -> list[int | None]:
        """Per-agent MBB exponent: max_j (e_ij - q_j)."""
        out = []
        for row in self.e:
            vals = [e - qj for e, qj in zip(row, q) if e is not None]
            out.append(max(vals) if vals else None)
        return out

    def graph(self, cfg: Configuration) -> MBBGraph:
        q = cfg.exponents
        d = self.bang(q)
        mbb = []
        for i, row in enumerate(self.e):
            mbb.append(frozenset(j for j, e in enumerate(row) if e is not None and e - q[j] == d[i]))
        alpha = tuple(self.power(x) if x is not None else Fraction(0) for x in d)
        return MBBGraph(alpha, tuple(mbb), cfg.allocation.owners(self.instance.m))

    def valid(self, cfg: Configuration) -> bool:
        inst = self.instance
        if len(cfg.exponents) != inst.m or len(cfg.allocation.bundles) != inst.n:
            return False
        owners = cfg.allocation.owners(inst.m)
        if -1 in owners or sum(len(b) for b in cfg.allocation.bundles) != inst.m:
            return False
        if any(q < 0 or q > self.scheme.max_exponent for q in cfg.exponents):
            return False
        g = self.graph(cfg)
        return all(b <= g.mbb[i] for i, b in enumerate(cfg.allocation.bundles))

    def active(self, cfg: Configuration, graph: MBBGraph | None = None) -> frozenset[int]:
        graph = graph or self.graph(cfg)
        return frozenset(range(self.instance.n)) - inert_agents(self.instance, self.outcome(cfg), graph)


def initial_configuration(instance: Instance, scheme: EpsilonScheme) -> Configuration:
    """Each good to a highest rounded-value agent (lowest index on ties), priced at that value."""
    e = value_exponents(instance, scheme)
    assignment, q = [], []
    for j in range(instance.m):
        owner = max((i for i in range(instance.n) if e[i][j] is not None), key=lambda i: (e[i][j], -i))
        assignment.append(owner)
        q.append(e[owner][j])
    return Configuration(Allocation.from_assignment(assignment, instance.n), tuple(q))


def _cost(mk: _Market, cfg: Configuration) -> LexCost:
    if not mk.valid(cfg):
        return BOTTOM
    graph = mk.graph(cfg)
    active = mk.active(cfg, graph)
    out = mk.outcome(cfg)
    delta = 1 if _eps_pef1(out, active, mk.scheme.epsilon) else 0
    lo = min((bundle_price(out, i) for i in active), default=Fraction(0))
    return LexCost(delta, lo)


def config_cost(instance: Instance, scheme: EpsilonScheme, cfg: Configuration) -> LexCost:
    """(eps-pEF1 flag, least spending over non-inert agents), or BOTTOM if invalid."""
    return _cost(_Market(instance, scheme), cfg)


def _eps_pef1(out: MarketOutcome, agents, epsilon: Fraction) -> bool:
    scale = 1 + epsilon
    agents = sorted(agents)
    spend = {i: bundle_price(out, i) for i in agents}
    for h in agents:
        b = out.bundles[h]
        if not b:
            continue
        rest = spend[h] - max(out.prices[j] for j in b)
        if any(scale * spend[i] < rest for i in agents if i != h):
            return False
    return True


@dataclass
class WalkStats:
    steps: int = 0
    transfers: int = 0
    price_rises: int = 0
    grid_steps: int = 0
    triggers: Counter = field(default_factory=Counter)
    max_exponent: int = 0
    costs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "transfers": self.transfers,
            "priceRises": self.price_rises,
            "gridSteps": self.grid_steps,
            "triggers": dict(self.triggers),
            "maxExponent": self.max_exponent,
        }


def event_budget(instance: Instance, scheme: EpsilonScheme) -> int:
    """Events (transfers + grid price steps) allowed over a whole walk.

    Grid steps raise at least one exponent by one and exponents never fall,
    so there are at most m * max_exponent of them; between two of them the
    transfers are bounded by n^3 m per least-spender identity, with at most
    n + 1 identities.
    """
    n, m = instance.n, instance.m
    return (m * scheme.max_exponent + 1) * (n + 1) * (n ** 3 * m + 1)


def _least(mk: _Market, out: MarketOutcome, active) -> int | None:
    if not active:
        return None
    return min(active, key=lambda i: (bundle_price(out, i), i))


def _run_algorithm(mk: _Market, cfg: Configuration, stats: WalkStats, budget: int) -> Configuration:
    """Run the single-least-spender algorithm until min spending grows or eps-pEF1 holds."""
    inst = mk.instance
    eps = mk.scheme.epsilon
    start_graph = mk.graph(cfg)
    start_active = mk.active(cfg, start_graph)
    out = mk.outcome(cfg)
    s0 = min((bundle_price(out, i) for i in start_active), default=Fraction(0))
    events = 0
    while True:
        graph = mk.graph(cfg)
        active = mk.active(cfg, graph)
        out = mk.outcome(cfg)
        if _eps_pef1(out, active, eps):
            return cfg
        i = _least(mk, out, active)
        if bundle_price(out, i) > s0:
            return cfg
        events += 1
        if events > budget:
            raise StepBudgetExceeded(f"neighbour computation exceeded {budget} events on {inst.values}")
        path = find_violating_path(inst, out, graph, "ef1", {i}, eps)
        if path is not None:
            cfg = Configuration(cfg.allocation.moved(path.good, path.sender, path.receiver), cfg.exponents)
            stats.transfers += 1
            continue
        comp = component_of(out, graph, {i})
        cfg, trigger = _raise(mk, cfg, comp, graph, i, stats, budget)
        stats.price_rises += 1
        stats.triggers[trigger] += 1
        if trigger == "b":
            return cfg


def _raise(mk: _Market, cfg: Configuration, comp, graph: MBBGraph, i: int, stats: WalkStats, budget: int):
    """Lift component prices by the fewest grid steps that reach an event.

    Events are checked in the order (b) eps-pEF1 reached, (c) an agent outside
    the component becomes the least spender, (a) a new MBB edge from the
    component to an outside good. Once one of them holds it keeps holding as
    prices climb further, so the first firing step is found by doubling and
    bisection rather than one step at a time.
    """
    q = cfg.exponents
    d = mk.bang(q)
    gaps = [
        d[h] - (mk.e[h][j] - q[j])
        for h in comp.agents
        for j in range(mk.instance.m)
        if j not in comp.goods and mk.e[h][j] is not None
    ]
    k_a = min(gaps) if gaps else None
    active = mk.active(cfg, graph)

    def lift(k: int) -> Configuration:
        return Configuration(cfg.allocation, tuple(x + k if j in comp.goods else x for j, x in enumerate(q)))

    def trigger(k: int) -> str | None:
        out = mk.outcome(lift(k))
        if _eps_pef1(out, active, mk.scheme.epsilon):
            return "b"
        if _least(mk, out, active) not in comp.agents:
            return "c"
        if k == k_a:
            return "a"
        return None

    if k_a is not None:
        hi = k_a
    else:
        hi = 1
        while trigger(hi) is None:
            hi *= 2
            if hi > budget:
                raise StepBudgetExceeded("price rises do not reach an event")
    lo = 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if trigger(mid) is None:
            lo = mid
        else:
            hi = mid
    stats.grid_steps += hi
    if stats.grid_steps > budget:
        raise StepBudgetExceeded("price rises exceed the grid budget")
    lifted = lift(hi)
    stats.max_exponent = max(stats.max_exponent, max(lifted.exponents))
    return lifted, trigger(hi)


def neighbor_D(instance: Instance, scheme: EpsilonScheme, cfg: Configuration,
               stats: WalkStats | None = None) -> Configuration:
    """The unique neighbour of ``cfg``; invalid input maps to the initial configuration."""
    mk = _Market(instance, scheme)
    stats = stats if stats is not None else WalkStats()
    if not mk.valid(cfg):
        return initial_configuration(instance, scheme)
    return _run_algorithm(mk, cfg, stats, event_budget(instance, scheme))


@dataclass(frozen=True)
class FixpointCertificate:
    """A posteriori margins; each guarantee holds when its margin is below 1."""
    ef1_margin: Fraction
    po_margin: Fraction

    @property
    def ef1(self) -> bool:
        return self.ef1_margin < 1

    @property
    def po(self) -> bool:
        return self.po_margin < 1


def certify_fixpoint(instance: Instance, scheme: EpsilonScheme, cfg: Configuration) -> FixpointCertificate:
    """Margins that transfer an eps-pEF1 market fixpoint to the original values.

    EF1: original utilities are within a factor (1+eps)^2 of price terms, so a
    residual envy is below ((1+eps)^2 - 1) u_i, and integrality closes it
    when that is under 1. PO: a Pareto improvement would need
    1/alpha_k > eps S with S <= (1+eps) p(M); the margin is
    eps (1+eps) max alpha p(M), which is scale free.
    """
    mk = _Market(instance, scheme)
    out = mk.outcome(cfg)
    graph = mk.graph(cfg)
    r = scheme.ratio
    u = max(sum(instance.values[i][j] for j in cfg.allocation.bundles[i]) for i in range(instance.n))
    ef1 = (r * r - 1) * u
    po = scheme.epsilon * r * max(graph.alpha) * sum(out.prices)
    return FixpointCertificate(ef1, po)


def local_search(instance: Instance, scheme: EpsilonScheme,
                 start: Configuration | None = None) -> tuple[Configuration, WalkStats]:
    """Follow the neighbour function from the initial configuration to a fixpoint."""
    mk = _Market(instance, scheme)
    stats = WalkStats()
    budget = event_budget(instance, scheme)
    cfg = start if start is not None else initial_configuration(instance, scheme)
    if not mk.valid(cfg):
        cfg = initial_configuration(instance, scheme)
    stats.costs.append(_cost(mk, cfg))
    while True:
        nxt = _run_algorithm(mk, cfg, stats, budget)
        if nxt == cfg:
            return cfg, stats
        stats.steps += 1
        if stats.steps > budget:
            raise StepBudgetExceeded(f"walk exceeded {budget} steps")
        stats.costs.append(_cost(mk, nxt))
        cfg = nxt
