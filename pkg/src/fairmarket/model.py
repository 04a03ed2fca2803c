"""Exact-arithmetic domain types: instances, allocations, prices and the MBB graph.

Prices and ratios are :class:`fractions.Fraction`; utilities stay Python ints.
Agents and goods are 0-based dense indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import EmptyInstance, InvalidInstance, NegativeValue, UnvaluedAgent, UnvaluedGood

Rational = Fraction


@dataclass(frozen=True)
class Instance:
    n: int
    m: int
    values: tuple[tuple[int, ...], ...]

    @property
    def vmax(self) -> int:
        return max(max(row) for row in self.values)

    @property
    def k(self) -> int:
        """Largest number of distinct values used by a single agent."""
        return max(len(set(row)) for row in self.values)

    @property
    def is_positive(self) -> bool:
        return all(v > 0 for row in self.values for v in row)

    @property
    def is_binary(self) -> bool:
        return all(v in (0, 1) for row in self.values for v in row)

    def column(self, good: int) -> tuple[int, ...]:
        return tuple(row[good] for row in self.values)

    def total_value(self, agent: int) -> int:
        return sum(self.values[agent])


def validate_instance(raw: Sequence[Sequence[int]], n: int | None = None, m: int | None = None) -> Instance:
    """Build an :class:`Instance` from a nested integer matrix, rejecting bad input."""
    rows = [list(r) for r in raw]
    if n is None:
        n = len(rows)
    if m is None:
        m = len(rows[0]) if rows else 0
    if n <= 0 or m <= 0:
        raise EmptyInstance(f"need at least one agent and one good (n={n}, m={m})")
    if len(rows) != n:
        raise InvalidInstance(f"expected {n} rows, got {len(rows)}")
    for i, row in enumerate(rows):
        if len(row) != m:
            raise InvalidInstance(f"row {i} has {len(row)} entries, expected {m}")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, int):
                raise InvalidInstance(f"value at ({i}, {j}) is not an integer: {v!r}")
            if v < 0:
                raise NegativeValue(f"negative value {v} at ({i}, {j})")
    for j in range(m):
        if all(rows[i][j] == 0 for i in range(n)):
            raise UnvaluedGood(f"good {j} is valued 0 by every agent")
    for i in range(n):
        if all(v == 0 for v in rows[i]):
            raise UnvaluedAgent(f"agent {i} values every good at 0")
    return Instance(n, m, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class Allocation:
    bundles: tuple[frozenset[int], ...]

    @classmethod
    def from_bundles(cls, bundles: Iterable[Iterable[int]], m: int | None = None) -> "Allocation":
        bs = tuple(frozenset(b) for b in bundles)
        seen: set[int] = set()
        for b in bs:
            if seen & b:
                raise InvalidInstance("bundles are not disjoint")
            seen |= b
        if m is not None and seen != set(range(m)):
            raise InvalidInstance("bundles do not cover every good exactly once")
        return cls(bs)

    @classmethod
    def from_assignment(cls, assignment: Sequence[int], n: int) -> "Allocation":
        bundles: list[set[int]] = [set() for _ in range(n)]
        for j, i in enumerate(assignment):
            bundles[i].add(j)
        return cls(tuple(frozenset(b) for b in bundles))

    @property
    def n(self) -> int:
        return len(self.bundles)

    def owners(self, m: int) -> tuple[int, ...]:
        owner = [-1] * m
        for i, b in enumerate(self.bundles):
            for j in b:
                owner[j] = i
        return tuple(owner)

    def moved(self, good: int, src: int, dst: int) -> "Allocation":
        bs = list(self.bundles)
        bs[src] = bs[src] - {good}
        bs[dst] = bs[dst] | {good}
        return Allocation(tuple(bs))

    def as_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.bundles]


@dataclass(frozen=True)
class MarketOutcome:
    allocation: Allocation
    prices: tuple[Fraction, ...]

    def __post_init__(self):
        if any(p <= 0 for p in self.prices):
            raise InvalidInstance("prices must be strictly positive")

    @property
    def bundles(self) -> tuple[frozenset[int], ...]:
        return self.allocation.bundles


@dataclass(frozen=True)
class MBBGraph:
    alpha: tuple[Fraction, ...]
    mbb: tuple[frozenset[int], ...]
    owner: tuple[int, ...]


def utility(instance: Instance, allocation: Allocation, agent: int) -> int:
    row = instance.values[agent]
    return sum(row[j] for j in allocation.bundles[agent])


def utilities(instance: Instance, allocation: Allocation) -> tuple[int, ...]:
    return tuple(utility(instance, allocation, i) for i in range(instance.n))


def bundle_price(outcome: MarketOutcome, agent: int) -> Fraction:
    return sum((outcome.prices[j] for j in outcome.bundles[agent]), Fraction(0))


def spendings(outcome: MarketOutcome) -> tuple[Fraction, ...]:
    return tuple(bundle_price(outcome, i) for i in range(outcome.allocation.n))


def build_mbb_graph(instance: Instance, outcome: MarketOutcome) -> MBBGraph:
    """MBB ratio and MBB set per agent. Goods valued 0 are never MBB."""
    prices = outcome.prices
    alphas = []
    sets = []
    for row in instance.values:
        best = Fraction(0)
        chosen: list[int] = []
        for j, v in enumerate(row):
            if v == 0:
                continue
            r = Fraction(v) / prices[j]
            if r > best:
                best, chosen = r, [j]
            elif r == best:
                chosen.append(j)
        alphas.append(best)
        sets.append(frozenset(chosen))
    return MBBGraph(tuple(alphas), tuple(sets), outcome.allocation.owners(instance.m))


def is_on_mbb(instance: Instance, outcome: MarketOutcome) -> bool:
    g = build_mbb_graph(instance, outcome)
    return all(b <= g.mbb[i] for i, b in enumerate(outcome.bundles))


@dataclass(frozen=True)
class Transfer:
    good: int
    from_agent: int
    to_agent: int
    path_length: int


@dataclass(frozen=True)
class PriceRise:
    component_agents: frozenset[int]
    component_goods: frozenset[int]
    beta: Fraction
    trigger: str  # "gamma1" | "gamma2"


@dataclass(frozen=True)
class Snapshot:
    """Solver state just after an event (or at start, for the initial entry)."""
    min_spending: Fraction
    min_utility: int
    least_set: frozenset[int]
    utilities: tuple[int, ...]
    spendings: tuple[Fraction, ...]
    on_mbb: bool


@dataclass
class TraceLog:
    initial: Snapshot | None = None
    events: list[tuple[int, Transfer | PriceRise, Snapshot, frozenset[int]]] = field(default_factory=list)

    def record(self, event: Transfer | PriceRise, after: Snapshot, sources_before: frozenset[int]) -> None:
        self.events.append((len(self.events) + 1, event, after, sources_before))

    @property
    def transfers(self) -> int:
        return sum(isinstance(e, Transfer) for _, e, _, _ in self.events)

    @property
    def price_rises(self) -> int:
        return sum(isinstance(e, PriceRise) for _, e, _, _ in self.events)

    def snapshots(self) -> list[Snapshot]:
        return ([self.initial] if self.initial else []) + [s for _, _, s, _ in self.events]

    def to_dict(self) -> dict:
        def snap(s: Snapshot) -> dict:
            return {
                "minSpending": fraction_str(s.min_spending),
                "minUtility": s.min_utility,
                "leastSet": sorted(s.least_set),
                "utilities": list(s.utilities),
                "onMbb": s.on_mbb,
            }

        out = []
        for t, e, s, _ in self.events:
            if isinstance(e, Transfer):
                d = {"t": t, "type": "transfer", "good": e.good, "from": e.from_agent,
                     "to": e.to_agent, "pathLength": e.path_length}
            else:
                d = {"t": t, "type": "priceRise", "agents": sorted(e.component_agents),
                     "goods": sorted(e.component_goods), "beta": fraction_str(e.beta),
                     "trigger": e.trigger}
            d["after"] = snap(s)
            out.append(d)
        return {"initial": snap(self.initial) if self.initial else None, "events": out}


def fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(s: str) -> Fraction:
    num, _, den = s.partition("/")
    return Fraction(int(num), int(den or 1))
