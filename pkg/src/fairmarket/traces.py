"""Run-time invariants checked against a solver's :class:`TraceLog`.

Each checker returns a list of human-readable violations; empty means the
trace is clean. They only read snapshots, never solver internals.
"""
from __future__ import annotations

from .model import Instance, PriceRise, TraceLog, Transfer


def check_on_mbb(trace: TraceLog) -> list[str]:
    return [f"snapshot {k} is off MBB" for k, s in enumerate(trace.snapshots()) if not s.on_mbb]


def check_min_spending(trace: TraceLog) -> list[str]:
    """Least spending never drops, and a price rise multiplies it by exactly beta.

    Also checks that every agent inside the raised component has its spending
    scaled by beta.
    """
    out = []
    prev = trace.initial
    for t, event, snap, _ in trace.events:
        if prev.min_spending is not None and snap.min_spending is not None:
            if snap.min_spending < prev.min_spending:
                out.append(f"event {t}: least spending fell from {prev.min_spending} to {snap.min_spending}")
            if isinstance(event, PriceRise) and snap.min_spending != event.beta * prev.min_spending:
                out.append(f"event {t}: least spending {snap.min_spending} != beta * {prev.min_spending}")
        if isinstance(event, PriceRise):
            for i in event.component_agents:
                if snap.spendings[i] != event.beta * prev.spendings[i]:
                    out.append(f"event {t}: agent {i} spending not scaled by beta")
        prev = snap
    return out


def check_min_utility(trace: TraceLog) -> list[str]:
    out = []
    prev = trace.initial
    for t, _, snap, _ in trace.events:
        if prev.min_utility is not None and snap.min_utility is not None and snap.min_utility < prev.min_utility:
            out.append(f"event {t}: least utility fell from {prev.min_utility} to {snap.min_utility}")
        prev = snap
    return out


def reentries(trace: TraceLog) -> dict[int, list[tuple[int, int]]]:
    """Per agent, (utility when it left the least set, utility when it came back)."""
    snaps = trace.snapshots()
    n = len(snaps[0].utilities)
    left: dict[int, int] = {}
    pairs: dict[int, list[tuple[int, int]]] = {i: [] for i in range(n)}
    for before, after in zip(snaps, snaps[1:]):
        for i in range(n):
            if i in before.least_set and i not in after.least_set:
                left[i] = before.utilities[i]
            elif i not in before.least_set and i in after.least_set and i in left:
                pairs[i].append((left.pop(i), after.utilities[i]))
    return pairs


def check_reentry(instance: Instance, trace: TraceLog, U_per_agent: list[int]) -> list[str]:
    """Coming back to the least set means strictly more utility; at most U_i returns."""
    out = []
    for i, pairs in reentries(trace).items():
        for k, (u0, u1) in enumerate(pairs):
            if u1 <= u0:
                out.append(f"agent {i} re-entry {k}: utility {u1} not above {u0}")
        if len(pairs) > U_per_agent[i]:
            out.append(f"agent {i} re-entered {len(pairs)} times, more than U_i = {U_per_agent[i]}")
    return out


def epochs(trace: TraceLog) -> list[tuple[frozenset[int], int]]:
    """Maximal runs of events sharing a least set, with their transfer counts."""
    runs: list[tuple[frozenset[int], int]] = []
    for _, event, _, src in trace.events:
        inc = 1 if isinstance(event, Transfer) else 0
        if runs and runs[-1][0] == src:
            runs[-1] = (src, runs[-1][1] + inc)
        else:
            runs.append((src, inc))
    return runs


def check_epochs(instance: Instance, trace: TraceLog) -> list[str]:
    cap = instance.n ** 3 * instance.m
    return [f"epoch {k} with least set {sorted(s)} has {c} transfers > {cap}"
            for k, (s, c) in enumerate(epochs(trace)) if c > cap]


def check_trace(instance: Instance, trace: TraceLog, U_per_agent: list[int], mode: str = "ef1") -> list[str]:
    """All trace invariants for an EF1 (spending) or EQ1 (utility) run."""
    out = check_on_mbb(trace)
    out += check_min_spending(trace) if mode == "ef1" else check_min_utility(trace)
    out += check_reentry(instance, trace, U_per_agent)
    out += check_epochs(instance, trace)
    return out
