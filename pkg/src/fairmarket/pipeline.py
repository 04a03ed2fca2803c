"""Solver dispatch plus oracle checks, producing :class:`ResultFile` records."""
from __future__ import annotations

import time
from dataclasses import dataclass

from . import config
from .errors import InvalidParams, NotPositiveInstance
from .io import ResultFile
from .market import solve_ef1_fpo, solve_eq1_fpo
from .model import Allocation, Instance, MarketOutcome, is_on_mbb, utilities
from .oracles import Verdict, check_ef1, check_eq1, check_fpo_lp, check_pef1, check_po_bruteforce
from .pls import EpsilonScheme, local_search
from .structured import feasible_vectors, label_goods, solve_constant_n_ef1_po, solve_constant_nk

METHODS = ("market", "constant-n", "constant-nk", "pls")
FAIRNESS = ("ef1", "eq1")


@dataclass
class Solved:
    allocation: Allocation
    prices: tuple | None
    stats: dict
    guarantees: frozenset[str]


def _solve(instance: Instance, fairness: str, method: str, objective: str | None) -> Solved:
    if fairness not in FAIRNESS:
        raise InvalidParams(f"unknown fairness {fairness!r}")
    if method == "market":
        res = (solve_ef1_fpo if fairness == "ef1" else solve_eq1_fpo)(instance)
        stats = {"transfers": res.trace.transfers, "priceRises": res.trace.price_rises}
        return Solved(res.allocation, res.outcome.prices, stats,
                      frozenset({fairness, "fpo-certificate", "fpo-lp", "po-bruteforce"}))
    if method == "constant-n":
        if fairness != "ef1":
            raise InvalidParams("constant-n supports ef1 only")
        res = solve_constant_n_ef1_po(instance, verify=False)
        stats = {"transfers": res.transfers, "priceRises": res.price_rises, "route": res.method}
        return Solved(res.allocation, None, stats, frozenset({"ef1", "po-bruteforce"}))
    if method == "constant-nk":
        if fairness == "ef1":
            res = solve_constant_nk(instance, objective or "mnw")
            fair = {"ef1"} if (objective or "mnw") == "mnw" else set()
        else:
            if not instance.is_positive:
                raise NotPositiveInstance("EQ1 with PO needs strictly positive values")
            feasible = feasible_vectors(label_goods(instance))

            def eq1_and_maximal(inst: Instance, alloc: Allocation) -> bool:
                u = utilities(inst, alloc)
                dominated = any(all(a >= b for a, b in zip(w, u)) and w != u for w in feasible)
                return not dominated and check_eq1(inst, alloc).holds

            res = solve_constant_nk(instance, "predicate", predicate=eq1_and_maximal)
            fair = {"eq1"}
        stats = {"utilities": list(res.utilities)}
        return Solved(res.allocation, None, stats, frozenset(fair | {"po-bruteforce"}))
    if method == "pls":
        if fairness != "ef1":
            raise InvalidParams("pls supports ef1 only")
        scheme = EpsilonScheme.test(instance)
        cfg, walk = local_search(instance, scheme)
        stats = {"transfers": walk.transfers, "priceRises": walk.price_rises, "steps": walk.steps}
        return Solved(cfg.allocation, None, stats, frozenset({"ef1", "po-bruteforce"}))
    raise InvalidParams(f"unknown method {method!r}")


def run_checks(instance: Instance, allocation: Allocation, prices=None, fairness: str = "ef1",
               full: bool = False, which=None) -> dict[str, Verdict]:
    """Oracle verdicts by name.

    Without ``which``, the fairness oracle and the price certificate always
    run, and the exhaustive oracles run under ``full`` when within caps.
    ``which`` names the oracles to run instead (caps still apply).
    """
    if which is None:
        which = {fairness, "fpo-certificate", "pef1"}
        if full:
            which |= {"fpo-lp", "po-bruteforce"}
    which = set(which)
    checks: dict[str, Verdict] = {}
    if "ef1" in which:
        checks["ef1"] = check_ef1(instance, allocation)
    if "eq1" in which:
        checks["eq1"] = check_eq1(instance, allocation)
    if prices is not None:
        outcome = MarketOutcome(allocation, tuple(prices))
        if "fpo-certificate" in which:
            checks["fpo-certificate"] = Verdict(is_on_mbb(instance, outcome))
        if "pef1" in which and fairness == "ef1":
            checks["pef1"] = check_pef1(outcome)
    if "fpo-lp" in which and instance.n * instance.m <= config.lp_cap():
        checks["fpo-lp"] = check_fpo_lp(instance, allocation)
    if "po-bruteforce" in which and instance.n ** instance.m <= config.enum_cap():
        checks["po-bruteforce"] = check_po_bruteforce(instance, allocation)
    return checks


def checks_json(checks: dict[str, Verdict]) -> dict[str, dict]:
    return {k: {"holds": v.holds, "witness": v.witness} for k, v in checks.items()}


def solve(instance: Instance, fairness: str = "ef1", method: str = "market", check: str = "auto",
          objective: str | None = None, name: str | None = None) -> tuple[ResultFile, list[str]]:
    """Run one solver and its checks; returns the record and the refuted guarantees."""
    t0 = time.perf_counter()
    solved = _solve(instance, fairness, method, objective)
    wall = time.perf_counter() - t0
    checks = run_checks(instance, solved.allocation, solved.prices, fairness, full=(check == "full"))
    refuted = sorted(k for k, v in checks.items() if k in solved.guarantees and not v.holds)
    stats = dict(solved.stats)
    stats["wallTime"] = round(wall, 6)
    rf = ResultFile(
        bundles=solved.allocation.as_lists(), prices=solved.prices, checks=checks_json(checks),
        stats=stats, method=method, fairness=fairness, name=name,
    )
    return rf, refuted
