"""Fair and efficient allocation of indivisible goods via Fisher-market price rises.

All solver and oracle decisions use exact integers and Fractions.
"""
from .errors import (
    BudgetExceeded,
    FairMarketError,
    InstanceTooLarge,
    InvalidInstance,
    InvalidParams,
    NoFiniteFactor,
    NotFound,
    ParseError,
    StepBudgetExceeded,
)
from .market import solve_ef1_fpo, solve_eq1_fpo
from .model import Allocation, Instance, MarketOutcome, build_mbb_graph, is_on_mbb, validate_instance
from .oracles import (
    bruteforce_best,
    check_ef1,
    check_eq1,
    check_fpo_lp,
    check_pef1,
    check_po_bruteforce,
)
from .pls import EpsilonScheme, local_search, neighbor_D
from .structured import solve_constant_n_ef1_po, solve_constant_nk

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "BudgetExceeded",
    "EpsilonScheme",
    "FairMarketError",
    "Instance",
    "InstanceTooLarge",
    "InvalidInstance",
    "InvalidParams",
    "MarketOutcome",
    "NoFiniteFactor",
    "NotFound",
    "ParseError",
    "StepBudgetExceeded",
    "bruteforce_best",
    "build_mbb_graph",
    "check_ef1",
    "check_eq1",
    "check_fpo_lp",
    "check_pef1",
    "check_po_bruteforce",
    "is_on_mbb",
    "local_search",
    "neighbor_D",
    "solve_constant_n_ef1_po",
    "solve_constant_nk",
    "solve_ef1_fpo",
    "solve_eq1_fpo",
    "validate_instance",
]
