"""Caps and budgets, overridable through the environment."""
from __future__ import annotations

import os


def _int_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return int(raw) if raw else default


def enum_cap() -> int:
    """Largest n**m any brute-force routine will enumerate."""
    return _int_env("FAIRMARKET_ENUM_CAP", 2_000_000)


def lp_cap() -> int:
    """Largest number of LP variables (n*m) the exact simplex accepts."""
    return _int_env("FAIRMARKET_LP_CAP", 200)


def budget_multiplier() -> int:
    return _int_env("FAIRMARKET_BUDGET_MULT", 10)
