"""Seeded instance generators for the standard instance classes."""
from __future__ import annotations

import random

from .errors import InvalidParams
from .model import Instance, validate_instance

FAMILIES = ("random", "binary", "kary", "positive", "identical")


def _repair(rows: list[list[int]], rng: random.Random, high: int) -> None:
    """Give every all-zero column and row one positive entry, in place."""
    n, m = len(rows), len(rows[0])
    for j in range(m):
        if all(rows[i][j] == 0 for i in range(n)):
            rows[rng.randrange(n)][j] = rng.randint(1, high)
    for i in range(n):
        if all(v == 0 for v in rows[i]):
            rows[i][rng.randrange(m)] = rng.randint(1, high)


def _kary_row(rng: random.Random, m: int, k: int, vmax: int) -> list[int]:
    palette = rng.sample(range(0, vmax + 1), min(k, vmax + 1))
    if all(v == 0 for v in palette):
        palette[0] = rng.randint(1, vmax)
    row = [rng.choice(palette) for _ in range(m)]
    if all(v == 0 for v in row):
        row[rng.randrange(m)] = max(palette)
    return row


def generate(family: str, n: int, m: int, vmax: int, seed: int, k: int = 2) -> Instance:
    """Deterministic instance of ``family`` for a fixed seed.

    Families: random (values in 0..vmax), binary (0/1), kary (at most k
    distinct values per agent), positive (values in 1..vmax) and identical
    (every agent shares one positive row).
    """
    if n < 1 or m < 1 or vmax < 1:
        raise InvalidParams(f"n, m and vmax must be positive (got {n}, {m}, {vmax})")
    if family not in FAMILIES:
        raise InvalidParams(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    rng = random.Random(f"{family}:{n}:{m}:{vmax}:{seed}:{k}")
    if family == "random":
        rows = [[rng.randint(0, vmax) for _ in range(m)] for _ in range(n)]
        _repair(rows, rng, vmax)
    elif family == "binary":
        rows = [[rng.randint(0, 1) for _ in range(m)] for _ in range(n)]
        _repair(rows, rng, 1)
    elif family == "kary":
        if k < 1:
            raise InvalidParams("kary needs k >= 1")
        rows = [_kary_row(rng, m, k, vmax) for _ in range(n)]
        # Repairs reuse a value the row already has, so the row stays k-ary.
        for j in range(m):
            if all(rows[i][j] == 0 for i in range(n)):
                i = rng.randrange(n)
                rows[i][j] = rng.choice([v for v in rows[i] if v > 0])
        if k == 1:
            # A single value per row must then be positive everywhere.
            rows = [[max(r)] * m for r in rows]
    elif family == "positive":
        rows = [[rng.randint(1, vmax) for _ in range(m)] for _ in range(n)]
    else:
        row = [rng.randint(1, vmax) for _ in range(m)]
        rows = [list(row) for _ in range(n)]
    return validate_instance(rows)


def family_holds(instance: Instance, family: str, k: int = 2) -> bool:
    if family == "binary":
        return instance.is_binary
    if family == "kary":
        return instance.k <= k
    if family == "positive":
        return instance.is_positive
    if family == "identical":
        return len(set(instance.values)) == 1 and instance.is_positive
    return family == "random"
