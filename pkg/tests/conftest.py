from __future__ import annotations

import os
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from fairmarket.model import Instance, validate_instance  # noqa: E402

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def repair(rows: list[list[int]]) -> list[list[int]]:
    """Make every row and column hold a positive entry (deterministically)."""
    n, m = len(rows), len(rows[0])
    for j in range(m):
        if all(rows[i][j] == 0 for i in range(n)):
            rows[j % n][j] = 1
    for i in range(n):
        if all(v == 0 for v in rows[i]):
            rows[i][i % m] = 1
    return rows


@st.composite
def instances(draw, n=(1, 4), m=(1, 6), vmax=10, positive=False) -> Instance:
    nn = draw(st.integers(*n))
    mm = draw(st.integers(*m))
    lo = 1 if positive else 0
    rows = draw(st.lists(st.lists(st.integers(lo, vmax), min_size=mm, max_size=mm), min_size=nn, max_size=nn))
    return validate_instance(repair(rows))


@st.composite
def allocations(draw, instance: Instance):
    assign = draw(st.lists(st.integers(0, instance.n - 1), min_size=instance.m, max_size=instance.m))
    from fairmarket.model import Allocation

    return Allocation.from_assignment(assign, instance.n)


@pytest.fixture
def e1() -> Instance:
    return validate_instance([[2, 1, 3], [1, 2, 1]])
