import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairmarket.errors import InvalidParams
from fairmarket.generate import FAMILIES, family_holds, generate


def test_deterministic():
    a = generate("binary", 2, 4, 1, 7)
    assert a == generate("binary", 2, 4, 1, 7)
    assert all(v in (0, 1) for row in a.values for v in row)


def test_seeds_differ():
    outs = {generate("random", 3, 6, 10, s).values for s in range(20)}
    assert len(outs) > 15


@given(st.sampled_from(FAMILIES), st.integers(1, 4), st.integers(1, 8), st.integers(1, 12),
       st.integers(0, 10 ** 6), st.integers(1, 3))
def test_family_membership(family, n, m, vmax, seed, k):
    inst = generate(family, n, m, vmax, seed, k=k)
    assert (inst.n, inst.m) == (n, m)
    assert family_holds(inst, family, k)
    assert max(max(r) for r in inst.values) <= vmax


def test_kary_two():
    inst = generate("kary", 3, 6, 10, 0, k=2)
    assert all(len(set(r)) <= 2 for r in inst.values)


def test_identical_rows():
    inst = generate("identical", 4, 5, 9, 1)
    assert len(set(inst.values)) == 1


@pytest.mark.parametrize("args", [("random", 0, 3, 5), ("random", 2, 0, 5), ("random", 2, 3, 0),
                                  ("nope", 2, 3, 5)])
def test_invalid_params(args):
    with pytest.raises(InvalidParams):
        generate(*args, seed=0)


def test_kary_zero_k():
    with pytest.raises(InvalidParams):
        generate("kary", 2, 3, 5, 0, k=0)
