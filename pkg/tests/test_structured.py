from fractions import Fraction
from itertools import combinations, product
from math import prod

import pytest
from hypothesis import given
from hypothesis import strategies as st

import reference as ref
from conftest import instances
from fairmarket.errors import CapExceeded, NotFound
from fairmarket.generate import generate
from fairmarket.model import Allocation, utilities, validate_instance
from fairmarket.oracles import bruteforce_best, check_ef1, check_fpo_lp, check_po_bruteforce
from fairmarket.structured import (
    achievable_utilities,
    default_dbar,
    feasible_for_target,
    feasible_vectors,
    label_goods,
    perturb_instance,
    solve_constant_n_ef1_po,
    solve_constant_nk,
)

F = Fraction


class TestUtilities:
    def test_e1(self, e1):
        T = achievable_utilities(e1)
        assert T.per_agent[0] == set(range(7))
        assert T.per_agent[1] == {0, 1, 2, 3, 4}

    def test_binary(self):
        T = achievable_utilities(validate_instance([[1] * 5]))
        assert T.per_agent[0] == set(range(6)) and T.U == 6

    def test_cap(self):
        with pytest.raises(CapExceeded):
            achievable_utilities(validate_instance([[1, 2, 4, 8, 16]]), cap=10)


@given(instances(n=(1, 3), m=(1, 8), vmax=12))
def test_utilities_match_subset_sums(inst):
    T = achievable_utilities(inst)
    for i, row in enumerate(inst.values):
        assert T.per_agent[i] == ref.subset_sums(row)
        assert 0 in T.per_agent[i] and max(T.per_agent[i]) == sum(row)
        assert len(T.per_agent[i]) <= inst.m * inst.vmax + 1
        assert len(T.per_agent[i]) <= (inst.m + 1) ** len(set(row))


class TestLabels:
    def test_e1(self, e1):
        t = label_goods(e1)
        assert len(t.counts) == 3 and t.counts == (1, 1, 1)
        assert t.columns == ((1, 2), (2, 1), (3, 1))

    def test_identical_columns(self):
        t = label_goods(validate_instance([[1, 1], [2, 2]]))
        assert t.counts == (2,) and t.goods_of(0) == [0, 1]

    def test_kary_bound(self):
        inst = generate("kary", 3, 8, 5, seed=1, k=2)
        assert len(label_goods(inst).counts) <= 2 ** 3
        assert sum(label_goods(inst).counts) == 8


class TestFeasible:
    def test_e1(self, e1):
        t = label_goods(e1)
        assert feasible_for_target(t, (5, 2)).as_lists() == [[0, 2], [1]]
        assert feasible_for_target(t, (6, 6)) is None
        assert feasible_for_target(t, (0, 4)).as_lists() == [[], [0, 1, 2]]

    def test_out_of_range(self, e1):
        assert feasible_for_target(label_goods(e1), (-1, 0)) is None
        with pytest.raises(ValueError):
            feasible_for_target(label_goods(e1), (1,))


@given(instances(n=(1, 3), m=(1, 5), vmax=4), st.data())
def test_feasible_matches_enumeration(inst, data):
    achieved = {u for _, u in ref.all_utilities([list(r) for r in inst.values])}
    table = label_goods(inst)
    assert feasible_vectors(table) == achieved
    T = achievable_utilities(inst)
    target = tuple(data.draw(st.sampled_from(sorted(t))) for t in T.per_agent)
    alloc = feasible_for_target(table, target)
    assert (alloc is not None) == (target in achieved)
    if alloc is not None:
        assert utilities(inst, alloc) == target


class TestConstantNK:
    def test_e1(self, e1):
        r = solve_constant_nk(e1, "mnw")
        assert r.score == 10 and r.allocation.as_lists() == [[0, 2], [1]]
        assert solve_constant_nk(e1, "leximin").score == (3, 3)

    def test_methods_agree(self, e1):
        for obj in ("mnw", "leximin"):
            a = solve_constant_nk(e1, obj, method="joint")
            b = solve_constant_nk(e1, obj, method="targets")
            assert a.utilities == b.utilities

    def test_identical_single_label(self):
        inst = validate_instance([[2] * 4, [2] * 4])
        r = solve_constant_nk(inst, "mnw")
        assert sorted(map(len, r.allocation.bundles)) == [2, 2]

    def test_predicate(self, e1):
        r = solve_constant_nk(e1, "predicate", predicate=lambda i, a: check_ef1(i, a).holds)
        assert check_ef1(e1, r.allocation)
        with pytest.raises(NotFound):
            solve_constant_nk(e1, "predicate", predicate=lambda i, a: False)

    def test_cap(self, e1):
        with pytest.raises(CapExceeded):
            solve_constant_nk(e1, "mnw", cap=3)


@given(st.integers(1, 3), st.integers(1, 7), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_constant_nk_matches_bruteforce(n, m, k, seed):
    inst = generate("kary", n, m, 6, seed, k=k)
    mnw = solve_constant_nk(inst, "mnw")
    best = bruteforce_best(inst, "mnw")
    assert mnw.score == prod(mnw.utilities)
    assert prod(utilities(inst, mnw.allocation)) == best.score
    lex = solve_constant_nk(inst, "leximin")
    assert lex.score == bruteforce_best(inst, "leximin").score


class TestPerturb:
    def test_zero_and_bounds(self):
        inst = validate_instance([[5, 0, 3], [0, 2, 2]])
        p = perturb_instance(inst)
        assert p.values[0][1] == 0 and p.values[1][0] == 0
        assert 5 < p.values[0][0] <= 5 * (1 + p.delta)
        assert p.delta < F(1, 2 * inst.m * inst.vmax)

    def test_default_dbar(self, e1):
        assert default_dbar(e1) == F(1, 4 * 9 * 3 * (6 + 3 + 1))

    def test_integerized(self, e1):
        p = perturb_instance(e1)
        inst, scale = p.integerized()
        assert all(F(inst.values[i][j], scale) == p.values[i][j] for i in range(2) for j in range(3))


@given(instances(n=(1, 3), m=(1, 5), vmax=6))
def test_perturbation_preserves_strict_order(inst):
    p = perturb_instance(inst)
    goods = range(inst.m)
    subsets = [s for r in range(inst.m + 1) for s in combinations(goods, r)]
    for i, row in enumerate(inst.values):
        for S, T in product(subsets, repeat=2):
            base = sum(row[j] for j in S) - sum(row[j] for j in T)
            pert = sum(p.values[i][j] for j in S) - sum(p.values[i][j] for j in T)
            if base > 0:
                assert pert > 0
            assert row[0] <= p.values[i][0] <= row[0] * (1 + p.delta)


class TestConstantN:
    def test_e1(self, e1):
        r = solve_constant_n_ef1_po(e1)
        assert r.certificate["ef1"] and r.certificate["po-bruteforce"]

    def test_single(self):
        r = solve_constant_n_ef1_po(validate_instance([[1, 2, 3]]))
        assert r.allocation.as_lists() == [[0, 1, 2]]

    def test_identical_two_goods(self):
        r = solve_constant_n_ef1_po(validate_instance([[1, 1], [1, 1]]))
        assert sorted(map(len, r.allocation.bundles)) == [1, 1]


@given(instances(n=(1, 3), m=(1, 6), vmax=8))
def test_constant_n_pipeline(inst):
    r = solve_constant_n_ef1_po(inst)
    assert check_ef1(inst, r.allocation) and check_po_bruteforce(inst, r.allocation)
    pert_inst, _ = r.perturbed.integerized()
    assert check_ef1(pert_inst, r.allocation)
    if r.method == "market":
        assert check_fpo_lp(pert_inst, r.allocation)


@given(instances(n=(2, 3), m=(1, 5), vmax=5), st.data())
def test_ef1_on_perturbed_is_ef1_on_base(inst, data):
    p = perturb_instance(inst)
    pi, _ = p.integerized()
    assign = data.draw(st.lists(st.integers(0, inst.n - 1), min_size=inst.m, max_size=inst.m))
    alloc = Allocation.from_assignment(assign, inst.n)
    if check_ef1(pi, alloc):
        assert check_ef1(inst, alloc)
