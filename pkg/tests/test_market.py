from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import reference as ref
from conftest import instances
from fairmarket.errors import IterationBudgetExceeded, NoFiniteFactor, NotPositiveInstance
from fairmarket.market import (
    EF1,
    EQ1,
    GAMMA1_ONLY,
    WITH_GAMMA2,
    Component,
    apply_price_rise,
    apply_transfer,
    component_of,
    event_budget,
    find_violating_path,
    inert_agents,
    initial_outcome,
    least_spenders,
    least_utility_agents,
    price_rise_factors,
    solve_ef1_fpo,
    solve_eq1_fpo,
)
from fairmarket.model import Allocation, MarketOutcome, build_mbb_graph, is_on_mbb, spendings, validate_instance
from fairmarket.oracles import check_ef1, check_eq1, check_fpo_lp, check_pef1
from fairmarket.structured import achievable_utilities
from fairmarket.traces import check_trace

F = Fraction


def outcome(bundles, prices):
    return MarketOutcome(Allocation.from_bundles([set(b) for b in bundles]), tuple(F(p) for p in prices))


@pytest.fixture
def v441():
    return validate_instance([[4, 1, 1], [1, 8, 8]])


class TestInitial:
    def test_e1(self, e1):
        out = initial_outcome(e1)
        assert out.allocation.as_lists() == [[0, 2], [1]]
        assert out.prices == (2, 2, 3)
        assert is_on_mbb(e1, out)

    def test_tie_to_lowest(self):
        out = initial_outcome(validate_instance([[3, 1], [3, 1]]))
        assert out.allocation.as_lists() == [[0, 1], []] and out.prices == (3, 1)

    def test_single(self):
        out = initial_outcome(validate_instance([[2, 5]]))
        assert out.allocation.as_lists() == [[0, 1]] and out.prices == (2, 5)


class TestLeastSets:
    def test_spenders(self):
        assert least_spenders(outcome([{0}, {1}], (5, 2))) == {1}
        assert least_spenders(outcome([{0}, {1}], (4, 4))) == {0, 1}
        assert least_spenders(outcome([{0}], (4,))) == {0}

    def test_utility(self, e1):
        assert least_utility_agents(e1, Allocation.from_bundles([{0, 2}, {1}])) == {1}


class TestComponent:
    def test_441(self, v441):
        out = outcome([{0}, {1, 2}], (4, 8, 8))
        comp = component_of(out, build_mbb_graph(v441, out), {0})
        assert comp.agents == {0} and comp.goods == {0} and comp.levels == {0: 0}

    def test_all_sources(self, v441):
        out = outcome([{0}, {1, 2}], (4, 8, 8))
        comp = component_of(out, build_mbb_graph(v441, out), {0, 1})
        assert comp.agents == {0, 1} and comp.goods == {0, 1, 2}

    def test_e1_agent2(self, e1):
        out = initial_outcome(e1)
        comp = component_of(out, build_mbb_graph(e1, out), {1})
        assert comp.agents == {1} and comp.goods == {1}

    def test_levels(self):
        inst = validate_instance([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
        out = outcome([set(), {0, 1}, {2}], (1, 1, 1))
        comp = component_of(out, build_mbb_graph(inst, out), {0})
        assert comp.levels == {0: 0, 1: 1, 2: 2}


class TestPaths:
    def test_31(self):
        inst = validate_instance([[3, 1], [3, 1]])
        out = initial_outcome(inst)
        g = build_mbb_graph(inst, out)
        path = find_violating_path(inst, out, g, EF1, least_spenders(out))
        assert path.agents == (1, 0) and path.goods == (0,)
        assert (path.good, path.sender, path.receiver, len(path)) == (0, 0, 1, 1)
        after = apply_transfer(out, path)
        assert after.allocation.as_lists() == [[1], [0]]
        assert after.prices == out.prices and is_on_mbb(inst, after)
        s0, s1 = spendings(out), spendings(after)
        assert s0[0] - s1[0] == 3 and s1[1] - s0[1] == 3

    def test_pef1_outcome_has_no_path(self, e1):
        out = initial_outcome(e1)
        g = build_mbb_graph(e1, out)
        assert check_pef1(out)
        assert find_violating_path(e1, out, g, EF1, least_spenders(out)) is None

    def test_e1_eq1_none(self, e1):
        out = initial_outcome(e1)
        g = build_mbb_graph(e1, out)
        lu = least_utility_agents(e1, out.allocation)
        assert find_violating_path(e1, out, g, EQ1, lu) is None

    def test_epsilon_slack_suppresses(self):
        inst = validate_instance([[3, 1], [3, 1]])
        out = initial_outcome(inst)
        g = build_mbb_graph(inst, out)
        # spending of agent 1 is 0; slack never helps a zero spender
        assert find_violating_path(inst, out, g, EF1, {1}, epsilon=F(1, 2)) is not None


class TestPriceRise:
    def test_factors_441(self, v441):
        out = outcome([{0}, {1, 2}], (4, 8, 8))
        comp = component_of(out, build_mbb_graph(v441, out), {0})
        assert price_rise_factors(v441, out, comp, WITH_GAMMA2, {0}) == (8, 4, 4)
        g1, g2, beta = price_rise_factors(v441, out, comp, GAMMA1_ONLY)
        assert (g1, g2, beta) == (8, None, 8)

    def test_apply(self, v441):
        out = outcome([{0}, {1, 2}], (4, 8, 8))
        comp = component_of(out, build_mbb_graph(v441, out), {0})
        after = apply_price_rise(out, comp, F(4))
        assert after.prices == (16, 8, 8)
        assert is_on_mbb(v441, after)
        assert spendings(after)[0] == 4 * spendings(out)[0]
        with pytest.raises(ValueError):
            apply_price_rise(out, comp, F(1))

    def test_no_finite_factor(self):
        inst = validate_instance([[1, 0], [0, 1]])
        out = outcome([{0}, {1}], (1, 1))
        comp = Component(frozenset({0}), frozenset({0}), {0: 0})
        with pytest.raises(NoFiniteFactor):
            price_rise_factors(inst, out, comp, GAMMA1_ONLY)


class TestSolvers:
    def test_e1(self, e1):
        res = solve_ef1_fpo(e1)
        assert res.allocation.as_lists() == [[0, 2], [1]] and res.outcome.prices == (2, 2, 3)
        assert res.trace.events == []

    def test_31(self):
        res = solve_ef1_fpo(validate_instance([[3, 1], [3, 1]]))
        assert res.allocation.as_lists() == [[1], [0]]
        assert res.trace.transfers == 1 and res.trace.price_rises == 0

    def test_441(self, v441):
        res = solve_ef1_fpo(v441)
        assert res.allocation.as_lists() == [[0], [1, 2]] and res.outcome.prices == (16, 8, 8)
        (_, rise, _, _), = res.trace.events
        assert rise.beta == 4 and rise.trigger == "gamma2"

    def test_eq1_e1_unchanged(self, e1):
        res = solve_eq1_fpo(e1)
        assert res.outcome == initial_outcome(e1) and res.trace.events == []

    def test_eq1_identical(self):
        res = solve_eq1_fpo(validate_instance([[1, 1], [1, 1]]))
        assert sorted(map(len, res.allocation.bundles)) == [1, 1]

    def test_single_agent(self):
        inst = validate_instance([[1, 2]])
        assert solve_ef1_fpo(inst).allocation.as_lists() == [[0, 1]]
        assert solve_eq1_fpo(inst).allocation.as_lists() == [[0, 1]]

    def test_eq1_needs_positive(self, v441):
        with pytest.raises(NotPositiveInstance):
            solve_eq1_fpo(validate_instance([[1, 0], [1, 1]]))

    def test_budget_valve(self, v441):
        with pytest.raises(IterationBudgetExceeded):
            solve_ef1_fpo(v441, budget=0)

    def test_inert_agent(self):
        # Agent 0 only wants good 0, which agent 1 values more; it stays at zero
        # spending, and its whole component {0, 1} is set aside.
        inst = validate_instance([[1, 0, 0], [2, 0, 0], [0, 1, 1]])
        res = solve_ef1_fpo(inst)
        assert check_ef1(inst, res.allocation) and is_on_mbb(inst, res.outcome)
        assert res.inert == {0, 1}
        out = res.outcome
        assert inert_agents(inst, out, build_mbb_graph(inst, out)) == {0, 1}
        assert not check_pef1(out)

    def test_trace_serializes(self, v441):
        d = solve_ef1_fpo(v441).trace.to_dict()
        assert d["events"][0]["type"] == "priceRise" and d["events"][0]["beta"] == "4/1"

    def test_budget_formula(self, e1):
        U = achievable_utilities(e1).U
        assert event_budget(e1) == 10 * (2 ** 3 * 3) * (2 * U + 2)


@given(instances(n=(1, 4), m=(1, 7)))
def test_ef1_solver_sound(inst):
    res = solve_ef1_fpo(inst)
    alloc = res.allocation
    assert is_on_mbb(inst, res.outcome)
    assert ref.ef1(inst.values, alloc.as_lists())
    assert check_fpo_lp(inst, alloc)
    Us = [len(t) for t in achievable_utilities(inst).per_agent]
    assert check_trace(inst, res.trace, Us, "ef1") == []
    if not res.inert:
        assert check_pef1(res.outcome)


@given(instances(n=(1, 4), m=(1, 7), positive=True))
def test_eq1_solver_sound(inst):
    res = solve_eq1_fpo(inst)
    assert is_on_mbb(inst, res.outcome)
    assert ref.eq1(inst.values, res.allocation.as_lists())
    assert check_eq1(inst, res.allocation)
    Us = [len(t) for t in achievable_utilities(inst).per_agent]
    assert check_trace(inst, res.trace, Us, "eq1") == []


@given(instances(n=(2, 4), m=(1, 6)))
def test_transfers_and_rises_keep_mbb(inst):
    out = initial_outcome(inst)
    for _ in range(6):
        g = build_mbb_graph(inst, out)
        ls = least_spenders(out)
        path = find_violating_path(inst, out, g, EF1, ls)
        if path is not None:
            assert path.good in g.mbb[path.receiver] and g.owner[path.good] == path.sender
            out = apply_transfer(out, path)
        else:
            comp = component_of(out, g, ls)
            if comp.agents == set(range(inst.n)):
                break
            try:
                _, _, beta = price_rise_factors(inst, out, comp, WITH_GAMMA2, ls)
            except NoFiniteFactor:
                break
            out = apply_price_rise(out, comp, beta)
        assert is_on_mbb(inst, out)
