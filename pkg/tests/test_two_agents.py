import random

import pytest

import literal
from randinst import generated, random_instance
from tempfair.errors import InvalidArgumentError, ResourceLimitError
from tempfair.fairness import PER_DAY, UP_TO_EACH_DAY, Predicate, cancel_out, check, check_temporal
from tempfair.model import Allocation, AllocationPair, GoodId, TemporalInstance, prefix_goods
from tempfair.two_agents import (
    _pareto_repair,
    allocate_two_agents,
    allocate_two_agents_identical_days,
    balance,
    efx_pair,
    ef1_po_pair,
    envy_balancing,
    opposite_sdef1_pair,
)


def two_agent(rng, **kw):
    kw.setdefault("n_range", (2, 2))
    return random_instance(rng, **kw)


def test_single_good_pair():
    inst = TemporalInstance.from_table([[(1, 1)]])
    g = GoodId(1, 0)
    pair = opposite_sdef1_pair(inst, [g])
    assert pair.first.owner == {g: 0} and pair.second.owner == {g: 1}


def test_reversed_orders_pair_up_neighbours():
    inst = TemporalInstance.from_table([[(4, 1), (3, 2), (2, 3), (1, 4)]])
    g = inst.goods
    pair = opposite_sdef1_pair(inst, g)
    assert pair.first.bundle(0) == {g[0], g[2]}
    for member in pair:
        assert check(inst, member, g, Predicate.SD_EF1).passed


def test_opposite_pairs_are_sdef1_both_ways():
    rng = random.Random(1)
    for _ in range(300):
        inst = two_agent(rng, k_range=(1, 1), per_day=(1, 9))
        pair = opposite_sdef1_pair(inst, inst.goods)
        assert pair.second == pair.first.swapped()
        for member in pair:
            assert literal.sd_ef1(inst, member, inst.goods)


def test_identical_strict_orders_split_every_even_prefix():
    inst = TemporalInstance.from_table([[(v, v) for v in (6, 5, 4, 3, 2, 1)]])
    a = opposite_sdef1_pair(inst, inst.goods).first
    for r in (2, 4, 6):
        assert sum(a[g] == 0 for g in inst.goods[:r]) == r // 2


def test_rejects_more_agents():
    inst = TemporalInstance.from_table([[(1, 1, 1)]])
    with pytest.raises(InvalidArgumentError):
        opposite_sdef1_pair(inst, inst.goods)
    with pytest.raises(InvalidArgumentError):
        allocate_two_agents(inst)


def test_ef_members_go_straight_through():
    inst = TemporalInstance.from_table([[(1, 1), (1, 1)], [(2, 2), (2, 2)]])
    pairs = [opposite_sdef1_pair(inst, d) for d in inst.days]
    out = envy_balancing(inst, pairs)
    assert out == Allocation.union(p.first for p in pairs)


def test_single_envious_day_gives_agent_ones_favourite():
    inst = TemporalInstance.from_table([[(3, 3)]])
    g = GoodId(1, 0)
    pair = AllocationPair(Allocation({g: 1}), Allocation({g: 0}))
    assert envy_balancing(inst, [pair]).owner == {g: 0}


def test_balancing_validates_pairs():
    inst = TemporalInstance.from_table([[(3, 3)], [(1, 1)]])
    a = Allocation({GoodId(1, 0): 0})
    with pytest.raises(InvalidArgumentError):
        balance(inst, [AllocationPair(a, a)])
    both = Allocation({GoodId(1, 0): 0, GoodId(2, 0): 0})
    with pytest.raises(InvalidArgumentError, match="not EF1"):
        balance(inst, [AllocationPair(both, both.swapped())])


def test_two_day_trace_flushes():
    # day 1 favours agent 1, day 2 favours agent 2 under the chosen members
    inst = TemporalInstance.from_table([[(2, 2)], [(2, 2)]])
    d1, d2 = inst.days[0][0], inst.days[1][0]
    pairs = [AllocationPair(Allocation({d1: 0}), Allocation({d1: 1})),
             AllocationPair(Allocation({d2: 0}), Allocation({d2: 1}))]
    out = envy_balancing(inst, pairs, audit=True)
    assert out.bundle(0) == {d1} and out.bundle(1) == {d2}
    assert check_temporal(inst, out, Predicate.EF1, UP_TO_EACH_DAY).passed


@pytest.mark.parametrize("seed", range(4))
def test_two_agent_algorithm(seed):
    rng = random.Random(seed)
    for _ in range(60):
        inst = two_agent(rng, k_range=(1, 6), per_day=(1, 5))
        a = allocate_two_agents(inst, audit=True)
        assert check_temporal(inst, a, Predicate.SD_EF1, PER_DAY).passed
        for t in range(1, inst.k + 1):
            assert literal.ef1(inst, a, prefix_goods(inst, t))
            pair = opposite_sdef1_pair(inst, inst.days[t - 1])
            assert a.restrict(inst.days[t - 1]) in (pair.first, pair.second)


def test_prefix_counterexample_is_still_handled():
    from tempfair.oracle import fixtures

    inst = next(f.instance for f in fixtures() if f.name == "two-agents-prefix")
    a = allocate_two_agents(inst)
    assert check_temporal(inst, a, Predicate.SD_EF1, PER_DAY).passed
    assert check_temporal(inst, a, Predicate.EF1, UP_TO_EACH_DAY).passed


def test_identical_days_alternation():
    inst = TemporalInstance.from_table([[(4, 1), (3, 2), (2, 3), (1, 4)]] * 3)
    a = allocate_two_agents_identical_days(inst)
    assert check_temporal(inst, a, Predicate.SD_EF1, PER_DAY).passed
    assert check_temporal(inst, a, Predicate.SD_EF1, UP_TO_EACH_DAY).passed
    assert check(inst, a, prefix_goods(inst, 2), Predicate.SD_EF).passed


@pytest.mark.parametrize("seed", range(30))
def test_identical_days_random(seed):
    inst = generated(seed, n=2, k=1 + seed % 6, identical_days=True)
    a = allocate_two_agents_identical_days(inst)
    for t in range(1, inst.k + 1):
        P = prefix_goods(inst, t)
        assert literal.sd_ef1(inst, a, P)
        assert literal.sd_ef1(inst, a, inst.days[t - 1])
        if t % 2 == 0:
            assert literal.sd_ef(inst, a, P)


def test_identical_days_required():
    with pytest.raises(InvalidArgumentError):
        allocate_two_agents_identical_days(TemporalInstance.from_table([[(1, 2)], [(2, 1)]]))


def test_efx_two_equal_goods():
    inst = TemporalInstance.from_table([[(1, 1), (1, 1)]])
    for member in efx_pair(inst, inst.goods):
        assert check(inst, member, inst.goods, Predicate.EF).passed


def test_efx_min_diff_cut():
    inst = TemporalInstance.from_table([[(5, 1), (3, 1), (2, 1)]])
    g = inst.goods
    B = efx_pair(inst, g).first
    assert {B.bundle(0), B.bundle(1)} == {frozenset({g[0]}), frozenset({g[1], g[2]})}
    # chooser prefers two goods
    assert B.bundle(1) == {g[1], g[2]}


def test_efx_pairs_random():
    rng = random.Random(5)
    for _ in range(200):
        inst = two_agent(rng, k_range=(1, 1), per_day=(1, 8))
        pair = efx_pair(inst, inst.goods)
        assert cancel_out(inst, pair)
        for member in pair:
            assert literal.efx(inst, member, inst.goods)


def test_efx_budget():
    inst = TemporalInstance.from_table([[(1, 1)] * 6])
    with pytest.raises(ResourceLimitError):
        efx_pair(inst, inst.goods, budget=5)


def test_pareto_repair_takes_the_swap():
    inst = TemporalInstance.from_table([[(3, 1), (1, 3)]])
    a, b = inst.goods
    low = Allocation({a: 1, b: 0})
    assert _pareto_repair(inst, [a, b], low).owner == {a: 0, b: 1}


def test_ef1_po_unchanged_when_identical():
    inst = TemporalInstance.from_table([[(3, 3), (2, 2), (1, 1)]])
    assert ef1_po_pair(inst, inst.goods) == efx_pair(inst, inst.goods)


def test_ef1_po_pairs_random():
    rng = random.Random(6)
    for _ in range(120):
        inst = two_agent(rng, k_range=(1, 1), per_day=(1, 6))
        pair = ef1_po_pair(inst, inst.goods)
        assert cancel_out(inst, pair)
        for member in pair:
            assert literal.ef1(inst, member, inst.goods)
            assert literal.po(inst, member, inst.goods)
