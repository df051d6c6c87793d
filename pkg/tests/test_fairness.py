import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import literal
from randinst import random_allocation, random_instance
from tempfair import _kernels
from tempfair.errors import InvalidArgumentError, ResourceLimitError
from tempfair.fairness import (
    OVERALL,
    PER_DAY,
    UP_TO_EACH_DAY,
    Predicate,
    Scope,
    cancel_out,
    check,
    check_temporal,
    sd_dominates,
    sdef1_count_conditions,
)
from tempfair.model import Allocation, AllocationPair, GoodId, TemporalInstance, head_set
from tempfair.oracle import fixtures

FX = {f.name: f.instance for f in fixtures()}
P = Predicate


def named(inst, owner_by_name):
    by = inst.by_name()
    return Allocation({by[k]: v for k, v in owner_by_name.items()})


def test_sd_dominates_examples():
    inst = FX["two-agents-prefix"]
    by = inst.by_name()
    M = inst.goods
    assert not sd_dominates(inst, 0, {by["g1"]}, {by["g2"], by["g3"]}, M)
    assert sd_dominates(inst, 0, {by["g2"], by["g3"]}, {by["g2"], by["g3"]}, M)
    flat = TemporalInstance.from_table([[(1,), (1,), (1,)]])
    assert sd_dominates(flat, 0, set(flat.goods[:2]), {flat.goods[2]}, flat.goods)
    with pytest.raises(InvalidArgumentError):
        sd_dominates(inst, 0, {by["g1"]}, set(), {by["g2"]})


def test_single_good_is_ef1_not_ef():
    inst = TemporalInstance.from_table([[(1, 1)]])
    a = Allocation({GoodId(1, 0): 0})
    assert check(inst, a, a.goods, P.EF1).passed
    assert not check(inst, a, a.goods, P.EF).passed


def test_top_two_to_one_agent_is_not_sdef1():
    # agent 2 holds none of its top two goods
    inst = FX["two-agents-prefix"]
    a = named(inst, {"g1": 0, "g2": 0, "g3": 1, "g4": 1})
    report = check(inst, a, inst.goods, P.SD_EF1)
    assert not report.passed
    assert literal.sd_ef1(inst, a, inst.goods) is False
    assert report.violations[0].agent == 1


def test_prop1_hand_arithmetic():
    inst = TemporalInstance.from_table([[(4, 4), (3, 3), (2, 2), (1, 1)]])
    a = Allocation({g: (0 if g.index == 0 else 1) for g in inst.goods})
    assert check(inst, a, inst.goods, P.PROP1).passed
    assert not check(inst, a, inst.goods, P.PROP).passed


def test_up_to_each_day_fails_when_g1_and_g3_share_an_agent():
    inst = FX["two-agents-prefix"]
    for g4 in (0, 1):
        for g2 in (0, 1):
            a = named(inst, {"g1": 0, "g3": 0, "g4": g4, "g2": g2})
            report = check_temporal(inst, a, P.SD_EF1, UP_TO_EACH_DAY)
            assert not report.passed
            day2 = frozenset(inst.goods[:3])
            assert any(v.goods == day2 for v in report.violations)


def test_single_day_scopes_coincide():
    rng = random.Random(5)
    for _ in range(30):
        inst = random_instance(rng, k_range=(1, 1))
        a = random_allocation(rng, inst)
        for p in (P.EF1, P.SD_EF1, P.PROP1):
            results = {check_temporal(inst, a, p, s).passed for s in (PER_DAY, OVERALL, UP_TO_EACH_DAY)}
            results.add(check_temporal(inst, a, p, Scope.laminar([inst.goods])).passed)
            assert len(results) == 1


def test_laminar_scope_rejects_crossing_sets():
    inst = FX["two-agents-daily-ef1"]
    a = random_allocation(random.Random(0), inst)
    g = inst.goods
    with pytest.raises(InvalidArgumentError):
        check_temporal(inst, a, P.EF1, Scope.laminar([g[:3], g[2:5]]))


def test_cancel_out_examples():
    inst = FX["two-agents-daily-ef1"]
    rng = random.Random(1)
    for _ in range(20):
        a = random_allocation(rng, inst)
        assert cancel_out(inst, AllocationPair(a, a.swapped()))
    all_first = Allocation({g: 0 for g in inst.goods})
    assert not cancel_out(inst, AllocationPair(all_first, all_first))
    with pytest.raises(InvalidArgumentError):
        cancel_out(FX["identical-days-prefix"], AllocationPair(Allocation({}), Allocation({})))


def test_ef_pair_copies_cancel_out():
    inst = TemporalInstance.from_table([[(1, 1), (1, 1)]])
    a = Allocation({GoodId(1, 0): 0, GoodId(1, 1): 1})
    assert check(inst, a, a.goods, P.EF).passed
    assert cancel_out(inst, AllocationPair(a, a))


def test_count_conditions_examples():
    inst = TemporalInstance.from_table([[(4, 4), (3, 3), (2, 2), (1, 1)]])
    rr = Allocation({g: g.index % 2 for g in inst.goods})
    assert sdef1_count_conditions(inst, rr, inst.goods, "sufficiency")
    top_two = Allocation({g: (0 if g.index < 2 else 1) for g in inst.goods})
    assert not sdef1_count_conditions(inst, top_two, inst.goods, "sufficiency")
    with pytest.raises(InvalidArgumentError):
        sdef1_count_conditions(inst, rr, inst.goods, "other")


def test_po_budget_guard():
    inst = TemporalInstance.from_table([[(1, 1)] * 8])
    a = Allocation({g: 0 for g in inst.goods})
    with pytest.raises(ResourceLimitError):
        check(inst, a, inst.goods, P.PO, po_budget=100)


def test_check_requires_total_allocation():
    inst = FX["two-agents-prefix"]
    with pytest.raises(InvalidArgumentError):
        check(inst, Allocation({}), inst.goods, P.EF1)


@pytest.mark.parametrize("seed", range(4))
def test_every_predicate_matches_its_literal_definition(seed, backend):
    rng = random.Random(seed)
    for _ in range(60):
        inst = random_instance(rng, n_range=(2, 3), k_range=(1, 2), per_day=(1, 3), hi=4)
        a = random_allocation(rng, inst)
        S = frozenset(inst.goods)
        for p in Predicate:
            assert check(inst, a, S, p).passed == literal.BY_NAME[p.name](inst, a, S), (p, inst, a)


@pytest.mark.parametrize("seed", range(3))
def test_rational_values_match_literal_definitions(seed):
    rng = random.Random(100 + seed)
    for _ in range(40):
        n = rng.randint(2, 3)
        rows = [[tuple(f"{rng.randint(0, 7)}/{rng.randint(1, 4)}" for _ in range(n)) for _ in range(rng.randint(1, 4))]]
        inst = TemporalInstance.from_table(rows)
        a = random_allocation(rng, inst)
        for p in (P.EF, P.EF1, P.EFX, P.PROP, P.PROP1, P.SD_EF1, P.SD_PROP1):
            assert check(inst, a, inst.goods, p).passed == literal.BY_NAME[p.name](inst, a, inst.goods)


IMPLICATIONS = [
    (P.SD_EF, P.SD_EF1), (P.SD_EF1, P.EF1), (P.EF1, P.PROP1), (P.SD_EF1, P.SD_PROP1),
    (P.SD_PROP1, P.PROP1), (P.EF, P.EF1), (P.EFX, P.EF1), (P.SD_EF, P.EF), (P.EF, P.PROP),
]


def test_implication_chain_on_random_allocations():
    rng = random.Random(11)
    for _ in range(300):
        inst = random_instance(rng, per_day=(1, 5))
        a = random_allocation(rng, inst)
        S = inst.goods
        got = {p: check(inst, a, S, p).passed for p in {x for pair in IMPLICATIONS for x in pair}}
        for strong, weak in IMPLICATIONS:
            assert not got[strong] or got[weak], (strong, weak)


def test_up_to_each_day_implies_overall():
    rng = random.Random(12)
    for _ in range(200):
        inst = random_instance(rng)
        a = random_allocation(rng, inst)
        for p in (P.EF1, P.SD_EF1, P.PROP1):
            if check_temporal(inst, a, p, UP_TO_EACH_DAY).passed:
                assert check_temporal(inst, a, p, OVERALL).passed


def test_sdef1_gives_round_robin_share():
    rng = random.Random(13)
    for _ in range(300):
        inst = random_instance(rng, per_day=(1, 5), hi=3)
        a = random_allocation(rng, inst)
        S = inst.goods
        if not check(inst, a, S, P.SD_EF1).passed:
            continue
        for i in range(inst.n):
            for g in S:
                H = head_set(inst, i, S, g)
                assert len(H & a.bundle(i)) >= len(H) // inst.n


@given(st.lists(st.integers(0, 6), min_size=1, max_size=6), st.data())
def test_sd_dominance_implies_value_dominance(base, data):
    # any strictly increasing transform of the values induces the same weak order
    bump = data.draw(st.lists(st.integers(1, 5), min_size=7, max_size=7))
    levels = sorted(set(base))
    remap = {}
    acc = 0
    for lvl, step in zip(levels, bump):
        acc += step
        remap[lvl] = acc
    inst = TemporalInstance.from_table([[(v, remap[v]) for v in base]])
    S = inst.goods
    X = {g for g in S if data.draw(st.booleans())}
    Y = {g for g in S if data.draw(st.booleans())}
    if sd_dominates(inst, 0, X, Y, S):
        for i in (0, 1):
            assert inst.bundle_value(i, X) >= inst.bundle_value(i, Y)


@given(st.integers(1, 7), st.integers(0, 10 ** 6))
def test_scaling_one_agent_changes_nothing(factor, seed):
    rng = random.Random(seed)
    inst = random_instance(rng, k_range=(1, 2), per_day=(1, 3))
    a = random_allocation(rng, inst)
    scaled = inst.with_values([{g: v * factor for g, v in inst.values[0].items()}] + list(inst.values[1:]))
    for p in Predicate:
        if p is P.PO and inst.n ** len(inst.goods) > 5000:
            continue
        assert check(inst, a, inst.goods, p).passed == check(scaled, a, inst.goods, p).passed


def test_count_conditions_bracket_sdef1():
    rng = random.Random(14)
    for _ in range(300):
        inst = random_instance(rng, per_day=(1, 5), hi=4)
        a = random_allocation(rng, inst)
        S = inst.goods
        sd = check(inst, a, S, P.SD_EF1).passed
        if sdef1_count_conditions(inst, a, S, "sufficiency"):
            assert sd
        if sd:
            assert sdef1_count_conditions(inst, a, S, "necessity")


def test_kernel_backends_agree():
    if len(_kernels.available_backends()) < 2:
        pytest.skip("compiled kernels not built")
    rng = random.Random(15)
    for _ in range(500):
        n = rng.randint(1, 5)
        m = rng.randint(1, 12)
        owner = _kernels.ints([rng.randrange(n) for _ in range(m)])
        boundary = _kernels.ints([rng.randint(0, 1) for _ in range(m - 1)] + [1])
        i = rng.randrange(n)
        for mode in (_kernels.SD_EF, _kernels.SD_EF1, _kernels.SD_PROP1, _kernels.SUFFICIENCY, _kernels.NECESSITY):
            results = set()
            for name in _kernels.available_backends():
                prev = _kernels.use_backend(name)
                results.add(_kernels.sd_scan(owner, boundary, n, i, mode))
                _kernels.use_backend(prev)
            assert len(results) == 1
        assign = _kernels.ints([rng.randrange(-1, n) for _ in range(m)])
        nb = rng.randint(1, 4)
        idx, off, lower, agents, aoff = [], [0], [], [], [0]
        for _ in range(nb):
            members = rng.sample(range(m), rng.randint(1, m))
            idx += members
            off.append(len(idx))
            lower.append(len(members) // n)
            agents += rng.sample(range(n), rng.randint(1, n))
            aoff.append(len(agents))
        args = [_kernels.ints(x) for x in (idx, off, lower, agents, aoff)]
        outs = set()
        for name in _kernels.available_backends():
            prev = _kernels.use_backend(name)
            outs.add(_kernels.prune_blocks(assign, *args, n))
            _kernels.use_backend(prev)
        assert len(outs) == 1


def test_violation_witness_is_legible():
    inst = FX["two-agents-prefix"]
    a = named(inst, {"g1": 0, "g2": 0, "g3": 0, "g4": 1})
    v = check(inst, a, inst.goods, P.EF1).violations[0]
    assert (v.agent, v.other) == (1, 0)
    assert "A_1" in v.detail


def test_fallback_loads_without_extension():
    import subprocess
    import sys

    code = ("import sys; sys.modules['tempfair._kernels._ckernels'] = None\n"
            "from tempfair import _kernels\n"
            "from tempfair.oracle import verify_counterexamples\n"
            "assert _kernels.backend() == 'python'\n"
            "assert all(r.confirmed for r in verify_counterexamples(['two-agents-prefix', 'two-agents-daily-ef1']))\n")
    subprocess.run([sys.executable, "-c", code], check=True)
