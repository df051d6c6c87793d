"""Two-agent constructions: opposite SD-EF1 pairs, envy balancing, and cut-and-choose pairs.

Every day (or child set) contributes a pair of allocations that cancel out; the
balancing machine picks one member per part so that every prefix stays EF1.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InternalDefect, InvalidArgumentError, ResourceLimitError
from .fairness import Predicate, cancel_out, check
from .model import (
    Allocation,
    AllocationPair,
    GoodId,
    TemporalInstance,
    classify,
    identical_day_bijection,
    preference_ordering,
)

__all__ = [
    "EnvyState",
    "opposite_sdef1_pair",
    "balance",
    "envy_balancing",
    "allocate_two_agents",
    "allocate_two_agents_identical_days",
    "efx_pair",
    "ef1_po_pair",
    "DEFAULT_EXHAUSTIVE_BUDGET",
]

DEFAULT_EXHAUSTIVE_BUDGET = 20


def _require_two(instance: TemporalInstance) -> None:
    if instance.n != 2:
        raise InvalidArgumentError(f"this construction needs exactly 2 agents, got {instance.n}")


def opposite_sdef1_pair(instance: TemporalInstance, S: Iterable[GoodId]) -> AllocationPair:
    """Two SD-EF1 allocations of S that are each other's swap.

    Each agent's ranking pairs up ranks 1-2, 3-4, ...; the union of both agents'
    pairings is a union of two matchings, hence bipartite, and a 2-colouring
    splits every pair.
    """
    _require_two(instance)
    S = sorted(S)
    adj: dict[GoodId, set[GoodId]] = {g: set() for g in S}
    for i in (0, 1):
        ranked = preference_ordering(instance, i, S).ranked
        for a, b in zip(ranked[0::2], ranked[1::2]):
            adj[a].add(b)
            adj[b].add(a)
    colour: dict[GoodId, int] = {}
    for seed in S:
        if seed in colour:
            continue
        colour[seed] = 0
        queue = deque([seed])
        while queue:
            g = queue.popleft()
            for h in sorted(adj[g]):
                if h not in colour:
                    colour[h] = 1 - colour[g]
                    queue.append(h)
                elif colour[h] == colour[g]:
                    raise InternalDefect(f"odd cycle through {g!r} and {h!r}")
    first = Allocation(colour)
    return AllocationPair(first, first.swapped())


def _diff(instance: TemporalInstance, agent: int, alloc: Allocation) -> Fraction:
    """How much ``agent`` prefers its own bundle to the other one in ``alloc``."""
    vi = instance.values[agent]
    total = Fraction(0)
    for g, owner in alloc.owner.items():
        total += vi[g] if owner == agent else -vi[g]
    return total


@dataclass
class EnvyState:
    """Finalised parts ``F``, swappable parts ``S`` and the surpluses of both agents over ``S``.

    Swappable parts are kept as ``(pair, member)``; swapping one means taking the
    other member of its pair.
    """

    F: list[Allocation] = field(default_factory=list)
    S: list[tuple[AllocationPair, int]] = field(default_factory=list)
    e1: Fraction = Fraction(0)
    e2: Fraction = Fraction(0)

    def current(self, swap: bool = False) -> Allocation:
        return Allocation.union(pair[1 - x if swap else x] for pair, x in self.S)

    def flush(self, swap: bool) -> None:
        self.F.extend(pair[1 - x if swap else x] for pair, x in self.S)
        self.S = []
        self.e1 = Fraction(0)
        self.e2 = Fraction(0)


def _audit(instance: TemporalInstance, state: EnvyState) -> None:
    f = Allocation.union(state.F)
    s = state.current()
    sw = state.current(swap=True)
    if not check(instance, f, f.goods, Predicate.EF).passed:
        raise InternalDefect("finalised parts are not envy-free")
    for alloc in (s, sw):
        if not check(instance, alloc, alloc.goods, Predicate.EF1).passed:
            raise InternalDefect("swappable parts are not EF1")
    if not cancel_out(instance, AllocationPair(s, sw)):
        raise InternalDefect("swappable parts do not cancel out")
    if state.e1 != _diff(instance, 0, s) or state.e2 != _diff(instance, 1, s):
        raise InternalDefect("running surpluses drifted from the swappable parts")


def balance(instance: TemporalInstance, pairs: Sequence[AllocationPair], *, audit: bool = False) -> AllocationPair:
    """Run the envy-balancing machine over ``pairs`` in order.

    Returns the finalised parts joined with the swappable parts as they stand, and
    joined with the other members of the swappable parts' pairs. Each pair must
    cancel out and both of its members must be EF1 on their goods.
    """
    _require_two(instance)
    for t, pair in enumerate(pairs, start=1):
        if not cancel_out(instance, pair):
            raise InvalidArgumentError(f"pair {t} does not cancel out")
        for member in pair:
            if not check(instance, member, member.goods, Predicate.EF1).passed:
                raise InvalidArgumentError(f"a member of pair {t} is not EF1")
    state = EnvyState()
    for pair in pairs:
        d1 = [_diff(instance, 0, m) for m in pair]
        d2 = [_diff(instance, 1, m) for m in pair]
        ef = [x for x in range(2) if d1[x] >= 0 and d2[x] >= 0]
        if ef:
            state.F.append(pair[ef[0]])
        else:
            # first member becomes the one agent 1 weakly prefers
            a = 0 if d1[0] >= 0 else 1
            pick = a if state.e1 <= 0 else 1 - a
            state.S.append((pair, pick))
            state.e1 += d1[pick]
            state.e2 += d2[pick]
        if state.e1 >= 0 and state.e2 >= 0:
            state.flush(swap=False)
        elif state.e1 <= 0 and state.e2 <= 0:
            state.flush(swap=True)
        if audit:
            _audit(instance, state)
    final = Allocation.union(state.F)
    return AllocationPair(final.merge(state.current()), final.merge(state.current(swap=True)))


def envy_balancing(instance: TemporalInstance, pairs: Sequence[AllocationPair], *, audit: bool = False) -> Allocation:
    """One member of every pair, chosen so that every prefix of parts is EF1."""
    return balance(instance, pairs, audit=audit).first


def allocate_two_agents(instance: TemporalInstance, *, audit: bool = False) -> Allocation:
    """SD-EF1 per day and EF1 up to each day."""
    _require_two(instance)
    pairs = [opposite_sdef1_pair(instance, day) for day in instance.days]
    return envy_balancing(instance, pairs, audit=audit)


def allocate_two_agents_identical_days(instance: TemporalInstance) -> Allocation:
    """SD-EF1 per day and up to each day, and SD-EF after every even day."""
    _require_two(instance)
    if not classify(instance).identical_days:
        raise InvalidArgumentError("the instance does not have identical days")
    B, B_swapped = opposite_sdef1_pair(instance, instance.days[0])
    parts = []
    for t in range(1, instance.k + 1):
        chosen = B if t % 2 else B_swapped
        parts.append(chosen.relabel(identical_day_bijection(instance, 1, t)))
    return Allocation.union(parts)


def _cut_and_choose(instance: TemporalInstance, goods: list[GoodId], cutter: int) -> Allocation:
    chooser = 1 - cutter
    vc = instance.values[cutter]
    vh = instance.values[chooser]
    total = sum((vc[g] for g in goods), Fraction(0))
    best = None
    # goods[0] always sits on side X, so each partition is enumerated once
    rest = len(goods) - 1
    for bits in range(1 << rest):
        mask = 1 | (bits << 1)
        x = sum((vc[g] for p, g in enumerate(goods) if mask >> p & 1), Fraction(0))
        key = (abs(2 * x - total), mask)
        if best is None or key < best[0]:
            best = (key, mask, x)
    if best is None:
        raise InternalDefect("no partition enumerated")
    _, mask, x = best
    X = [g for p, g in enumerate(goods) if mask >> p & 1]
    Y = [g for p, g in enumerate(goods) if not mask >> p & 1]
    P, Q = (X, Y) if 2 * x >= total else (Y, X)
    Q = Q + [g for g in P if vc[g] == 0]
    P = [g for g in P if vc[g] != 0]
    hp = sum((vh[g] for g in P), Fraction(0))
    hq = sum((vh[g] for g in Q), Fraction(0))
    cp = sum((vc[g] for g in P), Fraction(0))
    cq = sum((vc[g] for g in Q), Fraction(0))
    if hp != hq:
        chooser_takes_p = hp > hq
    else:
        # indifferent chooser takes what the cutter values less
        chooser_takes_p = cp < cq
    bundles = [None, None]
    bundles[chooser] = P if chooser_takes_p else Q
    bundles[cutter] = Q if chooser_takes_p else P
    return Allocation.from_bundles(bundles)


def efx_pair(instance: TemporalInstance, S: Iterable[GoodId], *,
             budget: int = DEFAULT_EXHAUSTIVE_BUDGET) -> AllocationPair:
    """Two EFX allocations of S that cancel out: agent 1 cuts in the first, agent 2 in the second."""
    _require_two(instance)
    goods = sorted(S)
    if len(goods) > budget:
        raise ResourceLimitError(f"{len(goods)} goods exceed the exhaustive partition budget of {budget}")
    if not goods:
        empty = Allocation({})
        return AllocationPair(empty, empty)
    B = _cut_and_choose(instance, goods, 0)
    B2 = _cut_and_choose(instance, goods, 1)
    for agent, own, other in ((0, B, B2), (1, B2, B)):
        if abs(_diff(instance, agent, other)) < abs(_diff(instance, agent, own)):
            raise InternalDefect(f"cut of agent {agent + 1} is not difference-minimal")
    return AllocationPair(B, B2)


def _pareto_repair(instance: TemporalInstance, goods: list[GoodId], alloc: Allocation) -> Allocation:
    """A PO allocation that Pareto-dominates ``alloc`` and moves the fewest goods, or ``alloc`` if it is PO."""
    v0 = instance.values[0]
    v1 = instance.values[1]
    current = tuple(alloc[g] for g in goods)
    u0 = sum((v0[g] for g, a in zip(goods, current) if a == 0), Fraction(0))
    u1 = sum((v1[g] for g, a in zip(goods, current) if a == 1), Fraction(0))
    dominating = []
    for assign in itertools.product((0, 1), repeat=len(goods)):
        w0 = sum((v0[g] for g, a in zip(goods, assign) if a == 0), Fraction(0))
        w1 = sum((v1[g] for g, a in zip(goods, assign) if a == 1), Fraction(0))
        if w0 >= u0 and w1 >= u1 and (w0 > u0 or w1 > u1):
            dominating.append((w0, w1, assign))
    if not dominating:
        return alloc
    undominated = [
        (w0, w1, assign) for w0, w1, assign in dominating
        if not any(x0 >= w0 and x1 >= w1 and (x0 > w0 or x1 > w1) for x0, x1, _ in dominating)
    ]
    moved = lambda item: (sum(a != b for a, b in zip(item[2], current)), item[2])
    best = min(undominated, key=moved)[2]
    return Allocation(dict(zip(goods, best)))


def ef1_po_pair(instance: TemporalInstance, S: Iterable[GoodId], *,
                budget: int = DEFAULT_EXHAUSTIVE_BUDGET) -> AllocationPair:
    """Two EF1 and PO allocations of S that cancel out.

    Starts from :func:`efx_pair` and replaces each member that is not PO by a PO
    allocation dominating it (fewest goods moved, then smallest assignment).
    """
    goods = sorted(S)
    pair = efx_pair(instance, goods, budget=budget)
    return AllocationPair(*(_pareto_repair(instance, goods, m) for m in pair))
