"""SD-EF1 per day with PROP1 overall for any instance, and the identical-days variant.

Pipeline: rank every day's goods per agent into a common-ordering instance, split
each day's ranks into blocks of n, find an EF1 allocation that takes at most one
good per block, then let each day's owners pick, in rank order, their favourite
remaining original good.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InternalDefect, InvalidArgumentError
from .model import Allocation, GoodId, TemporalInstance, classify, preference_ordering

logger = logging.getLogger(__name__)

__all__ = [
    "TransformedInstance",
    "CategoryFamily",
    "PickingSequence",
    "identical_ordering_transform",
    "rank_blocks",
    "constrained_ef1",
    "execute_picking",
    "picking_sequence",
    "allocate_general",
    "allocate_identical_days",
]


@dataclass(frozen=True)
class TransformedInstance:
    """The common-ordering instance and, per agent and day, which original good sits at each rank.

    ``ranked[i][t - 1][j]`` is the original good agent ``i`` ranks ``j``-th on day ``t``;
    transformed good ``GoodId(t, j)`` carries that good's value for agent ``i``.
    """

    instance: TemporalInstance
    original: TemporalInstance
    ranked: tuple[tuple[tuple[GoodId, ...], ...], ...]

    def to_transformed(self, agent: int, good: GoodId) -> GoodId:
        return GoodId(good.day, self.ranked[agent][good.day - 1].index(good))

    def to_original(self, agent: int, good: GoodId) -> GoodId:
        return self.ranked[agent][good.day - 1][good.index]


@dataclass(frozen=True)
class CategoryFamily:
    categories: tuple[tuple[GoodId, ...], ...]

    def __post_init__(self):
        seen: set[GoodId] = set()
        for c in self.categories:
            if seen.intersection(c):
                raise InvalidArgumentError("categories must be pairwise disjoint")
            seen.update(c)

    @property
    def goods(self) -> frozenset[GoodId]:
        return frozenset(g for c in self.categories for g in c)


@dataclass(frozen=True)
class PickingSequence:
    picks: tuple[tuple[int, ...], ...]


def identical_ordering_transform(instance: TemporalInstance) -> TransformedInstance:
    ranked = []
    values: list[dict[GoodId, Fraction]] = []
    for i in instance.agents:
        vi = instance.values[i]
        per_day = []
        vals: dict[GoodId, Fraction] = {}
        for t, day in enumerate(instance.days, start=1):
            order = preference_ordering(instance, i, day).ranked
            per_day.append(order)
            for j, g in enumerate(order):
                vals[GoodId(t, j)] = vi[g]
        ranked.append(tuple(per_day))
        values.append(vals)
    transformed = TemporalInstance(
        n=instance.n, days=instance.days, values=tuple(values),
        names={g: f"rank{g.index + 1}@day{g.day}" for g in instance.goods})
    return TransformedInstance(transformed, instance, tuple(ranked))


def rank_blocks(instance: TemporalInstance) -> CategoryFamily:
    """Consecutive blocks of n ranks on each day (the last block of a day may be short)."""
    n = instance.n
    blocks = []
    for day in instance.days:
        for start in range(0, len(day), n):
            blocks.append(tuple(day[start:start + n]))
    return CategoryFamily(tuple(blocks))


def _worth_matrix(values, bundles):
    n = len(bundles)
    return [[sum((values[i][g] for g in bundles[j]), Fraction(0)) for j in range(n)] for i in range(n)]


def _find_cycle(worth) -> list[int] | None:
    """Lowest-id envy cycle: DFS from agents in id order, following lowest-id envied agents first."""
    n = len(worth)
    edges = [[j for j in range(n) if j != i and worth[i][j] > worth[i][i]] for i in range(n)]
    state = [0] * n  # 0 new, 1 on stack, 2 done
    for root in range(n):
        if state[root]:
            continue
        stack = [(root, iter(edges[root]))]
        path = [root]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                state[node] = 2
            elif state[nxt] == 1:
                return path[path.index(nxt):]
            elif state[nxt] == 0:
                state[nxt] = 1
                stack.append((nxt, iter(edges[nxt])))
                path.append(nxt)
    return None


def _eliminate_cycles(values, bundles: list[set]) -> None:
    while True:
        worth = _worth_matrix(values, bundles)
        cycle = _find_cycle(worth)
        if cycle is None:
            return
        # each agent on the cycle takes the bundle of the agent it envies
        moved = [bundles[cycle[(p + 1) % len(cycle)]] for p in range(len(cycle))]
        for agent, bundle in zip(cycle, moved):
            bundles[agent] = bundle


def _topological_order(worth) -> list[int]:
    """Agents ordered so every envious agent precedes the agents it envies (smallest id first)."""
    n = len(worth)
    indeg = [0] * n
    out = [[] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and worth[i][j] > worth[i][i]:
                out[i].append(j)
                indeg[j] += 1
    heap = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        i = heapq.heappop(heap)
        order.append(i)
        for j in out[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, j)
    if len(order) != n:
        raise InternalDefect("envy graph still has a cycle after elimination")
    return order


def constrained_ef1(categories: CategoryFamily, values: Sequence[Mapping[GoodId, Fraction]]) -> Allocation:
    """EF1 allocation taking between floor(|C|/n) and ceil(|C|/n) goods of every category C.

    Categories are processed in order. Before each one, envy cycles are removed by
    rotating bundles, and agents then pick their favourite remaining good of the
    category in a topological order of the envy graph (envious agents first).
    Categories hold at most n goods here, so that is a single picking round.
    """
    n = len(values)
    bundles: list[set[GoodId]] = [set() for _ in range(n)]
    for category in categories.categories:
        _eliminate_cycles(values, bundles)
        order = _topological_order(_worth_matrix(values, bundles))
        remaining = list(category)
        while remaining:
            for agent in order:
                if not remaining:
                    break
                vi = values[agent]
                pick = min(remaining, key=lambda g: (-vi[g], g))
                remaining.remove(pick)
                bundles[agent].add(pick)
    return Allocation.from_bundles(bundles)


def picking_sequence(transformed: TransformedInstance, reduced: Allocation) -> PickingSequence:
    return PickingSequence(tuple(tuple(reduced[g] for g in day) for day in transformed.instance.days))


def execute_picking(instance: TemporalInstance, transformed: TransformedInstance, reduced: Allocation, *,
                    audit: bool = False) -> Allocation:
    """Each day, the owner of the j-th ranked transformed good picks its favourite remaining original good.

    With ``audit`` set, asserts every pick is worth at least the transformed good it
    stands for.
    """
    if not reduced.covers(transformed.instance.goods):
        raise InvalidArgumentError("the reduced allocation must cover every transformed good")
    owner: dict[GoodId, int] = {}
    sequence = picking_sequence(transformed, reduced)
    for t, (day, picks) in enumerate(zip(instance.days, sequence.picks), start=1):
        left = set(day)
        for j, agent in enumerate(picks):
            vi = instance.values[agent]
            g = min(left, key=lambda h: (-vi[h], h))
            left.remove(g)
            owner[g] = agent
            if audit and vi[g] < transformed.instance.values[agent][GoodId(t, j)]:
                raise InternalDefect(f"pick {j} of day {t} is worth less than its rank value")
    return Allocation(owner)


def allocate_general(instance: TemporalInstance) -> Allocation:
    """An allocation that is SD-EF1 on every day and PROP1 over all goods."""
    transformed = identical_ordering_transform(instance)
    blocks = rank_blocks(transformed.instance)
    reduced = constrained_ef1(blocks, transformed.instance.values)
    logger.debug("reduced allocation %s", reduced)
    return execute_picking(instance, transformed, reduced)


def allocate_identical_days(instance: TemporalInstance) -> Allocation:
    """SD-EF1 on every day and SD-PROP1 overall, for instances whose days are copies of each other."""
    from .identical import allocate_identical_orderings

    if not classify(instance).identical_days:
        raise InvalidArgumentError("the instance does not have identical days")
    transformed = identical_ordering_transform(instance)
    reduced = allocate_identical_orderings(transformed.instance)
    return execute_picking(instance, transformed, reduced)
