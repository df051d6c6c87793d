"""SD-EF1 per day and overall when all agents share one ordering of the goods.

Each good lies in one per-day block of n consecutive ranks and one overall block.
Padding with worthless dummies makes every block hold exactly n goods, so the
block incidence multigraph is n-regular and splits into n perfect matchings;
matching ``a`` becomes agent ``a``'s bundle, which then holds exactly one good of
every block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import InternalDefect, InvalidArgumentError
from .general import CategoryFamily
from .model import Allocation, GoodId, TemporalInstance, common_ranking

__all__ = [
    "IntervalFamilies",
    "IncidenceGraph",
    "build_interval_families",
    "incidence_graph",
    "regular_bipartite_decompose",
    "allocate_identical_orderings",
]


@dataclass(frozen=True)
class IntervalFamilies:
    P1: CategoryFamily
    P2: CategoryFamily
    dummies: frozenset[GoodId]


@dataclass(frozen=True)
class IncidenceGraph:
    """Bipartite multigraph; ``edges[e] = (left, right, label)``."""

    left: int
    right: int
    edges: tuple[tuple[int, int, GoodId], ...]

    def degrees(self) -> tuple[list[int], list[int]]:
        dl = [0] * self.left
        dr = [0] * self.right
        for a, b, _ in self.edges:
            dl[a] += 1
            dr[b] += 1
        return dl, dr


def _blocks(order: Sequence[GoodId], n: int) -> list[list[GoodId]]:
    return [list(order[s:s + n]) for s in range(0, len(order), n)]


def build_interval_families(instance: TemporalInstance) -> IntervalFamilies:
    n = instance.n
    order = common_ranking(instance, instance.goods)
    if order is None:
        raise InvalidArgumentError("the agents do not share a common ordering of the goods")
    position = {g: p for p, g in enumerate(order)}
    P1 = []
    for day in instance.days:
        P1.extend(_blocks(sorted(day, key=position.__getitem__), n))
    P2 = _blocks(order, n)
    if len(P1) < len(P2):
        raise InternalDefect(f"{len(P1)} per-day blocks but {len(P2)} overall blocks")
    P2.extend([] for _ in range(len(P1) - len(P2)))
    missing = n * len(P1) - len(order)
    dummies = [GoodId(instance.k + 1, d) for d in range(missing)]
    for family in (P1, P2):
        it = iter(dummies)
        for block in family:
            block.extend(next(it) for _ in range(n - len(block)))
        if next(it, None) is not None:
            raise InternalDefect("dummy goods left over after padding")
    return IntervalFamilies(
        CategoryFamily(tuple(tuple(b) for b in P1)),
        CategoryFamily(tuple(tuple(b) for b in P2)),
        frozenset(dummies),
    )


def incidence_graph(families: IntervalFamilies) -> IncidenceGraph:
    right_of = {g: r for r, block in enumerate(families.P2.categories) for g in block}
    edges = [(l, right_of[g], g) for l, block in enumerate(families.P1.categories) for g in block]
    edges.sort(key=lambda e: e[2])
    return IncidenceGraph(len(families.P1.categories), len(families.P2.categories), tuple(edges))


def _perfect_matching(left: int, adj: list[list[tuple[int, int]]]) -> list[int]:
    """Kuhn's augmenting paths; ``adj[l]`` lists ``(right, edge)`` in label order. Returns edge per left vertex."""
    match_right: dict[int, tuple[int, int]] = {}  # right -> (left, edge)

    def augment(l: int, seen: set[int]) -> bool:
        # recursion depth is at most the number of left vertices
        for r, e in adj[l]:
            if r in seen:
                continue
            seen.add(r)
            if r not in match_right or augment(match_right[r][0], seen):
                match_right[r] = (l, e)
                return True
        return False

    for l in range(left):
        if not augment(l, set()):
            raise InternalDefect(f"no perfect matching: left vertex {l} stays unmatched")
    chosen = [-1] * left
    for l, e in match_right.values():
        chosen[l] = e
    return chosen


def regular_bipartite_decompose(graph: IncidenceGraph, n: int) -> list[list[GoodId]]:
    """Split an n-regular bipartite multigraph into n perfect matchings (lists of edge labels)."""
    if graph.left != graph.right:
        raise InvalidArgumentError("both sides of a regular bipartite graph have the same size")
    dl, dr = graph.degrees()
    if any(d != n for d in dl) or any(d != n for d in dr):
        raise InvalidArgumentError(f"graph is not {n}-regular")
    alive = [True] * len(graph.edges)
    matchings = []
    for _ in range(n):
        adj: list[list[tuple[int, int]]] = [[] for _ in range(graph.left)]
        for e, (a, b, _) in enumerate(graph.edges):
            if alive[e]:
                adj[a].append((b, e))
        chosen = _perfect_matching(graph.left, adj)
        for e in chosen:
            alive[e] = False
        matchings.append(sorted(graph.edges[e][2] for e in chosen))
    if any(alive):
        raise InternalDefect("edges left over after extracting all matchings")
    return matchings


def allocate_identical_orderings(instance: TemporalInstance) -> Allocation:
    """SD-EF1 per day and SD-EF1 overall for agents with a common ordering.

    >>> inst = TemporalInstance.from_table([[(4, 4), (3, 3), (2, 2), (1, 1)]])
    >>> sorted(allocate_identical_orderings(inst).owner.values())
    [0, 0, 1, 1]
    """
    families = build_interval_families(instance)
    matchings = regular_bipartite_decompose(incidence_graph(families), instance.n)
    owner = {}
    for agent, matching in enumerate(matchings):
        for g in matching:
            if g not in families.dummies:
                owner[g] = agent
    return Allocation(owner)
