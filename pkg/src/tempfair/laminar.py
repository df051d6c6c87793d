"""Laminar families of good sets and the two-agent laminar EF1 algorithm.

Sets are processed children-first. A leaf gets an opposite SD-EF1 pair; an inner
set runs the envy-balancing machine over its children's pairs and keeps both the
result and its swapped variant as its own pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InternalDefect, InvalidArgumentError
from .model import Allocation, AllocationPair, GoodId, TemporalInstance
from .two_agents import balance, opposite_sdef1_pair

__all__ = [
    "LaminarFamily",
    "validate_laminar",
    "complete_family",
    "topological_order",
    "children",
    "envy_balancing_pp",
    "allocate_laminar",
    "per_day_and_prefix_family",
]


def validate_laminar(sets: Iterable[Iterable[GoodId]], M: Iterable[GoodId]) -> list[frozenset[GoodId]]:
    """Deduplicated sets, checked to be nonempty subsets of ``M`` that pairwise nest or are disjoint."""
    M = frozenset(M)
    out: list[frozenset[GoodId]] = []
    for s in sets:
        s = frozenset(s)
        if not s:
            raise InvalidArgumentError("laminar sets must be nonempty")
        if not s <= M:
            raise InvalidArgumentError(f"set contains goods outside the instance: {sorted(s - M)[:3]!r}")
        if s not in out:
            out.append(s)
    for a_pos, a in enumerate(out):
        for b in out[a_pos + 1:]:
            if a & b and not (a <= b or b <= a):
                raise InvalidArgumentError(f"sets {sorted(a)!r} and {sorted(b)!r} overlap without nesting")
    return out


@dataclass(frozen=True)
class LaminarFamily:
    """A complete laminar family: contains the ground set and every inner set is partitioned by its children."""

    ground: frozenset[GoodId]
    sets: tuple[frozenset[GoodId], ...]
    kids: tuple[tuple[int, ...], ...]

    @property
    def root(self) -> int:
        return self.sets.index(self.ground)

    def children_of(self, s: frozenset[GoodId]) -> tuple[frozenset[GoodId], ...]:
        return tuple(self.sets[c] for c in self.kids[self.sets.index(s)])

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)


def children(sets: Sequence[frozenset[GoodId]], s: frozenset[GoodId]) -> list[frozenset[GoodId]]:
    """The maximal proper subsets of ``s`` within ``sets``, ordered by smallest good."""
    below = [t for t in sets if t < s]
    maximal = [t for t in below if not any(t < u for u in below)]
    return sorted(maximal, key=min)


def complete_family(family: Iterable[Iterable[GoodId]], M: Iterable[GoodId]) -> LaminarFamily:
    """Add the ground set and, under every set its descendants cover only partly, the uncovered rest.

    >>> g = [GoodId(1, 0), GoodId(1, 1)]
    >>> sorted(sorted(s) for s in complete_family([[g[0]]], g))
    [[g(1,0)], [g(1,0), g(1,1)], [g(1,1)]]
    """
    M = frozenset(M)
    sets = validate_laminar(family, M)
    if M not in sets:
        sets.append(M)
    additions = []
    for s in sets:
        covered = frozenset().union(*(t for t in sets if t < s))
        if 0 < len(covered) < len(s):
            additions.append(s - covered)
    sets.extend(a for a in additions if a not in sets)
    if len(sets) > 2 * len(M) - 1:
        raise InternalDefect(f"{len(sets)} sets in a laminar family over {len(M)} goods")
    ordered = sorted(sets, key=lambda s: (min(s), -len(s)))
    index = {s: p for p, s in enumerate(ordered)}
    kids = []
    for s in ordered:
        kid_sets = children(ordered, s)
        if kid_sets and frozenset().union(*kid_sets) != s:
            raise InternalDefect("children do not partition their parent after completion")
        kids.append(tuple(index[c] for c in kid_sets))
    return LaminarFamily(M, tuple(ordered), tuple(kids))


def topological_order(family: LaminarFamily) -> list[frozenset[GoodId]]:
    """Post-order walk from the root: every set comes after all of its descendants."""
    out: list[frozenset[GoodId]] = []
    stack = [(family.root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            out.append(family.sets[node])
            continue
        stack.append((node, True))
        stack.extend((c, False) for c in reversed(family.kids[node]))
    return out


def envy_balancing_pp(instance: TemporalInstance, S: Iterable[GoodId], partition: Sequence[Iterable[GoodId]],
                      pairs: Sequence[AllocationPair], *, audit: bool = False) -> AllocationPair:
    """Two EF1 allocations of S that cancel out, built from one pair per child set."""
    S = frozenset(S)
    if not partition:
        return opposite_sdef1_pair(instance, S)
    if len(partition) != len(pairs):
        raise InvalidArgumentError("need exactly one pair per child set")
    seen: set[GoodId] = set()
    for c, (child, pair) in enumerate(zip(partition, pairs), start=1):
        child = frozenset(child)
        if seen & child:
            raise InvalidArgumentError(f"child {c} overlaps an earlier child")
        seen |= child
        if pair.goods != child:
            raise InvalidArgumentError(f"pair {c} does not allocate exactly child {c}")
    if seen != S:
        raise InvalidArgumentError("children do not partition the set")
    return balance(instance, pairs, audit=audit)


def allocate_laminar(instance: TemporalInstance, family: Iterable[Iterable[GoodId]] | LaminarFamily, *,
                     audit: bool = False) -> Allocation:
    """EF1 on every set of the (completed) family, for two agents."""
    if instance.n != 2:
        raise InvalidArgumentError(f"laminar envy balancing needs exactly 2 agents, got {instance.n}")
    if not isinstance(family, LaminarFamily):
        family = complete_family(family, instance.goods)
    stored: dict[frozenset[GoodId], AllocationPair] = {}
    for s in topological_order(family):
        kids = family.children_of(s)
        stored[s] = envy_balancing_pp(instance, s, kids, [stored[c] for c in kids], audit=audit)
    return stored[family.ground].first


def per_day_and_prefix_family(instance: TemporalInstance) -> list[frozenset[GoodId]]:
    """Every day and every prefix of days, so laminar EF1 means EF1 per day and up to each day."""
    out = [frozenset(day) for day in instance.days]
    prefix: frozenset[GoodId] = frozenset()
    for day in instance.days:
        prefix = prefix | frozenset(day)
        out.append(prefix)
    return out
