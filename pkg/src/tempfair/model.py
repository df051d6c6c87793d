"""Domain types: goods, instances, preference orderings and allocations.

Agents are 0-based everywhere inside the package; serialization shifts to 1-based.
Values are :class:`fractions.Fraction` so every comparison is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

from .errors import InvalidArgumentError

__all__ = [
    "GoodId",
    "TemporalInstance",
    "PreferenceOrdering",
    "Allocation",
    "AllocationPair",
    "Restrictions",
    "preference_ordering",
    "top_set",
    "head_set",
    "prefix_goods",
    "classify",
    "common_ranking",
    "as_fraction",
]


class GoodId(NamedTuple):
    """A good, addressed by its day (1-based) and position within that day (0-based).

    Tuple order is the global tiebreak used by every ordering in the package.
    """

    day: int
    index: int

    def __repr__(self) -> str:
        return f"g({self.day},{self.index})"


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, bool):
        raise InvalidArgumentError(f"not a rational value: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgumentError(f"not a rational value: {value!r}") from exc
    raise InvalidArgumentError(f"not an exact rational value: {value!r}")


@dataclass(frozen=True)
class TemporalInstance:
    """Agents, day-partitioned goods and exact additive valuations."""

    n: int
    days: tuple[tuple[GoodId, ...], ...]
    values: tuple[Mapping[GoodId, Fraction], ...]
    names: Mapping[GoodId, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError("an instance needs at least one agent")
        if not self.days:
            raise InvalidArgumentError("an instance needs at least one day")
        if len(self.values) != self.n:
            raise InvalidArgumentError(f"expected valuations for {self.n} agents, got {len(self.values)}")
        for t, day in enumerate(self.days, start=1):
            if not day:
                raise InvalidArgumentError(f"day {t} is empty")
            for j, g in enumerate(day):
                if g != GoodId(t, j):
                    raise InvalidArgumentError(f"good {g!r} is out of place (expected {GoodId(t, j)!r})")
        goods = self.goods
        for i, vi in enumerate(self.values):
            if len(vi) != len(goods):
                missing = [g for g in goods if g not in vi]
                raise InvalidArgumentError(f"agent {i + 1} has no value for {missing[:3]!r}")
            for g in goods:
                if g not in vi:
                    raise InvalidArgumentError(f"agent {i + 1} has no value for {g!r}")
                v = vi[g]
                if not isinstance(v, Fraction):
                    raise InvalidArgumentError(f"value for {g!r} must be a Fraction, got {type(v).__name__}")
                if v < 0:
                    raise InvalidArgumentError(f"agent {i + 1} has a negative value for {g!r}")
        if not self.names:
            object.__setattr__(self, "names", {g: f"g{g.day}.{g.index + 1}" for g in goods})
        elif set(self.names) != set(goods) or len(set(self.names.values())) != len(goods):
            raise InvalidArgumentError("good names must be unique and cover every good")

    @classmethod
    def from_table(cls, days: Sequence[Sequence[Sequence]], names: Sequence[Sequence[str]] | None = None):
        """Build from ``days[t][j] = (v_1, ..., v_n)``.

        >>> inst = TemporalInstance.from_table([[(4, 1), (3, 2)], [("7/2", 0)]])
        >>> inst.n, inst.k, inst.value(0, GoodId(2, 0))
        (2, 2, Fraction(7, 2))
        """
        if not days or not days[0]:
            raise InvalidArgumentError("an instance needs at least one nonempty day")
        n = len(days[0][0])
        values: list[dict[GoodId, Fraction]] = [{} for _ in range(n)]
        gids = []
        for t, day in enumerate(days, start=1):
            row = []
            for j, vec in enumerate(day):
                if len(vec) != n:
                    raise InvalidArgumentError(f"good {j} of day {t} has {len(vec)} values, expected {n}")
                g = GoodId(t, j)
                row.append(g)
                for i, v in enumerate(vec):
                    values[i][g] = as_fraction(v)
            gids.append(tuple(row))
        name_map = {}
        if names is not None:
            for t, day in enumerate(names, start=1):
                for j, name in enumerate(day):
                    name_map[GoodId(t, j)] = name
        return cls(n=n, days=tuple(gids), values=tuple(values), names=name_map)

    @property
    def k(self) -> int:
        return len(self.days)

    @property
    def goods(self) -> tuple[GoodId, ...]:
        return tuple(g for day in self.days for g in day)

    @property
    def agents(self) -> range:
        return range(self.n)

    def day(self, t: int) -> frozenset[GoodId]:
        if not 1 <= t <= self.k:
            raise InvalidArgumentError(f"day {t} out of range 1..{self.k}")
        return frozenset(self.days[t - 1])

    def value(self, agent: int, good: GoodId) -> Fraction:
        return self.values[agent][good]

    def bundle_value(self, agent: int, goods: Iterable[GoodId]) -> Fraction:
        vi = self.values[agent]
        return sum((vi[g] for g in goods), Fraction(0))

    def vector(self, good: GoodId) -> tuple[Fraction, ...]:
        return tuple(vi[good] for vi in self.values)

    def name(self, good: GoodId) -> str:
        return self.names[good]

    def by_name(self) -> dict[str, GoodId]:
        return {name: g for g, name in self.names.items()}

    def with_values(self, values: Sequence[Mapping[GoodId, Fraction]]) -> "TemporalInstance":
        return TemporalInstance(n=len(values), days=self.days, values=tuple(dict(v) for v in values), names=self.names)


@dataclass(frozen=True)
class PreferenceOrdering:
    """An agent's strict ranking of a good set: value descending, then GoodId ascending."""

    agent: int
    ranked: tuple[GoodId, ...]

    def __iter__(self) -> Iterator[GoodId]:
        return iter(self.ranked)

    def __len__(self) -> int:
        return len(self.ranked)


def _check_subset(instance: TemporalInstance, S: Iterable[GoodId]) -> frozenset[GoodId]:
    S = frozenset(S)
    known = instance.values[0]
    for g in S:
        if g not in known:
            raise InvalidArgumentError(f"{g!r} is not a good of this instance")
    return S


def preference_ordering(instance: TemporalInstance, agent: int, S: Iterable[GoodId]) -> PreferenceOrdering:
    vi = instance.values[agent]
    return PreferenceOrdering(agent, tuple(sorted(S, key=lambda g: (-vi[g], g))))


def top_set(instance: TemporalInstance, agent: int, S: Iterable[GoodId], r: int) -> frozenset[GoodId]:
    """The ``r`` goods of ``S`` the agent ranks highest under the global tiebreak."""
    S = _check_subset(instance, S)
    if not 0 <= r <= len(S):
        raise InvalidArgumentError(f"r={r} must lie in [0, {len(S)}]")
    return frozenset(preference_ordering(instance, agent, S).ranked[:r])


def head_set(instance: TemporalInstance, agent: int, S: Iterable[GoodId], g: GoodId) -> frozenset[GoodId]:
    """All goods of ``S`` the agent values at least as much as ``g``."""
    S = _check_subset(instance, S)
    if g not in S:
        raise InvalidArgumentError(f"{g!r} is not in the given set")
    vi = instance.values[agent]
    threshold = vi[g]
    return frozenset(h for h in S if vi[h] >= threshold)


def prefix_goods(instance: TemporalInstance, t: int) -> frozenset[GoodId]:
    """Goods that arrived on days ``1..t``."""
    if not 1 <= t <= instance.k:
        raise InvalidArgumentError(f"day {t} out of range 1..{instance.k}")
    return frozenset(g for day in instance.days[:t] for g in day)


def common_ranking(instance: TemporalInstance, S: Iterable[GoodId]) -> tuple[GoodId, ...] | None:
    """A strict order of ``S`` refining every agent's weak order, or None if none exists.

    Sorting by the tuple of all agents' values (descending) and then GoodId gives
    such a refinement whenever the weak orders never disagree strictly on a pair.
    """
    vals = instance.values
    order = sorted(S, key=lambda g: (tuple(-vi[g] for vi in vals), g))
    for vi in vals:
        for a, b in zip(order, order[1:]):
            if vi[a] < vi[b]:
                return None
    return tuple(order)


@dataclass(frozen=True)
class Restrictions:
    two_agents: bool
    identical_orderings: bool
    identical_days: bool


def _day_signature(instance: TemporalInstance, day: Sequence[GoodId]) -> list[tuple[Fraction, ...]]:
    return sorted(instance.vector(g) for g in day)


def classify(instance: TemporalInstance) -> Restrictions:
    """Detect which of the special settings the instance belongs to.

    Identical orderings means the agents' weak orders never disagree strictly on any
    pair, i.e. one common strict ranking refines all of them.
    """
    first = _day_signature(instance, instance.days[0])
    same_days = all(_day_signature(instance, day) == first for day in instance.days[1:])
    return Restrictions(
        two_agents=instance.n == 2,
        identical_orderings=common_ranking(instance, instance.goods) is not None,
        identical_days=same_days,
    )


def identical_day_bijection(instance: TemporalInstance, t: int, u: int) -> dict[GoodId, GoodId]:
    """Sort-induced value-preserving map from day ``t`` to day ``u``."""
    src = sorted(instance.days[t - 1], key=lambda g: (instance.vector(g), g))
    dst = sorted(instance.days[u - 1], key=lambda g: (instance.vector(g), g))
    if len(src) != len(dst) or any(instance.vector(a) != instance.vector(b) for a, b in zip(src, dst)):
        raise InvalidArgumentError(f"days {t} and {u} are not identical")
    return dict(zip(src, dst))


@dataclass(frozen=True)
class Allocation:
    """A total assignment ``good -> agent`` over some good set."""

    owner: Mapping[GoodId, int]

    @classmethod
    def from_bundles(cls, bundles: Sequence[Iterable[GoodId]]) -> "Allocation":
        owner: dict[GoodId, int] = {}
        for i, bundle in enumerate(bundles):
            for g in bundle:
                if g in owner:
                    raise InvalidArgumentError(f"{g!r} appears in two bundles")
                owner[g] = i
        return cls(owner)

    @property
    def goods(self) -> frozenset[GoodId]:
        return frozenset(self.owner)

    def __getitem__(self, good: GoodId) -> int:
        return self.owner[good]

    def __len__(self) -> int:
        return len(self.owner)

    def bundle(self, agent: int) -> frozenset[GoodId]:
        return frozenset(g for g, i in self.owner.items() if i == agent)

    def bundles(self, n: int) -> tuple[frozenset[GoodId], ...]:
        out: list[set[GoodId]] = [set() for _ in range(n)]
        for g, i in self.owner.items():
            out[i].add(g)
        return tuple(frozenset(b) for b in out)

    def restrict(self, S: Iterable[GoodId]) -> "Allocation":
        owner = self.owner
        try:
            return Allocation({g: owner[g] for g in S})
        except KeyError as exc:
            raise InvalidArgumentError(f"allocation does not cover {exc.args[0]!r}") from None

    def covers(self, S: Iterable[GoodId]) -> bool:
        return all(g in self.owner for g in S)

    def merge(self, other: "Allocation") -> "Allocation":
        clash = self.goods & other.goods
        if clash:
            raise InvalidArgumentError(f"allocations overlap on {sorted(clash)[:3]!r}")
        return Allocation({**self.owner, **other.owner})

    def swapped(self) -> "Allocation":
        """Exchange the two agents' bundles (two-agent allocations only)."""
        if any(i not in (0, 1) for i in self.owner.values()):
            raise InvalidArgumentError("swapping bundles needs a two-agent allocation")
        return Allocation({g: 1 - i for g, i in self.owner.items()})

    def relabel(self, mapping: Mapping[GoodId, GoodId]) -> "Allocation":
        return Allocation({mapping[g]: i for g, i in self.owner.items()})

    @staticmethod
    def union(parts: Iterable["Allocation"]) -> "Allocation":
        owner: dict[GoodId, int] = {}
        for part in parts:
            for g, i in part.owner.items():
                if g in owner:
                    raise InvalidArgumentError(f"allocations overlap on {g!r}")
                owner[g] = i
        return Allocation(owner)


@dataclass(frozen=True)
class AllocationPair:
    """Two allocations of the same good set (two agents)."""

    first: Allocation
    second: Allocation

    def __post_init__(self):
        if self.first.goods != self.second.goods:
            raise InvalidArgumentError("both members of a pair must cover the same goods")

    @property
    def goods(self) -> frozenset[GoodId]:
        return self.first.goods

    def __iter__(self):
        return iter((self.first, self.second))

    def __getitem__(self, idx: int) -> Allocation:
        return (self.first, self.second)[idx]
