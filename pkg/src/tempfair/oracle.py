"""Exhaustive existence search for allocations meeting a conjunction of (predicate, scope) pairs.

Small instances are enumerated outright. Larger ones are searched depth-first
over goods in day order; a scope set is checked the moment its last good is
placed, and SD-EF1 sets are pruned earlier through necessary count bounds on
their head sets. When agents are interchangeable, agent ``i`` may only appear
after agents ``0..i-1`` have.
"""

from __future__ import annotations

import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import _kernels
from .errors import InternalDefect, InvalidArgumentError, ResourceLimitError
from .fairness import DEFAULT_PO_BUDGET, Predicate, Scope, SetView
from .model import Allocation, GoodId, TemporalInstance

logger = logging.getLogger(__name__)

__all__ = [
    "PropertyQuery",
    "CounterexampleFixture",
    "FixtureResult",
    "exists_allocation",
    "fixtures",
    "verify_counterexamples",
    "PLAIN_BUDGET",
    "NODE_BUDGET",
]

PLAIN_BUDGET = 10 ** 7
NODE_BUDGET = 10 ** 9


@dataclass(frozen=True)
class PropertyQuery:
    conjuncts: tuple[tuple[Predicate, Scope], ...]

    def __post_init__(self):
        if not self.conjuncts:
            raise InvalidArgumentError("a query needs at least one conjunct")

    @classmethod
    def parse(cls, text: str, family: Iterable[Iterable[GoodId]] | None = None) -> "PropertyQuery":
        """``"SD_EF1@up-to-each-day, EF1@per-day"``; a missing scope means overall."""
        conjuncts = []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            pred, _, scope = part.partition("@")
            conjuncts.append((Predicate.parse(pred), Scope.parse(scope or "overall", family)))
        return cls(tuple(conjuncts))

    def __str__(self) -> str:
        return " & ".join(f"{p.name}@{s}" for p, s in self.conjuncts)


class _AssignView:
    """Read-only ``GoodId -> agent`` mapping over the search's assignment array."""

    __slots__ = ("pos", "assign")

    def __init__(self, pos, assign):
        self.pos = pos
        self.assign = assign

    def __getitem__(self, g):
        return self.assign[self.pos[g]]


class _Plan:
    """Constraints of a query, indexed by the search depth at which they become checkable."""

    def __init__(self, instance: TemporalInstance, query: PropertyQuery, po_budget: int):
        self.instance = instance
        self.goods = instance.goods
        self.pos = {g: p for p, g in enumerate(self.goods)}
        self.po_budget = po_budget
        m = len(self.goods)
        views: dict[frozenset[GoodId], SetView] = {}
        checks: dict[tuple[frozenset[GoodId], Predicate], None] = {}
        for p, scope in query.conjuncts:
            for s in scope.sets(instance):
                checks[(s, p)] = None
                if s not in views:
                    views[s] = SetView(instance, s)
        self.at_depth: list[list[tuple[SetView, Predicate]]] = [[] for _ in range(m)]
        for s, p in checks:
            last = max(self.pos[g] for g in s)
            self.at_depth[last].append((views[s], p))
        for bucket in self.at_depth:
            # cheap ordinal checks first
            bucket.sort(key=lambda vp: (not vp[1].ordinal, len(vp[0].goods)))
        self.prune = self._prune_tables(views, [s for s, p in checks if p is Predicate.SD_EF1])
        self.ordinal = all(p.ordinal for p, _ in query.conjuncts)

    def _prune_tables(self, views, sdef1_sets):
        """Per depth, the head-set blocks containing that depth's good, packed for ``prune_blocks``."""
        n = self.instance.n
        blocks: dict[frozenset[GoodId], list[int]] = {}
        for s in sdef1_sets:
            view = views[s]
            for i in range(n):
                ranked = view.ranking[i]
                marks = view.boundary[i]
                for p in range(len(ranked)):
                    if marks[p]:
                        head = frozenset(ranked[:p + 1])
                        blocks.setdefault(head, [])
                        if i not in blocks[head]:
                            blocks[head].append(i)
        per_depth = [[] for _ in self.goods]
        for head, agents in blocks.items():
            for g in head:
                per_depth[self.pos[g]].append((head, agents))
        tables = []
        for entries in per_depth:
            if not entries:
                tables.append(None)
                continue
            idx, idx_off, lower, ag, ag_off = [], [0], [], [], [0]
            for head, agents in entries:
                idx.extend(sorted(self.pos[g] for g in head))
                idx_off.append(len(idx))
                lower.append(len(head) // n)
                ag.extend(agents)
                ag_off.append(len(ag))
            ints = _kernels.ints
            tables.append((ints(idx), ints(idx_off), ints(lower), ints(ag), ints(ag_off)))
        return tables

    def complete_ok(self, depth: int, view_map: _AssignView) -> bool:
        for view, p in self.at_depth[depth]:
            if not view.holds(view_map, p, po_budget=self.po_budget):
                return False
        return True

    def symmetric(self) -> bool:
        """Agents are interchangeable for this query."""
        vals = self.instance.values
        if all(v == vals[0] for v in vals[1:]):
            return True
        if not self.ordinal:
            return False
        ranks = []
        for vi in vals:
            ranked = sorted(self.goods, key=lambda g: (-vi[g], g))
            ties = tuple(vi[a] == vi[b] for a, b in zip(ranked, ranked[1:]))
            ranks.append((tuple(ranked), ties))
        return all(r == ranks[0] for r in ranks[1:])


def _plain(plan: _Plan, budget: int) -> Allocation | None:
    n = plan.instance.n
    m = len(plan.goods)
    if n ** m > budget:
        raise ResourceLimitError(f"plain enumeration needs {n}^{m} allocations, budget is {budget}")
    assign = [0] * m
    view = _AssignView(plan.pos, assign)
    for combo in itertools.product(range(n), repeat=m):
        assign[:] = combo
        if all(plan.complete_ok(d, view) for d in range(m)):
            return Allocation(dict(zip(plan.goods, combo)))
    return None


def _backtrack(plan: _Plan, node_budget: int, symmetry: bool, prefix: Sequence[int] = ()) -> tuple[Allocation | None, int]:
    n = plan.instance.n
    m = len(plan.goods)
    assign = _kernels.ints([-1] * m)
    view = _AssignView(plan.pos, assign)
    prune = plan.prune
    prune_blocks = _kernels.prune_blocks
    nodes = 0
    # first depth whose choice is still open; the prefix is fixed
    base = len(prefix)

    def admissible(d: int) -> bool:
        table = prune[d]
        if table is not None and prune_blocks(assign, *table, n) >= 0:
            return False
        return plan.complete_ok(d, view)

    for d, a in enumerate(prefix):
        assign[d] = a
        if not admissible(d):
            return None, 0
    used = (max(prefix) + 1) if prefix else 0
    # iterative DFS: choice[d] is the next agent to try at depth d
    if base == m:
        return Allocation(dict(zip(plan.goods, assign))), 0
    choice = [0] * m
    used_at = [0] * (m + 1)
    used_at[base] = used
    d = base
    while d >= base:
        limit = min(used_at[d] + 1, n) if symmetry else n
        a = choice[d]
        if a >= limit:
            assign[d] = -1
            choice[d] = 0
            d -= 1
            if d >= base:
                choice[d] += 1
            continue
        nodes += 1
        if nodes > node_budget:
            raise ResourceLimitError(f"backtracking exceeded {node_budget} nodes")
        assign[d] = a
        if admissible(d):
            used_at[d + 1] = max(used_at[d], a + 1)
            if d + 1 == m:
                return Allocation(dict(zip(plan.goods, assign))), nodes
            d += 1
            choice[d] = 0
        else:
            choice[d] += 1
    return None, nodes


def _branch(args):
    instance, query, po_budget, node_budget, symmetry, prefix = args
    plan = _Plan(instance, query, po_budget)
    return _backtrack(plan, node_budget, symmetry, prefix)


def exists_allocation(instance: TemporalInstance, query: PropertyQuery, *, method: str = "auto",
                      plain_budget: int = PLAIN_BUDGET, node_budget: int = NODE_BUDGET,
                      symmetry: bool = True, po_budget: int = DEFAULT_PO_BUDGET, jobs: int = 1,
                      stats: dict | None = None) -> Allocation | None:
    """An allocation satisfying every conjunct, or None when none exists.

    ``method`` is ``"plain"``, ``"backtrack"`` or ``"auto"`` (plain when
    ``n**m <= plain_budget``). Running out of budget raises
    :class:`ResourceLimitError`; it never turns into None. Both methods return
    the first solution in lexicographic order of agents along the goods.
    """
    started = time.perf_counter()
    plan = _Plan(instance, query, po_budget)
    n, m = instance.n, len(plan.goods)
    if method == "auto":
        method = "plain" if n ** m <= plain_budget else "backtrack"
    if method == "plain":
        found = _plain(plan, plain_budget)
        nodes = n ** m
    elif method == "backtrack":
        sym = symmetry and plan.symmetric()
        if jobs > 1 and m > 0:
            # split on the first good; with symmetry only agent 0 can take it, so split on the second
            depth = 2 if sym and m > 1 else 1
            prefixes = [p for p in itertools.product(range(n), repeat=depth)
                        if not sym or all(p[q] <= max(p[:q], default=-1) + 1 for q in range(depth))]
            args = [(instance, query, po_budget, node_budget, sym, p) for p in prefixes]
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_branch, args))
            nodes = sum(r[1] for r in results)
            found = next((r[0] for r in results if r[0] is not None), None)
        else:
            found, nodes = _backtrack(plan, node_budget, sym)
    else:
        raise InvalidArgumentError(f"unknown search method {method!r}")
    if stats is not None:
        stats.update(method=method, nodes=nodes, seconds=time.perf_counter() - started)
    logger.debug("%s search over %d goods: %d nodes", method, m, nodes)
    return found


@dataclass(frozen=True)
class CounterexampleFixture:
    name: str
    instance: TemporalInstance
    query: PropertyQuery
    expected_feasible: bool = False


@dataclass(frozen=True)
class FixtureResult:
    name: str
    feasible: bool
    method: str
    nodes: int
    seconds: float

    @property
    def confirmed(self) -> bool:
        return not self.feasible


def _named(days_values: Sequence[Sequence[tuple[str, Sequence[int]]]]) -> TemporalInstance:
    table = [[vals for _, vals in day] for day in days_values]
    names = [[name for name, _ in day] for day in days_values]
    return TemporalInstance.from_table(table, names)


def fixtures() -> list[CounterexampleFixture]:
    v = {"g1": 4, "g2": 3, "g3": 2, "g4": 1}
    four_goods = _named([
        [("g1", (v["g1"],) * 2), ("g4", (v["g4"],) * 2)],
        [("g3", (v["g3"],) * 2)],
        [("g2", (v["g2"],) * 2)],
    ])
    v1 = {f"g{j}": 9 - j for j in range(1, 9)}
    v2 = {"g2": 8, "g3": 7, "g1": 6, "g4": 5, "g6": 4, "g8": 3, "g5": 2, "g7": 1}
    eight_goods = _named([
        [(g, (v1[g], v2[g])) for g in ("g1", "g5", "g7")],
        [(g, (v1[g], v2[g])) for g in ("g2", "g4", "g6")],
        [(g, (v1[g], v2[g])) for g in ("g3", "g8")],
    ])
    identical_days = _named([
        [(f"g{l},{t}", (7 - l,) * 12) for l in range(1, 7)] for t in range(1, 5)
    ])
    return [
        CounterexampleFixture("two-agents-prefix", four_goods, PropertyQuery.parse("SD_EF1@up-to-each-day")),
        CounterexampleFixture("two-agents-daily-ef1", eight_goods, PropertyQuery.parse("EF1@per-day,SD_EF1@overall")),
        CounterexampleFixture("identical-days-prefix", identical_days, PropertyQuery.parse("SD_EF1@up-to-each-day")),
    ]


def verify_counterexamples(names: Iterable[str] | None = None, *, node_budget: int = NODE_BUDGET) -> list[FixtureResult]:
    """Search every built-in counterexample; a feasible one is a defect."""
    wanted = None if names is None else set(names)
    out = []
    for fx in fixtures():
        if wanted is not None and fx.name not in wanted:
            continue
        stats: dict = {}
        found = exists_allocation(fx.instance, fx.query, node_budget=node_budget, stats=stats)
        if (found is not None) != fx.expected_feasible:
            raise InternalDefect(f"fixture {fx.name}: expected feasible={fx.expected_feasible}, found {found}")
        out.append(FixtureResult(fx.name, found is not None, stats["method"], stats["nodes"], stats["seconds"]))
    return out
