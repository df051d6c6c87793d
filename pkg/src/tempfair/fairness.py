"""Fairness predicates, temporal scopes and the SD count conditions.

Every predicate is evaluated on the restriction of an allocation to a good set S.
Value-based predicates work on per-agent integer rescalings of the exact values
(one common denominator per agent), which keeps comparisons exact; ordinal ones
go through the counting kernels.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import _kernels
from .errors import InvalidArgumentError, ResourceLimitError
from .model import Allocation, AllocationPair, GoodId, TemporalInstance, prefix_goods

__all__ = [
    "Predicate",
    "Scope",
    "PER_DAY",
    "OVERALL",
    "UP_TO_EACH_DAY",
    "Violation",
    "FairnessReport",
    "SetView",
    "check",
    "check_temporal",
    "sd_dominates",
    "cancel_out",
    "sdef1_count_conditions",
    "DEFAULT_PO_BUDGET",
]

DEFAULT_PO_BUDGET = 2_000_000


class Predicate(enum.Enum):
    EF = "EF"
    EF1 = "EF1"
    EFX = "EFX"
    PROP = "PROP"
    PROP1 = "PROP1"
    SD_EF = "SD_EF"
    SD_EF1 = "SD_EF1"
    SD_PROP1 = "SD_PROP1"
    PO = "PO"
    BALANCED = "BALANCED"

    @property
    def ordinal(self) -> bool:
        """True when the predicate depends on the agents' weak orders only."""
        return self in (Predicate.SD_EF, Predicate.SD_EF1, Predicate.SD_PROP1, Predicate.BALANCED)

    @classmethod
    def parse(cls, text: str) -> "Predicate":
        key = text.strip().upper().replace("-", "_")
        try:
            return cls[key]
        except KeyError:
            raise InvalidArgumentError(f"unknown predicate {text!r}") from None


@dataclass(frozen=True)
class Scope:
    """Which good sets a predicate must hold on: per day, overall, up to each day, or a laminar family."""

    kind: str
    family: tuple[frozenset[GoodId], ...] | None = None

    KINDS = ("per-day", "overall", "up-to-each-day", "laminar")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidArgumentError(f"unknown scope {self.kind!r}")
        if (self.kind == "laminar") != (self.family is not None):
            raise InvalidArgumentError("only the laminar scope carries a family")

    @classmethod
    def laminar(cls, family: Iterable[Iterable[GoodId]]) -> "Scope":
        sets = {frozenset(s) for s in family}
        return cls("laminar", tuple(sorted(sets, key=lambda s: (len(s), sorted(s)))))

    @classmethod
    def parse(cls, text: str, family: Iterable[Iterable[GoodId]] | None = None) -> "Scope":
        kind = text.strip().lower().replace("_", "-")
        if kind == "laminar":
            if family is None:
                raise InvalidArgumentError("the laminar scope needs a family")
            return cls.laminar(family)
        return cls(kind)

    def sets(self, instance: TemporalInstance) -> list[frozenset[GoodId]]:
        if self.kind == "per-day":
            return [frozenset(day) for day in instance.days]
        if self.kind == "overall":
            return [frozenset(instance.goods)]
        if self.kind == "up-to-each-day":
            return [prefix_goods(instance, t) for t in range(1, instance.k + 1)]
        from .laminar import validate_laminar

        validate_laminar(self.family, frozenset(instance.goods))
        return list(self.family)

    def __str__(self) -> str:
        return self.kind


PER_DAY = Scope("per-day")
OVERALL = Scope("overall")
UP_TO_EACH_DAY = Scope("up-to-each-day")


@dataclass(frozen=True)
class Violation:
    """Where a definition fails: the good set, the agents involved, and a witness."""

    goods: frozenset[GoodId]
    predicate: Predicate
    agent: int
    other: int | None
    detail: str


@dataclass(frozen=True)
class FairnessReport:
    passed: bool
    violations: tuple[Violation, ...] = ()

    def __post_init__(self):
        if self.passed != (not self.violations):
            raise InvalidArgumentError("a report passes exactly when it has no violations")

    def __bool__(self) -> bool:
        return self.passed

    @classmethod
    def of(cls, violations: Iterable[Violation]) -> "FairnessReport":
        violations = tuple(violations)
        return cls(not violations, violations)

    @classmethod
    def combine(cls, reports: Iterable["FairnessReport"]) -> "FairnessReport":
        return cls.of(v for r in reports for v in r.violations)


def _scaled(values: Mapping[GoodId, Fraction], goods: Sequence[GoodId]) -> tuple[dict[GoodId, int], int]:
    scale = 1
    for g in goods:
        scale = math.lcm(scale, values[g].denominator)
    return {g: int(values[g] * scale) for g in goods}, scale


class SetView:
    """Per-set precomputation reused across many allocations of the same set.

    Holds each agent's strict ranking of S with head-set boundaries, and
    integer-rescaled values. The oracle builds one per scope set.
    """

    def __init__(self, instance: TemporalInstance, goods: Iterable[GoodId]):
        self.instance = instance
        self.n = instance.n
        self.goods = tuple(sorted(goods))
        self.goodset = frozenset(self.goods)
        self.ranking: list[tuple[GoodId, ...]] = []
        self.boundary: list = []
        self.ivalues: list[dict[GoodId, int]] = []
        self.vlists: list[list[int]] = []
        self.scale: list[int] = []
        self.total: list[int] = []
        for i in range(self.n):
            vi = instance.values[i]
            ranked = tuple(sorted(self.goods, key=lambda g: (-vi[g], g)))
            self.ranking.append(ranked)
            marks = [1 if p == len(ranked) - 1 or vi[ranked[p]] > vi[ranked[p + 1]] else 0 for p in range(len(ranked))]
            self.boundary.append(_kernels.ints(marks))
            iv, scale = _scaled(vi, self.goods)
            self.ivalues.append(iv)
            self.vlists.append([iv[g] for g in self.goods])
            self.scale.append(scale)
            self.total.append(sum(iv.values()))

    def _owners_along(self, owner: Mapping[GoodId, int], i: int):
        return _kernels.ints([owner[g] for g in self.ranking[i]])

    def _val(self, i: int, x: int) -> Fraction:
        return Fraction(x, self.scale[i])

    def bundle_values(self, owner: Mapping[GoodId, int], i: int) -> list[int]:
        iv = self.ivalues[i]
        out = [0] * self.n
        for g in self.goods:
            out[owner[g]] += iv[g]
        return out

    def violations(self, owner: Mapping[GoodId, int], p: Predicate, *, po_budget: int = DEFAULT_PO_BUDGET,
                   first_only: bool = False) -> list[Violation]:
        handler = getattr(self, "_v_" + p.name.lower())
        if p is Predicate.PO:
            return handler(owner, po_budget)
        return handler(owner, first_only)

    def holds(self, owner: Mapping[GoodId, int], p: Predicate, *, po_budget: int = DEFAULT_PO_BUDGET) -> bool:
        return not self.violations(owner, p, po_budget=po_budget, first_only=True)

    # envy-based, value predicates

    def _envy_family(self, owner, first_only, p: Predicate):
        out = []
        n = self.n
        owners = [owner[g] for g in self.goods]
        for i in range(n):
            worth = [0] * n
            best = [-1] * n
            worst = [-1] * n
            for j, x in zip(owners, self.vlists[i]):
                worth[j] += x
                if x > best[j]:
                    best[j] = x
                if worst[j] < 0 or x < worst[j]:
                    worst[j] = x
            for j in range(n):
                if j == i or worth[i] >= worth[j]:
                    continue
                if p is Predicate.EF:
                    detail = f"v_{i + 1}(own)={self._val(i, worth[i])} < v_{i + 1}(A_{j + 1})={self._val(i, worth[j])}"
                elif best[j] < 0:
                    continue  # empty envied bundle
                elif p is Predicate.EF1:
                    if worth[i] >= worth[j] - best[j]:
                        continue
                    detail = (f"v_{i + 1}(own)={self._val(i, worth[i])} < v_{i + 1}(A_{j + 1} - best)="
                              f"{self._val(i, worth[j] - best[j])}")
                else:  # EFX
                    if worth[i] >= worth[j] - worst[j]:
                        continue
                    detail = (f"v_{i + 1}(own)={self._val(i, worth[i])} < v_{i + 1}(A_{j + 1} - least)="
                              f"{self._val(i, worth[j] - worst[j])}")
                out.append(Violation(self.goodset, p, i, j, detail))
                if first_only:
                    return out
        return out

    def _v_ef(self, owner, first_only):
        return self._envy_family(owner, first_only, Predicate.EF)

    def _v_ef1(self, owner, first_only):
        return self._envy_family(owner, first_only, Predicate.EF1)

    def _v_efx(self, owner, first_only):
        return self._envy_family(owner, first_only, Predicate.EFX)

    def _v_prop(self, owner, first_only):
        out = []
        for i in range(self.n):
            own = self.bundle_values(owner, i)[i]
            if own * self.n < self.total[i]:
                out.append(Violation(self.goodset, Predicate.PROP, i, None,
                                     f"v_{i + 1}(own)={self._val(i, own)} < {self._val(i, self.total[i])}/{self.n}"))
                if first_only:
                    break
        return out

    def _v_prop1(self, owner, first_only):
        out = []
        for i in range(self.n):
            iv = self.ivalues[i]
            outside = [iv[g] for g in self.goods if owner[g] != i]
            if not outside:
                continue  # agent holds all of S
            own = sum(iv[g] for g in self.goods if owner[g] == i)
            if (own + max(outside)) * self.n < self.total[i]:
                out.append(Violation(self.goodset, Predicate.PROP1, i, None,
                                     f"v_{i + 1}(own + best outside)={self._val(i, own + max(outside))}"
                                     f" < {self._val(i, self.total[i])}/{self.n}"))
                if first_only:
                    break
        return out

    # ordinal predicates

    def _sd(self, owner, first_only, p: Predicate, mode: int):
        out = []
        for i in range(self.n):
            ranked = self.ranking[i]
            other, length = _kernels.sd_scan(self._owners_along(owner, i), self.boundary[i], self.n, i, mode)
            if other < 0:
                continue
            head = ranked[length - 1]
            detail = f"fails on H_{i + 1}(S, {head!r}) (top {length} of agent {i + 1})"
            out.append(Violation(self.goodset, p, i, None if other == i else other, detail))
            if first_only:
                break
        return out

    def _v_sd_ef(self, owner, first_only):
        return self._sd(owner, first_only, Predicate.SD_EF, _kernels.SD_EF)

    def _v_sd_ef1(self, owner, first_only):
        return self._sd(owner, first_only, Predicate.SD_EF1, _kernels.SD_EF1)

    def _v_sd_prop1(self, owner, first_only):
        return self._sd(owner, first_only, Predicate.SD_PROP1, _kernels.SD_PROP1)

    def _v_balanced(self, owner, first_only):
        sizes = [0] * self.n
        for g in self.goods:
            sizes[owner[g]] += 1
        lo, hi = min(sizes), max(sizes)
        if hi - lo <= 1:
            return []
        return [Violation(self.goodset, Predicate.BALANCED, sizes.index(hi), sizes.index(lo),
                          f"bundle sizes {sizes}")]

    def _v_po(self, owner, budget):
        if self.n ** len(self.goods) > budget:
            raise ResourceLimitError(
                f"PO check needs {self.n}^{len(self.goods)} allocations, budget is {budget}")
        current = [self.bundle_values(owner, i)[i] for i in range(self.n)]
        dominator = pareto_improvement(self, current)
        if dominator is None:
            return []
        alt = dict(zip(self.goods, dominator))
        return [Violation(self.goodset, Predicate.PO, 0, None,
                          f"dominated by {sorted(alt.items())}")]

    def sd_count_scan(self, owner: Mapping[GoodId, int], i: int, mode: int) -> tuple[int, int]:
        return _kernels.sd_scan(self._owners_along(owner, i), self.boundary[i], self.n, i, mode)


def pareto_improvement(view: SetView, utilities: Sequence[int]) -> tuple[int, ...] | None:
    """First allocation (in product order) that Pareto-dominates the given utility vector."""
    n = view.n
    ivs = [[view.ivalues[i][g] for g in view.goods] for i in range(n)]
    for assignment in itertools.product(range(n), repeat=len(view.goods)):
        util = [0] * n
        for pos, a in enumerate(assignment):
            util[a] += ivs[a][pos]
        if all(u >= c for u, c in zip(util, utilities)) and any(u > c for u, c in zip(util, utilities)):
            return assignment
    return None


def _require_cover(allocation: Allocation, S: frozenset[GoodId]) -> None:
    if not allocation.covers(S):
        missing = sorted(g for g in S if g not in allocation.owner)
        raise InvalidArgumentError(f"allocation is not total on the set; missing {missing[:3]!r}")


def check(instance: TemporalInstance, allocation: Allocation, S: Iterable[GoodId], p: Predicate, *,
          po_budget: int = DEFAULT_PO_BUDGET) -> FairnessReport:
    """Evaluate predicate ``p`` on the restriction of ``allocation`` to ``S``.

    >>> from tempfair.model import TemporalInstance, Allocation, GoodId
    >>> inst = TemporalInstance.from_table([[(1, 1)]])
    >>> a = Allocation({GoodId(1, 0): 0})
    >>> bool(check(inst, a, a.goods, Predicate.EF1)), bool(check(inst, a, a.goods, Predicate.EF))
    (True, False)
    """
    S = frozenset(S)
    _require_cover(allocation, S)
    view = SetView(instance, S)
    return FairnessReport.of(view.violations(allocation.owner, p, po_budget=po_budget))


def check_temporal(instance: TemporalInstance, allocation: Allocation, p: Predicate, scope: Scope, *,
                   po_budget: int = DEFAULT_PO_BUDGET) -> FairnessReport:
    """Conjunction of :func:`check` over every set of the scope."""
    _require_cover(allocation, frozenset(instance.goods))
    return FairnessReport.combine(
        check(instance, allocation, S, p, po_budget=po_budget) for S in scope.sets(instance))


def sd_dominates(instance: TemporalInstance, agent: int, X: Iterable[GoodId], Y: Iterable[GoodId],
                 S: Iterable[GoodId]) -> bool:
    """Whether every head set of ``S`` holds at least as many goods of X as of Y for the agent."""
    X, Y, S = frozenset(X), frozenset(Y), frozenset(S)
    if not X <= S or not Y <= S:
        raise InvalidArgumentError("both bundles must be subsets of S")
    vi = instance.values[agent]
    for g in S:
        threshold = vi[g]
        if sum(1 for h in X if vi[h] >= threshold) < sum(1 for h in Y if vi[h] >= threshold):
            return False
    return True


def cancel_out(instance: TemporalInstance, pair: AllocationPair) -> bool:
    """Whether two copies of the goods, split once by each member, leave nobody envious."""
    if instance.n != 2:
        raise InvalidArgumentError("cancelling pairs are defined for two agents")
    b, b2 = pair.first.bundles(2), pair.second.bundles(2)
    for i in (0, 1):
        mine = instance.bundle_value(i, b[i]) + instance.bundle_value(i, b2[i])
        theirs = instance.bundle_value(i, b[1 - i]) + instance.bundle_value(i, b2[1 - i])
        if mine < theirs:
            return False
    return True


def sdef1_count_conditions(instance: TemporalInstance, allocation: Allocation, S: Iterable[GoodId],
                           mode: str) -> bool:
    """The two top-set count conditions relating SD-EF1 to ranks.

    ``"sufficiency"``: every agent holds, in each of its top-r sets, at least one
    fewer good than any other agent does. ``"necessity"``: every agent holds at
    least floor(r/n) of its top-r set wherever that set is strictly preferred to the
    rest of S (tied boundaries are skipped).
    """
    if mode not in ("sufficiency", "necessity"):
        raise InvalidArgumentError(f"unknown mode {mode!r}")
    S = frozenset(S)
    _require_cover(allocation, S)
    view = SetView(instance, S)
    kernel_mode = _kernels.SUFFICIENCY if mode == "sufficiency" else _kernels.NECESSITY
    return all(view.sd_count_scan(allocation.owner, i, kernel_mode)[0] < 0 for i in range(instance.n))
