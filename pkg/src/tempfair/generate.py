"""Seeded random instances for tests, benchmarks and the ``generate`` command."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from .errors import InvalidArgumentError
from .model import TemporalInstance, classify

__all__ = ["GeneratorConfig", "generate_instance", "DISTRIBUTIONS"]

DISTRIBUTIONS = ("uniform-integer", "exponential-rank", "identical-agents")


@dataclass(frozen=True)
class GeneratorConfig:
    n: int = 2
    k: int = 3
    goods_per_day: tuple[int, int] = (1, 5)
    distribution: str = "uniform-integer"
    lo: int = 0
    hi: int = 9
    identical_orderings: bool = False
    identical_days: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise InvalidArgumentError("n and k must be at least 1")
        a, b = self.goods_per_day
        if not 1 <= a <= b:
            raise InvalidArgumentError(f"goods_per_day must satisfy 1 <= lo <= hi, got {self.goods_per_day}")
        if self.distribution not in DISTRIBUTIONS:
            raise InvalidArgumentError(f"unknown distribution {self.distribution!r}; expected one of {DISTRIBUTIONS}")
        if not 0 <= self.lo <= self.hi:
            raise InvalidArgumentError(f"value range must satisfy 0 <= lo <= hi, got [{self.lo}, {self.hi}]")
        if not 0 <= self.seed < 2 ** 64:
            raise InvalidArgumentError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_mapping(cls, raw: Mapping) -> "GeneratorConfig":
        """Accepts ``distribution`` as a name or as ``{"kind": ..., "lo": ..., "hi": ...}``."""
        raw = dict(raw)
        known = {"n", "k", "goods_per_day", "distribution", "restrictions", "seed", "lo", "hi",
                 "identical_orderings", "identical_days"}
        unknown = set(raw) - known
        if unknown:
            raise InvalidArgumentError(f"unknown generator keys {sorted(unknown)!r}")
        dist = raw.pop("distribution", "uniform-integer")
        if isinstance(dist, Mapping):
            dist = dict(dist)
            kind = dist.pop("kind", None)
            raw.update({key: dist[key] for key in ("lo", "hi") if key in dist})
            dist = kind
        restrictions = raw.pop("restrictions", {}) or {}
        for flag in ("identical_orderings", "identical_days"):
            if flag in restrictions:
                raw[flag] = bool(restrictions[flag])
        if "goods_per_day" in raw:
            raw["goods_per_day"] = tuple(raw["goods_per_day"])
        return cls(distribution=dist, **raw)


def _agent_values(rng: random.Random, cfg: GeneratorConfig, count: int) -> list[int]:
    if cfg.distribution == "exponential-rank":
        ranks = list(range(count))
        rng.shuffle(ranks)
        return [2 ** r for r in ranks]
    return [rng.randint(cfg.lo, cfg.hi) for _ in range(count)]


def generate_instance(config: GeneratorConfig) -> TemporalInstance:
    """Draw an instance; the same config (seed included) always gives the same instance."""
    rng = random.Random(config.seed)
    n, k = config.n, config.k
    sizes = [rng.randint(*config.goods_per_day) for _ in range(1 if config.identical_days else k)]
    m = sum(sizes)
    if config.distribution == "identical-agents":
        shared = _agent_values(rng, config, m)
        per_agent = [list(shared) for _ in range(n)]
    else:
        per_agent = [_agent_values(rng, config, m) for _ in range(n)]
    if config.identical_orderings:
        # every agent's values laid out along one shared random order
        order = list(range(m))
        rng.shuffle(order)
        for vals in per_agent:
            ranked = sorted(vals, reverse=True)
            for pos, slot in enumerate(order):
                vals[slot] = ranked[pos]
    table, cursor = [], 0
    for size in sizes:
        table.append([tuple(per_agent[i][cursor + j] for i in range(n)) for j in range(size)])
        cursor += size
    if config.identical_days:
        table = [list(table[0]) for _ in range(k)]
    instance = TemporalInstance.from_table(table)
    flags = classify(instance)
    if config.identical_orderings and not flags.identical_orderings:
        raise InvalidArgumentError("generated instance lost its common ordering")
    if config.identical_days and not flags.identical_days:
        raise InvalidArgumentError("generated instance lost its identical days")
    return instance
