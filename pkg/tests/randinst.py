"""Seeded random instances and allocations shared by the test modules."""

import random

from tempfair.generate import GeneratorConfig, generate_instance
from tempfair.model import Allocation, TemporalInstance


def random_instance(rng, n_range=(2, 4), k_range=(1, 4), per_day=(1, 4), hi=9):
    n = rng.randint(*n_range)
    k = rng.randint(*k_range)
    days = [[tuple(rng.randint(0, hi) for _ in range(n)) for _ in range(rng.randint(*per_day))] for _ in range(k)]
    return TemporalInstance.from_table(days)


def random_allocation(rng, instance):
    return Allocation({g: rng.randrange(instance.n) for g in instance.goods})


def generated(seed, **kw):
    return generate_instance(GeneratorConfig(seed=seed, **kw))


def rng(seed):
    return random.Random(seed)


def random_family(rng, goods, depth=4):
    """A random laminar family by recursive splitting."""
    out = []

    def split(block, level):
        if len(block) < 2 or level == depth:
            return
        parts = rng.randint(2, min(3, len(block)))
        cuts = sorted(rng.sample(range(1, len(block)), parts - 1))
        pieces = [block[a:b] for a, b in zip([0] + cuts, cuts + [len(block)])]
        for piece in pieces:
            if rng.random() < 0.7:
                out.append(frozenset(piece))
            split(piece, level + 1)

    shuffled = list(goods)
    rng.shuffle(shuffled)
    split(shuffled, 1)
    return out
