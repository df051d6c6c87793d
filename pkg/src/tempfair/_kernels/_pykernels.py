"""Pure-Python counting kernels (reference implementation and import fallback).

All inputs are flat integer sequences so the compiled twin can take the same
``array.array('i')`` buffers. Positions index one agent's strict ranking of a
good set; ``boundary[p]`` is 1 when positions ``0..p`` form a head set, i.e. the
good at ``p`` is strictly preferred to the good at ``p + 1``.
"""

SD_EF = 0
SD_EF1 = 1
SD_PROP1 = 2
SUFFICIENCY = 3
NECESSITY = 4


def sd_scan(owner, boundary, n, i, mode):
    """Scan agent ``i``'s ranking and return the first violated count condition.

    Returns ``(other, length)``: the agent compared against (``i`` itself for the
    proportional modes) and the prefix length at which the condition fails, or
    ``(-1, -1)`` when every prefix passes.

    For SD_EF1 the removed good is the envied bundle's top-ranked good; because
    head sets are nested prefixes, that choice is optimal, so this equals the
    existential definition.
    """
    m = len(owner)
    counts = [0] * n
    first = [m] * n
    for p in range(m):
        a = owner[p]
        if first[a] == m:
            first[a] = p
    gap = first_not_owned(owner, i) if mode == SD_PROP1 else m
    if mode == SD_PROP1 and gap == m:
        return -1, -1
    for p in range(m):
        counts[owner[p]] += 1
        length = p + 1
        if mode == SUFFICIENCY:
            ci = counts[i]
            for j in range(n):
                if j != i and ci < counts[j] - 1:
                    return j, length
            continue
        if not boundary[p]:
            continue
        ci = counts[i]
        if mode == SD_EF:
            for j in range(n):
                if j != i and ci < counts[j]:
                    return j, length
        elif mode == SD_EF1:
            for j in range(n):
                if j == i:
                    continue
                cj = counts[j] - 1 if first[j] <= p else counts[j]
                if ci < cj:
                    return j, length
        elif mode == SD_PROP1:
            have = ci + 1 if gap <= p else ci
            if have * n < length:
                return i, length
        elif mode == NECESSITY:
            if ci * n < length - (length % n):
                return i, length
    return -1, -1


def first_not_owned(owner, i):
    for p in range(len(owner)):
        if owner[p] != i:
            return p
    return len(owner)


def prune_blocks(assign, idx, idx_off, lower, agents, agents_off, n):
    """Return the first block whose necessary SD-EF1 counts can no longer be met.

    Block ``b`` is a head set (global good indices ``idx[idx_off[b]:idx_off[b+1]]``)
    shared by the agents ``agents[agents_off[b]:agents_off[b+1]]``, each of whom
    must end with at least ``lower[b]`` of its goods and with no other agent
    holding more than one good beyond them. ``assign[g]`` is -1 while unplaced.
    Returns -1 when every block is still satisfiable.
    """
    counts = [0] * n
    nblocks = len(lower)
    for b in range(nblocks):
        for a in range(n):
            counts[a] = 0
        free = 0
        for q in range(idx_off[b], idx_off[b + 1]):
            a = assign[idx[q]]
            if a < 0:
                free += 1
            else:
                counts[a] += 1
        lb = lower[b]
        deficit = 0
        least = -1
        for q in range(agents_off[b], agents_off[b + 1]):
            c = counts[agents[q]]
            if c + free < lb:
                return b
            if c < lb:
                deficit += lb - c
            if least < 0 or c < least:
                least = c
        if deficit > free:
            return b
        if least >= 0:
            most = max(counts)
            if most > least + free + 1:
                return b
    return -1
