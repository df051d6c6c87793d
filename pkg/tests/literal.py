"""Definition-by-definition predicate evaluators, written without the package's kernels.

They are slow and exist only to cross-check the library.
"""

import itertools
import math
from fractions import Fraction


def bundles(alloc, S, n):
    out = [set() for _ in range(n)]
    for g in S:
        out[alloc.owner[g]].add(g)
    return out


def value(inst, i, X):
    return sum((inst.values[i][g] for g in X), Fraction(0))


def head(inst, i, S, g):
    v = inst.values[i]
    return {h for h in S if v[h] >= v[g]}


def sd_geq(inst, i, X, Y, S):
    return all(len(X & head(inst, i, S, g)) >= len(Y & head(inst, i, S, g)) for g in S)


def ef(inst, alloc, S):
    A = bundles(alloc, S, inst.n)
    return all(value(inst, i, A[i]) >= value(inst, i, A[j]) for i in range(inst.n) for j in range(inst.n))


def ef1(inst, alloc, S):
    A = bundles(alloc, S, inst.n)
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j or not A[j]:
                continue
            if not any(value(inst, i, A[i]) >= value(inst, i, A[j] - {g}) for g in A[j]):
                return False
    return True


def efx(inst, alloc, S):
    A = bundles(alloc, S, inst.n)
    return all(value(inst, i, A[i]) >= value(inst, i, A[j] - {g})
               for i in range(inst.n) for j in range(inst.n) if i != j for g in A[j])


def prop(inst, alloc, S):
    A = bundles(alloc, S, inst.n)
    return all(value(inst, i, A[i]) * inst.n >= value(inst, i, S) for i in range(inst.n))


def prop1(inst, alloc, S):
    A = bundles(alloc, S, inst.n)
    for i in range(inst.n):
        if A[i] == set(S):
            continue
        if not any((value(inst, i, A[i]) + inst.values[i][g]) * inst.n >= value(inst, i, S) for g in set(S) - A[i]):
            return False
    return True


def sd_ef(inst, alloc, S):
    S = set(S)
    A = bundles(alloc, S, inst.n)
    return all(sd_geq(inst, i, A[i], A[j], S) for i in range(inst.n) for j in range(inst.n))


def sd_ef1(inst, alloc, S):
    S = set(S)
    A = bundles(alloc, S, inst.n)
    for i in range(inst.n):
        for j in range(inst.n):
            if i == j or not A[j]:
                continue
            if not any(sd_geq(inst, i, A[i], A[j] - {g}, S) for g in A[j]):
                return False
    return True


def sd_prop1(inst, alloc, S):
    S = set(S)
    A = bundles(alloc, S, inst.n)
    for i in range(inst.n):
        if A[i] == S:
            continue
        ok = False
        for g in S - A[i]:
            X = A[i] | {g}
            if all(len(X & head(inst, i, S, h)) >= math.ceil(len(head(inst, i, S, h)) / inst.n) for h in S):
                ok = True
                break
        if not ok:
            return False
    return True


def balanced(inst, alloc, S):
    sizes = [len(b) for b in bundles(alloc, S, inst.n)]
    return max(sizes) - min(sizes) <= 1


def po(inst, alloc, S):
    S = sorted(S)
    A = bundles(alloc, S, inst.n)
    base = [value(inst, i, A[i]) for i in range(inst.n)]
    for assign in itertools.product(range(inst.n), repeat=len(S)):
        u = [Fraction(0)] * inst.n
        for g, a in zip(S, assign):
            u[a] += inst.values[a][g]
        if all(x >= y for x, y in zip(u, base)) and any(x > y for x, y in zip(u, base)):
            return False
    return True


BY_NAME = {
    "EF": ef, "EF1": ef1, "EFX": efx, "PROP": prop, "PROP1": prop1,
    "SD_EF": sd_ef, "SD_EF1": sd_ef1, "SD_PROP1": sd_prop1, "PO": po, "BALANCED": balanced,
}
