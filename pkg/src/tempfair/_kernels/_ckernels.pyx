# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_pykernels``; same signatures, int32 buffer inputs."""

from libc.stdlib cimport malloc, free as cfree

DEF SD_EF = 0
DEF SD_EF1 = 1
DEF SD_PROP1 = 2
DEF SUFFICIENCY = 3
DEF NECESSITY = 4


cdef int _first_not_owned(const int[:] owner, int i) nogil:
    cdef Py_ssize_t p
    for p in range(owner.shape[0]):
        if owner[p] != i:
            return <int>p
    return <int>owner.shape[0]


def first_not_owned(const int[:] owner, int i):
    return _first_not_owned(owner, i)


def sd_scan(const int[:] owner, const int[:] boundary, int n, int i, int mode):
    cdef Py_ssize_t m = owner.shape[0]
    cdef Py_ssize_t p
    cdef int j, a, ci, cj, have, length, gap
    cdef int other = -1
    cdef int where = -1
    cdef int *counts = <int *> malloc(n * sizeof(int))
    cdef int *first = <int *> malloc(n * sizeof(int))
    if counts == NULL or first == NULL:
        cfree(counts)
        cfree(first)
        raise MemoryError()
    try:
        with nogil:
            for j in range(n):
                counts[j] = 0
                first[j] = <int>m
            for p in range(m):
                a = owner[p]
                if first[a] == m:
                    first[a] = <int>p
            gap = <int>m
            if mode == SD_PROP1:
                gap = _first_not_owned(owner, i)
            if not (mode == SD_PROP1 and gap == m):
                for p in range(m):
                    counts[owner[p]] += 1
                    length = <int>p + 1
                    ci = counts[i]
                    if mode == SUFFICIENCY:
                        for j in range(n):
                            if j != i and ci < counts[j] - 1:
                                other = j
                                where = length
                                break
                        if other >= 0:
                            break
                        continue
                    if not boundary[p]:
                        continue
                    if mode == SD_EF:
                        for j in range(n):
                            if j != i and ci < counts[j]:
                                other = j
                                where = length
                                break
                    elif mode == SD_EF1:
                        for j in range(n):
                            if j == i:
                                continue
                            cj = counts[j]
                            if first[j] <= p:
                                cj -= 1
                            if ci < cj:
                                other = j
                                where = length
                                break
                    elif mode == SD_PROP1:
                        have = ci
                        if gap <= p:
                            have += 1
                        if have * n < length:
                            other = i
                            where = length
                    elif mode == NECESSITY:
                        if ci * n < length - (length % n):
                            other = i
                            where = length
                    if other >= 0:
                        break
    finally:
        cfree(counts)
        cfree(first)
    return other, where


def prune_blocks(const int[:] assign, const int[:] idx, const int[:] idx_off,
                 const int[:] lower, const int[:] agents, const int[:] agents_off, int n):
    cdef Py_ssize_t nblocks = lower.shape[0]
    cdef Py_ssize_t b, q
    cdef int a, c, lb, deficit, least, most, nfree
    cdef int result = -1
    cdef int *counts = <int *> malloc(n * sizeof(int))
    if counts == NULL:
        raise MemoryError()
    try:
        with nogil:
            for b in range(nblocks):
                for a in range(n):
                    counts[a] = 0
                nfree = 0
                for q in range(idx_off[b], idx_off[b + 1]):
                    a = assign[idx[q]]
                    if a < 0:
                        nfree += 1
                    else:
                        counts[a] += 1
                lb = lower[b]
                deficit = 0
                least = -1
                for q in range(agents_off[b], agents_off[b + 1]):
                    c = counts[agents[q]]
                    if c + nfree < lb:
                        result = <int>b
                        break
                    if c < lb:
                        deficit += lb - c
                    if least < 0 or c < least:
                        least = c
                if result >= 0:
                    break
                if deficit > nfree:
                    result = <int>b
                    break
                if least >= 0:
                    most = 0
                    for a in range(n):
                        if counts[a] > most:
                            most = counts[a]
                    if most > least + nfree + 1:
                        result = <int>b
                        break
    finally:
        cfree(counts)
    return result
