# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled matching kernels. Same contract and arithmetic order as
``_match_py`` so both backends return bit-identical results."""

from libc.stdlib cimport malloc, free


cdef struct Tree:
    const int *labels
    const int *ptr
    const int *kids


cdef long _stm(Tree *a, int i, Tree *b, int j) nogil:
    cdef int a0, b0, m, n, ii, jj, ci, cj, lab
    cdef long best
    cdef long *prev
    cdef long *cur
    cdef long *tmp
    if a.labels[i] != b.labels[j]:
        return 0
    a0 = a.ptr[i]
    m = a.ptr[i + 1] - a0
    b0 = b.ptr[j]
    n = b.ptr[j + 1] - b0
    if m == 0 or n == 0:
        return 1
    prev = <long *> malloc(2 * (n + 1) * sizeof(long))
    cur = prev + (n + 1)
    for jj in range(n + 1):
        prev[jj] = 0
    for ii in range(m):
        ci = a.kids[a0 + ii]
        lab = a.labels[ci]
        cur[0] = 0
        for jj in range(n):
            cj = b.kids[b0 + jj]
            best = prev[jj]
            if b.labels[cj] == lab:
                best += _stm(a, ci, b, cj)
            if cur[jj] > best:
                best = cur[jj]
            if prev[jj + 1] > best:
                best = prev[jj + 1]
            cur[jj + 1] = best
        tmp = prev
        prev = cur
        cur = tmp
    best = prev[n]
    free(prev if prev < cur else cur)
    return best + 1


cdef double _ctm(Tree *a, int i, Tree *b, int j) nogil:
    cdef int a0, b0, m, n, ii, jj, ci, cj, lab
    cdef double best
    cdef double *prev
    cdef double *cur
    cdef double *tmp
    if a.labels[i] != b.labels[j]:
        return 0.0
    a0 = a.ptr[i]
    m = a.ptr[i + 1] - a0
    b0 = b.ptr[j]
    n = b.ptr[j + 1] - b0
    if m == 0 or n == 0:
        return 1.0
    prev = <double *> malloc(2 * (n + 1) * sizeof(double))
    cur = prev + (n + 1)
    for jj in range(n + 1):
        prev[jj] = 0.0
    for ii in range(m):
        ci = a.kids[a0 + ii]
        lab = a.labels[ci]
        cur[0] = 0.0
        for jj in range(n):
            cj = b.kids[b0 + jj]
            best = prev[jj]
            if b.labels[cj] == lab:
                best += _ctm(a, ci, b, cj)
            if cur[jj] > best:
                best = cur[jj]
            if prev[jj + 1] > best:
                best = prev[jj + 1]
            cur[jj + 1] = best
        tmp = prev
        prev = cur
        cur = tmp
    best = prev[n] / (m if m > n else n)
    free(prev if prev < cur else cur)
    return best


cdef inline Tree _view(const int[::1] labels, const int[::1] ptr, const int[::1] kids):
    cdef Tree t
    t.labels = &labels[0]
    t.ptr = &ptr[0]
    # kids may be empty for a single-node tree; never dereferenced then
    t.kids = &kids[0] if kids.shape[0] > 0 else NULL
    return t


def stm(const int[::1] la, const int[::1] pa, const int[::1] ka, int i,
        const int[::1] lb, const int[::1] pb, const int[::1] kb, int j):
    cdef Tree a = _view(la, pa, ka)
    cdef Tree b = _view(lb, pb, kb)
    return _stm(&a, i, &b, j)


def ctm(const int[::1] la, const int[::1] pa, const int[::1] ka, int i,
        const int[::1] lb, const int[::1] pb, const int[::1] kb, int j):
    cdef Tree a = _view(la, pa, ka)
    cdef Tree b = _view(lb, pb, kb)
    return _ctm(&a, i, &b, j)


def stm_many(const int[::1] la, const int[::1] pa, const int[::1] ka, int i,
             const int[::1] lb, const int[::1] pb, const int[::1] kb, targets):
    cdef Tree a = _view(la, pa, ka)
    cdef Tree b = _view(lb, pb, kb)
    cdef int j
    return [_stm(&a, i, &b, j) for j in targets]


def ctm_many(const int[::1] la, const int[::1] pa, const int[::1] ka, int i,
             const int[::1] lb, const int[::1] pb, const int[::1] kb, targets):
    cdef Tree a = _view(la, pa, ka)
    cdef Tree b = _view(lb, pb, kb)
    cdef int j
    return [_ctm(&a, i, &b, j) for j in targets]
