"""Pure-Python matching kernels (fallback for the compiled ``_match_c``).

Trees arrive flattened: ``labels[k]`` is the interned label of node ``k``
and its children are ``kids[ptr[k]:ptr[k + 1]]``.

The clustered kernel works on the value *before* the final division by
the sibling count. For two matched nodes whose child lists have lengths m
and n, every child pair shares the same divisor max(m, n), so the division
can be applied once to the DP result instead of to every weight. That
keeps self-matches exact (k * 1.0 / k == 1.0) at no cost in generality.
"""


def stm(la, pa, ka, i, lb, pb, kb, j):
    if la[i] != lb[j]:
        return 0
    a0 = pa[i]
    m = pa[i + 1] - a0
    b0 = pb[j]
    n = pb[j + 1] - b0
    if m == 0 or n == 0:
        return 1
    prev = [0] * (n + 1)
    for ii in range(m):
        ci = ka[a0 + ii]
        lab = la[ci]
        cur = [0] * (n + 1)
        for jj in range(n):
            cj = kb[b0 + jj]
            best = prev[jj]
            if lb[cj] == lab:
                best += stm(la, pa, ka, ci, lb, pb, kb, cj)
            if cur[jj] > best:
                best = cur[jj]
            if prev[jj + 1] > best:
                best = prev[jj + 1]
            cur[jj + 1] = best
        prev = cur
    return prev[n] + 1


def ctm_unscaled(la, pa, ka, i, lb, pb, kb, j):
    """Clustered score of (i, j) times max(t(i), t(j))."""
    if la[i] != lb[j]:
        return 0.0
    a0 = pa[i]
    m = pa[i + 1] - a0
    b0 = pb[j]
    n = pb[j + 1] - b0
    if m == 0 or n == 0:
        return 1.0
    prev = [0.0] * (n + 1)
    for ii in range(m):
        ci = ka[a0 + ii]
        lab = la[ci]
        cur = [0.0] * (n + 1)
        for jj in range(n):
            cj = kb[b0 + jj]
            best = prev[jj]
            if lb[cj] == lab:
                best += ctm_unscaled(la, pa, ka, ci, lb, pb, kb, cj)
            if cur[jj] > best:
                best = cur[jj]
            if prev[jj + 1] > best:
                best = prev[jj + 1]
            cur[jj + 1] = best
        prev = cur
    return prev[n] / (m if m > n else n)


def ctm(la, pa, ka, i, lb, pb, kb, j):
    # compared roots are standalone trees, so t = 1 on both sides
    return ctm_unscaled(la, pa, ka, i, lb, pb, kb, j)


def stm_many(la, pa, ka, i, lb, pb, kb, targets):
    return [stm(la, pa, ka, i, lb, pb, kb, j) for j in targets]


def ctm_many(la, pa, ka, i, lb, pb, kb, targets):
    return [ctm(la, pa, ka, i, lb, pb, kb, j) for j in targets]
