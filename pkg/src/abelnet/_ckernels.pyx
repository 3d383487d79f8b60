# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled execution kernels; see ``_pykernels`` for the reference semantics."""


def greedy_run(long long[:] nxt, long long[:] stoff, long long[:] owner,
               long long[:] ebeg, long long[:] etgt, long long[:] ecnt,
               long long[:] x, long long[:] q, long long[:] counts,
               long long[:] limit, long long cap, trace):
    cdef Py_ssize_t n = x.shape[0]
    cdef long long steps = 0
    cdef Py_ssize_t a = 0, b, low, k, v, row
    cdef bint record = trace is not None
    while True:
        while a < n and (x[a] < 1 or (limit[a] >= 0 and counts[a] >= limit[a])):
            a += 1
        if a == n:
            return steps, 0
        if steps >= cap:
            return steps, 1
        v = owner[a]
        row = stoff[a] + q[v]
        x[a] -= 1
        q[v] = nxt[row]
        counts[a] += 1
        if record:
            trace.append(a)
        steps += 1
        low = a
        for k in range(ebeg[row], ebeg[row + 1]):
            b = etgt[k]
            x[b] += ecnt[k]
            if b < low and x[b] >= 1 and (limit[b] < 0 or counts[b] < limit[b]):
                low = b
        a = low


def run_word(long long[:] nxt, long long[:] stoff, long long[:] owner,
             long long[:] ebeg, long long[:] etgt, long long[:] ecnt,
             long long[:] x, long long[:] q, word):
    cdef bint legal = True
    cdef Py_ssize_t a, v, row, k
    for item in word:
        a = item
        if x[a] < 1:
            legal = False
        v = owner[a]
        row = stoff[a] + q[v]
        x[a] -= 1
        q[v] = nxt[row]
        for k in range(ebeg[row], ebeg[row + 1]):
            x[etgt[k]] += ecnt[k]
    return legal
