"""Pure-Python implementation of the execution kernels.

The compiled module ``_ckernels`` exposes the same functions with the same
semantics; ``_kernel`` picks one at import time.
"""


def greedy_run(nxt, stoff, owner, ebeg, etgt, ecnt, x, q, counts, limit, cap, trace):
    """Fire the lowest-index eligible letter until none is eligible or ``cap`` steps.

    A letter ``a`` is eligible when ``x[a] >= 1`` and ``counts[a] < limit[a]``
    (a negative limit means unlimited). ``x``, ``q`` and ``counts`` are updated
    in place. When ``trace`` is a list the fired letters are appended to it.
    Returns ``(steps, status)`` where status 0 means no eligible letter remains
    and status 1 means the cap was reached.
    """
    n = len(x)
    steps = 0
    a = 0
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
        if trace is not None:
            trace.append(a)
        steps += 1
        low = a
        for k in range(ebeg[row], ebeg[row + 1]):
            b = etgt[k]
            x[b] += ecnt[k]
            if b < low and x[b] >= 1 and (limit[b] < 0 or counts[b] < limit[b]):
                low = b
        a = low


def run_word(nxt, stoff, owner, ebeg, etgt, ecnt, x, q, word):
    """Process ``word`` (letter indices) in place; return True if it was legal."""
    legal = True
    for a in word:
        if x[a] < 1:
            legal = False
        v = owner[a]
        row = stoff[a] + q[v]
        x[a] -= 1
        q[v] = nxt[row]
        for k in range(ebeg[row], ebeg[row + 1]):
            x[etgt[k]] += ecnt[k]
    return legal
