"""Pure-Python relation kernels over bitset rows.

A relation on ``n`` events is a list of ``n`` ints; bit ``j`` of ``rows[i]``
is set iff ``(i, j)`` is in the relation.
"""


def compose(a, b, n):
    out = []
    for i in range(n):
        r = a[i]
        acc = 0
        while r:
            low = r & -r
            acc |= b[low.bit_length() - 1]
            r ^= low
        out.append(acc)
    return out


def closure(rows, n):
    rows = list(rows)
    for k in range(n):
        bit = 1 << k
        rk = rows[k]
        if not rk:
            continue
        for i in range(n):
            if rows[i] & bit:
                rows[i] |= rk
    return rows


def is_acyclic(rows, n):
    # Kahn's algorithm on in-degrees.
    indeg = [0] * n
    for i in range(n):
        r = rows[i]
        while r:
            low = r & -r
            indeg[low.bit_length() - 1] += 1
            r ^= low
    stack = [i for i in range(n) if indeg[i] == 0]
    seen = 0
    while stack:
        i = stack.pop()
        seen += 1
        r = rows[i]
        while r:
            low = r & -r
            j = low.bit_length() - 1
            indeg[j] -= 1
            if indeg[j] == 0:
                stack.append(j)
            r ^= low
    return seen == n
