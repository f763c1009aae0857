# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled relation kernels; same contract as ``_kernels_py``."""

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free

cdef uint64_t MASK = 0xFFFFFFFFFFFFFFFF


cdef uint64_t* _unpack(rows, Py_ssize_t n, Py_ssize_t W) except NULL:
    cdef uint64_t* m = <uint64_t*> malloc(n * W * sizeof(uint64_t))
    if m == NULL:
        raise MemoryError()
    cdef Py_ssize_t i, w
    for i in range(n):
        r = rows[i]
        for w in range(W):
            m[i * W + w] = <uint64_t> (r & MASK)
            r >>= 64
    return m


cdef list _pack(uint64_t* m, Py_ssize_t n, Py_ssize_t W):
    cdef Py_ssize_t i, w
    out = []
    for i in range(n):
        acc = 0
        for w in range(W - 1, -1, -1):
            acc = (acc << 64) | m[i * W + w]
        out.append(acc)
    return out


def compose(a, b, Py_ssize_t n):
    if n == 0:
        return []
    cdef Py_ssize_t W = (n + 63) // 64
    cdef uint64_t* ma = _unpack(a, n, W)
    cdef uint64_t* mb = _unpack(b, n, W)
    cdef uint64_t* mo = <uint64_t*> malloc(n * W * sizeof(uint64_t))
    cdef Py_ssize_t i, j, w
    try:
        for i in range(n * W):
            mo[i] = 0
        for i in range(n):
            for j in range(n):
                if (ma[i * W + (j >> 6)] >> (j & 63)) & 1:
                    for w in range(W):
                        mo[i * W + w] |= mb[j * W + w]
        return _pack(mo, n, W)
    finally:
        free(ma)
        free(mb)
        free(mo)


def closure(rows, Py_ssize_t n):
    if n == 0:
        return []
    cdef Py_ssize_t W = (n + 63) // 64
    cdef uint64_t* m = _unpack(rows, n, W)
    cdef Py_ssize_t i, k, w
    try:
        for k in range(n):
            for i in range(n):
                if (m[i * W + (k >> 6)] >> (k & 63)) & 1:
                    for w in range(W):
                        m[i * W + w] |= m[k * W + w]
        return _pack(m, n, W)
    finally:
        free(m)


def is_acyclic(rows, Py_ssize_t n):
    if n == 0:
        return True
    cdef Py_ssize_t W = (n + 63) // 64
    cdef uint64_t* m = _unpack(rows, n, W)
    cdef int* indeg = <int*> malloc(n * sizeof(int))
    cdef int* stack = <int*> malloc(n * sizeof(int))
    cdef Py_ssize_t i, j, top = 0, seen = 0
    try:
        for j in range(n):
            indeg[j] = 0
        for i in range(n):
            for j in range(n):
                if (m[i * W + (j >> 6)] >> (j & 63)) & 1:
                    indeg[j] += 1
        for j in range(n):
            if indeg[j] == 0:
                stack[top] = j
                top += 1
        while top > 0:
            top -= 1
            i = stack[top]
            seen += 1
            for j in range(n):
                if (m[i * W + (j >> 6)] >> (j & 63)) & 1:
                    indeg[j] -= 1
                    if indeg[j] == 0:
                        stack[top] = j
                        top += 1
        return seen == n
    finally:
        free(m)
        free(indeg)
        free(stack)
