# cython: language_level=3
"""Compiled sample-evaluation kernel.

Same contract and semantics as ``_simkernel_py`` (see its docstring); this
version walks the flattened tree once per sample with no intermediate
arrays, which is considerably faster for non-trivial trees.
"""

import numpy as np


LEAF, AND, OR, PAND, POR = 0, 1, 2, 3, 4

KERNEL_NAME = "cython"


def count_top(
    const signed char[::1] kinds,
    const int[::1] offsets,
    const int[::1] children,
    const int[::1] leaf_rows,
    const double[:, ::1] times,
    double horizon,
):
    cdef Py_ssize_t n_nodes = kinds.shape[0]
    cdef Py_ssize_t n_samples = times.shape[1]
    cdef double[::1] buf = np.empty(n_nodes, dtype=np.float64)
    cdef double INF = float("inf")
    cdef Py_ssize_t s, i, j, start, end
    cdef int kind
    cdef double v, w
    cdef bint ok
    cdef long long hits = 0

    for s in range(n_samples):
        for i in range(n_nodes):
            kind = kinds[i]
            if kind == 0:  # LEAF
                buf[i] = times[leaf_rows[i], s]
                continue
            start = offsets[i]
            end = offsets[i + 1]
            if kind == 1:  # AND
                v = buf[children[start]]
                for j in range(start + 1, end):
                    w = buf[children[j]]
                    if w > v:
                        v = w
            elif kind == 2:  # OR
                v = buf[children[start]]
                for j in range(start + 1, end):
                    w = buf[children[j]]
                    if w < v:
                        v = w
            elif kind == 3:  # PAND
                ok = True
                v = buf[children[start]]
                for j in range(start + 1, end):
                    w = buf[children[j]]
                    if not v < w:
                        ok = False
                        break
                    v = w
                if not ok:
                    v = INF
            else:  # POR
                v = buf[children[start]]
                ok = True
                for j in range(start + 1, end):
                    if not v < buf[children[j]]:
                        ok = False
                        break
                if not ok:
                    v = INF
            buf[i] = v
        if buf[n_nodes - 1] <= horizon:
            hits += 1
    return hits
