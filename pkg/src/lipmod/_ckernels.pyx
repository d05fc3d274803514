# cython: language_level=3
"""Compiled versions of the hot kernels (see ``_pykernels`` for semantics)."""
import numpy as np
from libc.math cimport fabs, sqrt


def pairwise_distances(A, B, int q_code, bint split_last):
    cdef const double[:, ::1] a = np.ascontiguousarray(A, dtype=np.float64)
    cdef const double[:, ::1] bb = np.ascontiguousarray(B, dtype=np.float64)
    cdef Py_ssize_t m = a.shape[0], k = bb.shape[0], dim = a.shape[1]
    cdef Py_ssize_t head = dim - 1 if split_last else dim
    out = np.empty((m, k), dtype=np.float64)
    cdef double[:, ::1] d = out
    cdef Py_ssize_t i, j, c
    cdef double acc, t, last
    with nogil:
        for i in range(m):
            for j in range(k):
                acc = 0.0
                for c in range(head):
                    t = a[i, c] - bb[j, c]
                    if q_code == 1:
                        acc += fabs(t)
                    elif q_code == 2:
                        acc += t * t
                    elif fabs(t) > acc:
                        acc = fabs(t)
                if q_code == 2:
                    acc = sqrt(acc)
                if split_last:
                    last = fabs(a[i, dim - 1] - bb[j, dim - 1])
                    if last > acc:
                        acc = last
                d[i, j] = acc
    return out


def hildreth_sweeps(A, b, y, lam, row_sq, int sweeps):
    cdef const double[:, ::1] a = A
    cdef const double[::1] bv = b
    cdef double[::1] yv = y
    cdef double[::1] lv = lam
    cdef const double[::1] rs = row_sq
    cdef Py_ssize_t m = a.shape[0], n = a.shape[1]
    cdef Py_ssize_t s, i, c
    cdef double change = 0.0, dot, new, delta, mv
    with nogil:
        for s in range(sweeps):
            change = 0.0
            for i in range(m):
                if rs[i] == 0.0:
                    continue
                dot = 0.0
                for c in range(n):
                    dot += a[i, c] * yv[c]
                new = lv[i] + (dot - bv[i]) / rs[i]
                if new < 0.0:
                    new = 0.0
                delta = new - lv[i]
                if delta != 0.0:
                    lv[i] = new
                    for c in range(n):
                        mv = delta * a[i, c]
                        yv[c] -= mv
                        if fabs(mv) > change:
                            change = fabs(mv)
    return change
