# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: dense Cauchy-type sums over boundary nodes.

Each routine mirrors a function in ``_kernels_py``; the backends are
interchangeable and selected in ``kernels``.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex clog(double complex)
    double cabs(double complex)


def cauchy_sum(const double complex[::1] nodes,
               const double complex[::1] coeffs,
               const double complex[::1] targets):
    """sum_j coeffs[j] / (nodes[j] - targets[p]) for every target p."""
    cdef Py_ssize_t n = nodes.shape[0]
    cdef Py_ssize_t p = targets.shape[0]
    out = np.empty(p, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i, j
    cdef double complex acc, t
    with nogil:
        for i in range(p):
            t = targets[i]
            acc = 0
            for j in range(n):
                acc = acc + coeffs[j] / (nodes[j] - t)
            ov[i] = acc
    return out


cdef inline double complex _log_ratio(double complex num, double complex den) nogil:
    # Log(num/den) with num = node-a, den = node-b; for nodes far from the
    # segment the ratio is 1 + x with |x| small and a truncated log1p series
    # avoids the clog call (relative error below 4e-15 for |x| <= 0.25)
    cdef double complex x = (num - den) / den
    cdef double complex s
    cdef double ax = cabs(x)
    if ax > 0.25:
        return clog(num / den)
    s = x * (1.0 / 24.0)
    s = x * (1.0 / 23.0 - s)
    s = x * (1.0 / 22.0 - s)
    s = x * (1.0 / 21.0 - s)
    s = x * (1.0 / 20.0 - s)
    s = x * (1.0 / 19.0 - s)
    s = x * (1.0 / 18.0 - s)
    s = x * (1.0 / 17.0 - s)
    s = x * (1.0 / 16.0 - s)
    s = x * (1.0 / 15.0 - s)
    s = x * (1.0 / 14.0 - s)
    s = x * (1.0 / 13.0 - s)
    s = x * (1.0 / 12.0 - s)
    s = x * (1.0 / 11.0 - s)
    s = x * (1.0 / 10.0 - s)
    s = x * (1.0 / 9.0 - s)
    s = x * (1.0 / 8.0 - s)
    s = x * (1.0 / 7.0 - s)
    s = x * (1.0 / 6.0 - s)
    s = x * (1.0 / 5.0 - s)
    s = x * (1.0 / 4.0 - s)
    s = x * (1.0 / 3.0 - s)
    s = x * (0.5 - s)
    return x * (1.0 - s)


def segment_log_sum(const double complex[::1] nodes,
                    const double complex[::1] coeffs,
                    const double complex[::1] seg_a,
                    const double complex[::1] seg_b):
    """sum_j coeffs[j] * Log((nodes[j]-a_p)/(nodes[j]-b_p)) per segment p.

    Valid when segment [a_p, b_p] avoids every node (the subtended angle is
    then below pi and the principal branch matches the continuous one).
    """
    cdef Py_ssize_t n = nodes.shape[0]
    cdef Py_ssize_t p = seg_a.shape[0]
    out = np.empty(p, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t i, j
    cdef double complex acc, a, b
    with nogil:
        for i in range(p):
            a = seg_a[i]
            b = seg_b[i]
            acc = 0
            for j in range(n):
                acc = acc + coeffs[j] * _log_ratio(nodes[j] - a, nodes[j] - b)
            ov[i] = acc
    return out


def nearest_node(const double complex[::1] nodes,
                 const double complex[::1] targets):
    """Per-target distance to the closest node and its index."""
    cdef Py_ssize_t n = nodes.shape[0]
    cdef Py_ssize_t p = targets.shape[0]
    dist = np.empty(p, dtype=np.float64)
    idx = np.empty(p, dtype=np.int64)
    cdef double[::1] dv = dist
    cdef long long[::1] iv = idx
    cdef Py_ssize_t i, j, jbest
    cdef double best, d
    cdef double complex t
    with nogil:
        for i in range(p):
            t = targets[i]
            best = cabs(nodes[0] - t)
            jbest = 0
            for j in range(1, n):
                d = cabs(nodes[j] - t)
                if d < best:
                    best = d
                    jbest = j
            dv[i] = best
            iv[i] = jbest
    return dist, idx
