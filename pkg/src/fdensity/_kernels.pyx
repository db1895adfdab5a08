# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.

Every function here has a behaviour-identical twin in ``_pykernels``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, ldexp

cnp.import_array()

DEF CANTOR_DIGITS = 53


cdef inline double _cantor(double x) noexcept nogil:
    cdef unsigned long long m, bits = 0
    cdef unsigned long long d
    cdef int i
    if x >= 1.0:
        return 1.0
    if x <= 0.0:
        return 0.0
    # x as an exact fixed-point fraction m / 2**62; 3*m stays below 2**64
    m = <unsigned long long>ldexp(x, 62)
    for i in range(CANTOR_DIGITS):
        m = m * 3
        d = m >> 62
        m = m - (d << 62)
        if d == 1:
            bits = ((bits << 1) | 1) << (CANTOR_DIGITS - 1 - i)
            return ldexp(<double>bits, -CANTOR_DIGITS)
        bits = (bits << 1) | (d >> 1)
    return ldexp(<double>bits, -CANTOR_DIGITS)


def cantor_many(const double[::1] x):
    cdef Py_ssize_t i, n = x.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = _cantor(x[i])
    return out


def oscillation_by_lag(const double[::1] g):
    """``out[l] = max_i |g[i + l] - g[i]|`` for every lag ``l``."""
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t lag, i
    cdef double best, diff
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] o = out
    with nogil:
        for lag in range(1, n):
            best = 0.0
            for i in range(n - lag):
                diff = fabs(g[i + lag] - g[i])
                if diff > best:
                    best = diff
            o[lag] = best
    return out


def scan_deviations(const double[::1] dev, const double[::1] fdev,
                    const double[::1] eps, const long long[::1] grid):
    """One pass over ``dev`` (index k-1 holds term k) reporting, at each grid
    point n, the counts of terms >= each epsilon, the partial sums of
    ``dev`` and ``fdev``, and the running maximum of ``dev``."""
    cdef Py_ssize_t ne = eps.shape[0], ng = grid.shape[0]
    cdef Py_ssize_t k = 0, j, e
    cdef long long stop
    cdef double s = 0.0, fs = 0.0, mx = 0.0, v
    counts_arr = np.zeros((ne, ng), dtype=np.int64)
    sums_arr = np.zeros(ng, dtype=np.float64)
    fsums_arr = np.zeros(ng, dtype=np.float64)
    max_arr = np.zeros(ng, dtype=np.float64)
    cdef long long[:, ::1] counts = counts_arr
    cdef double[::1] sums = sums_arr, fsums = fsums_arr, maxes = max_arr
    running_arr = np.zeros(ne, dtype=np.int64)
    cdef long long[::1] running = running_arr
    if ng and grid[ng - 1] > dev.shape[0]:
        raise ValueError("grid exceeds the scanned horizon")
    with nogil:
        for j in range(ng):
            stop = grid[j]
            while k < stop:
                v = dev[k]
                s += v
                fs += fdev[k]
                if v > mx:
                    mx = v
                for e in range(ne):
                    if v >= eps[e]:
                        running[e] += 1
                k += 1
            for e in range(ne):
                counts[e, j] = running[e]
            sums[j] = s
            fsums[j] = fs
            maxes[j] = mx
    return counts_arr, sums_arr, fsums_arr, max_arr
