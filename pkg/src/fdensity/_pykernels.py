"""Pure-Python versions of the compiled kernels in ``_kernels.pyx``.

Results match the compiled versions bit for bit: the Cantor scan uses the
same 62-bit fixed-point digits, and partial sums are accumulated in index
order (``np.cumsum`` is sequential).
"""

import math

import numpy as np

CANTOR_DIGITS = 53


def _cantor(x):
    if x >= 1.0:
        return 1.0
    if x <= 0.0:
        return 0.0
    m = int(math.ldexp(x, 62))
    bits = 0
    for i in range(CANTOR_DIGITS):
        m *= 3
        d = m >> 62
        m -= d << 62
        if d == 1:
            bits = ((bits << 1) | 1) << (CANTOR_DIGITS - 1 - i)
            return math.ldexp(float(bits), -CANTOR_DIGITS)
        bits = (bits << 1) | (d >> 1)
    return math.ldexp(float(bits), -CANTOR_DIGITS)


def cantor_many(x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    return np.array([_cantor(v) for v in x.tolist()], dtype=np.float64)


def oscillation_by_lag(g):
    g = np.ascontiguousarray(g, dtype=np.float64)
    n = g.shape[0]
    out = np.zeros(n, dtype=np.float64)
    for lag in range(1, n):
        out[lag] = np.max(np.abs(g[lag:] - g[:-lag]))
    return out


def scan_deviations(dev, fdev, eps, grid):
    dev = np.ascontiguousarray(dev, dtype=np.float64)
    fdev = np.ascontiguousarray(fdev, dtype=np.float64)
    eps = np.ascontiguousarray(eps, dtype=np.float64)
    grid = np.ascontiguousarray(grid, dtype=np.int64)
    if grid.size and grid[-1] > dev.shape[0]:
        raise ValueError("grid exceeds the scanned horizon")
    idx = grid - 1
    if grid.size == 0:
        empty = np.zeros(0)
        return np.zeros((eps.size, 0), dtype=np.int64), empty, empty, empty
    counts = np.stack([np.cumsum(dev >= e)[idx] for e in eps]) if eps.size else \
        np.zeros((0, grid.size), dtype=np.int64)
    sums = np.cumsum(dev)[idx]
    fsums = np.cumsum(fdev)[idx]
    maxes = np.maximum.accumulate(np.maximum(dev, 0.0))[idx]
    return counts.astype(np.int64), sums, fsums, maxes
