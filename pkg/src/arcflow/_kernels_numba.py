"""Numba-compiled hot kernels.

Mirrors ``_kernels_numpy`` expression-for-expression; see that module for
semantics. Compiled lazily on first call, cached on disk.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def interp_zero_ext(samples, x0, dx, queries):
    n = samples.shape[0]
    out = np.empty(queries.shape[0])
    for i in range(queries.shape[0]):
        pos = (queries[i] - x0) / dx
        j = int(np.floor(pos))
        frac = pos - j
        left = samples[j] if 0 <= j < n else 0.0
        right = samples[j + 1] if 0 <= j + 1 < n else 0.0
        out[i] = left * (1.0 - frac) + right * frac
    return out


@numba.njit(cache=True)
def shift_integer(samples, k):
    n = samples.shape[0]
    out = np.zeros(n)
    src_lo = max(0, k)
    src_hi = min(n, n + k)
    for s in range(src_lo, src_hi):
        out[s - k] = samples[s]
    return out


@numba.njit(cache=True)
def directed_hausdorff_sq(a, b):
    worst = 0.0
    for i in range(a.shape[0]):
        best = np.inf
        for j in range(b.shape[0]):
            acc = 0.0
            for k in range(a.shape[1]):
                d = a[i, k] - b[j, k]
                acc += d * d
            if acc < best:
                best = acc
        if best > worst:
            worst = best
    return worst


@numba.njit(cache=True)
def pairwise_min_dist_sq(pts):
    best = np.inf
    n = pts.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            acc = 0.0
            for k in range(pts.shape[1]):
                d = pts[i, k] - pts[j, k]
                acc += d * d
            if acc < best:
                best = acc
    return best


@numba.njit(cache=True)
def min_dist_sq_to_points(q, pts):
    best = np.inf
    for i in range(pts.shape[0]):
        acc = 0.0
        for k in range(pts.shape[1]):
            d = pts[i, k] - q[k]
            acc += d * d
        if acc < best:
            best = acc
    return best
